#include "vmuckle/suite.hpp"

#include <algorithm>
#include <mutex>

#include "vmuckle/errors.hpp"

namespace vmuckle {

namespace {

// Counter-mode HMAC-SHA-384 expansion used for deterministic, recomputable
// padding and for the hash-based test primitives.
Bytes expand(std::string_view label, ByteView seed, size_t n) {
    Bytes out;
    out.reserve(n);
    uint32_t counter = 0;
    while (out.size() < n) {
        Bytes msg(seed.begin(), seed.end());
        append_u32(msg, counter++);
        Bytes block = crypto::hmac_sha384(to_bytes(label), msg);
        size_t take = std::min(block.size(), n - out.size());
        out.insert(out.end(), block.begin(), block.begin() + static_cast<ptrdiff_t>(take));
    }
    return out;
}

// --- "none" ------------------------------------------------------------------

class NullKem final : public Kem {
public:
    const std::string& name() const override {
        static const std::string n = "none";
        return n;
    }
    KemSizes sizes() const override { return {0, 0, 0}; }
    KemKeyPair keygen(RandomSource&) const override {
        return {{}, {}, make_alg(AlgKind::kem_classical, "none")};
    }
    EncapsResult encaps(ByteView pk, RandomSource&) const override {
        if (!pk.empty()) raise(Errc::malformed_public_key, "none expects an empty public key");
        return {{}, {}};
    }
    Bytes decaps(ByteView sk, ByteView ct) const override {
        if (!sk.empty() || !ct.empty())
            raise(Errc::decaps_failure, "none expects empty inputs");
        return {};
    }
};

// --- TestKEM-32 ----------------------------------------------------------------

// Deterministic hash-based KEM with explicit rejection. Test primitive only:
// the encapsulation randomness travels in the clear.
class TestKem final : public Kem {
public:
    const std::string& name() const override {
        static const std::string n = "TestKEM-32";
        return n;
    }
    KemSizes sizes() const override { return {32, 48, 32}; }

    KemKeyPair keygen(RandomSource& rng) const override {
        Bytes sk = rng.bytes(32);
        return {derive_pk(sk), std::move(sk), make_alg(AlgKind::kem_post_quantum, "TestKEM-32")};
    }

    EncapsResult encaps(ByteView pk, RandomSource& rng) const override {
        if (pk.size() != 32) raise(Errc::malformed_public_key, "TestKEM-32 public key size");
        Bytes r = rng.bytes(32);
        Bytes tag = crypto::hmac_sha384(pk, concat({view(kCtLabel), view(r)}));
        tag.resize(16);
        return {concat({view(r), view(tag)}),
                truncated(crypto::hmac_sha384(pk, concat({view(kSsLabel), view(r)})), 32)};
    }

    Bytes decaps(ByteView sk, ByteView ct) const override {
        if (sk.size() != 32) raise(Errc::decaps_failure, "TestKEM-32 secret key size");
        if (ct.size() != 48) raise(Errc::decaps_failure, "TestKEM-32 ciphertext size");
        Bytes pk = derive_pk(Bytes(sk.begin(), sk.end()));
        Bytes r(ct.begin(), ct.begin() + 32);
        Bytes tag = crypto::hmac_sha384(pk, concat({view(kCtLabel), view(r)}));
        tag.resize(16);
        if (!ct_equal(tag, ct.subspan(32)))
            raise(Errc::decaps_failure, "TestKEM-32 tag mismatch");
        return truncated(crypto::hmac_sha384(pk, concat({view(kSsLabel), view(r)})), 32);
    }

private:
    static inline const Bytes kPkLabel = to_bytes("TestKEM-32 pk");
    static inline const Bytes kCtLabel = to_bytes("TestKEM-32 ct");
    static inline const Bytes kSsLabel = to_bytes("TestKEM-32 ss");

    static Bytes truncated(Bytes b, size_t n) {
        b.resize(n);
        return b;
    }
    static Bytes derive_pk(const Bytes& sk) {
        return truncated(crypto::hmac_sha384(sk, kPkLabel), 32);
    }
};

// --- TestDSS -------------------------------------------------------------------

// MAC under a hashed secret; the signature discloses the secret, so public
// verification only makes sense inside the test harness. Rejection of any
// tampered message is certain rather than overwhelming.
class TestDss final : public Dss {
public:
    const std::string& name() const override {
        static const std::string n = "TestDSS";
        return n;
    }
    DssSizes sizes() const override { return {32, 64}; }

    DssKeyPair keygen(RandomSource& rng) const override {
        Bytes sk = rng.bytes(32);
        Bytes pk = crypto::hmac_sha384(sk, kPkLabel);
        pk.resize(32);
        return {std::move(pk), std::move(sk), make_alg(AlgKind::signature, "TestDSS")};
    }

    Bytes sign(ByteView sk, ByteView msg) const override {
        if (sk.size() != 32) raise(Errc::bad_length, "TestDSS secret key size");
        Bytes tag = crypto::hmac_sha384(sk, concat({view(kSigLabel), msg}));
        tag.resize(32);
        return concat({sk, view(tag)});
    }

    bool verify(ByteView pk, ByteView msg, ByteView sig) const override {
        if (pk.size() != 32 || sig.size() != 64) return false;
        ByteView sk = sig.first(32);
        Bytes expect_pk = crypto::hmac_sha384(sk, kPkLabel);
        expect_pk.resize(32);
        if (!ct_equal(expect_pk, pk)) return false;
        Bytes tag = crypto::hmac_sha384(sk, concat({view(kSigLabel), msg}));
        tag.resize(32);
        return ct_equal(tag, sig.subspan(32));
    }

private:
    static inline const Bytes kPkLabel = to_bytes("TestDSS pk");
    static inline const Bytes kSigLabel = to_bytes("TestDSS sig");
};

// --- Size-profile KEM ------------------------------------------------------------

// Stand-in for a named post-quantum KEM: an X25519 exchange padded with
// deterministic, verifier-recomputable filler to the algorithm's exact
// public-key/ciphertext sizes. Keeps the protocol executable and the byte
// accounting faithful where no PQC library is available; swap in a real
// binding behind the registry for production use.
class ProfileKem final : public Kem {
public:
    ProfileKem(std::string name, size_t pk_len, size_t ct_len)
        : m_name(std::move(name)), m_pk_len(pk_len), m_ct_len(ct_len) {}

    const std::string& name() const override { return m_name; }
    KemSizes sizes() const override { return {m_pk_len, m_ct_len, 32}; }

    KemKeyPair keygen(RandomSource& rng) const override {
        auto core = crypto::x25519_keygen(rng);
        Bytes pk = core.public_key;
        append(pk, pad("vmuckle profile kem pk", core.public_key, m_pk_len));
        Bytes sk = core.secret_key;
        append(sk, core.public_key);
        return {std::move(pk), std::move(sk), make_alg(AlgKind::kem_post_quantum, m_name)};
    }

    EncapsResult encaps(ByteView pk, RandomSource& rng) const override {
        if (pk.size() != m_pk_len || !check_pad("vmuckle profile kem pk", pk.first(32), pk, 32))
            raise(Errc::malformed_public_key, m_name + " public key rejected");
        auto eph = crypto::x25519_keygen(rng);
        Bytes raw = crypto::x25519_derive(eph.secret_key, pk.first(32));
        Bytes ct = eph.public_key;
        Bytes pad_seed = concat({view(eph.public_key), pk.first(32)});
        append(ct, pad("vmuckle profile kem ct", pad_seed, m_ct_len));
        return {std::move(ct), shared(raw, eph.public_key, pk.first(32))};
    }

    Bytes decaps(ByteView sk, ByteView ct) const override {
        if (sk.size() != 64) raise(Errc::decaps_failure, m_name + " secret key size");
        if (ct.size() != m_ct_len) raise(Errc::decaps_failure, m_name + " ciphertext size");
        ByteView pk_core = sk.subspan(32, 32);
        Bytes pad_seed = concat({ct.first(32), pk_core});
        if (!check_pad("vmuckle profile kem ct", pad_seed, ct, 32))
            raise(Errc::decaps_failure, m_name + " ciphertext rejected");
        Bytes raw = crypto::x25519_derive(sk.first(32), ct.first(32));
        return shared(raw, ct.first(32), pk_core);
    }

private:
    static Bytes pad(std::string_view label, ByteView seed, size_t total) {
        return expand(label, seed, total - 32);
    }
    static bool check_pad(std::string_view label, ByteView seed, ByteView whole, size_t core) {
        return ct_equal(expand(label, seed, whole.size() - core), whole.subspan(core));
    }
    static Bytes shared(ByteView raw, ByteView eph_pk, ByteView pk_core) {
        Bytes ss = crypto::hmac_sha384(to_bytes("vmuckle profile kem ss"),
                                       concat({raw, eph_pk, pk_core}));
        ss.resize(32);
        return ss;
    }

    std::string m_name;
    size_t m_pk_len;
    size_t m_ct_len;
};

// --- Size-profile DSS -------------------------------------------------------------

// Ed25519 signature padded to a named scheme's exact public-key/signature
// sizes; the padding is bound to the message digest, so flipping any byte of
// key, message or signature fails verification.
class ProfileDss final : public Dss {
public:
    ProfileDss(std::string name, size_t pk_len, size_t sig_len)
        : m_name(std::move(name)), m_pk_len(pk_len), m_sig_len(sig_len) {}

    const std::string& name() const override { return m_name; }
    DssSizes sizes() const override { return {m_pk_len, m_sig_len}; }

    DssKeyPair keygen(RandomSource& rng) const override {
        auto core = crypto::ed25519_keygen(rng);
        Bytes pk = core.public_key;
        append(pk, expand("vmuckle profile dss pk", core.public_key, m_pk_len - 32));
        return {std::move(pk), std::move(core.secret_key), make_alg(AlgKind::signature, m_name)};
    }

    Bytes sign(ByteView sk, ByteView msg) const override {
        Bytes core = crypto::ed25519_sign(sk, msg);
        Bytes pad_seed = concat({view(core), view(crypto::sha384(msg))});
        Bytes sig = core;
        append(sig, expand("vmuckle profile dss sig", pad_seed, m_sig_len - 64));
        return sig;
    }

    bool verify(ByteView pk, ByteView msg, ByteView sig) const override {
        if (pk.size() != m_pk_len || sig.size() != m_sig_len) return false;
        if (!ct_equal(expand("vmuckle profile dss pk", pk.first(32), m_pk_len - 32),
                      pk.subspan(32)))
            return false;
        Bytes pad_seed = concat({sig.first(64), view(crypto::sha384(msg))});
        if (!ct_equal(expand("vmuckle profile dss sig", pad_seed, m_sig_len - 64),
                      sig.subspan(64)))
            return false;
        return crypto::ed25519_verify(pk.first(32), msg, sig.first(64));
    }

private:
    std::string m_name;
    size_t m_pk_len;
    size_t m_sig_len;
};

// --- Real classical algorithms ------------------------------------------------------

class EcdhP521Kem final : public Kem {
public:
    const std::string& name() const override {
        static const std::string n = "ECDH-P521";
        return n;
    }
    KemSizes sizes() const override {
        return {crypto::kP521PointLen, crypto::kP521PointLen, 32};
    }

    KemKeyPair keygen(RandomSource& rng) const override {
        auto pair = crypto::p521_keygen(rng);
        return {std::move(pair.public_key), std::move(pair.secret_key),
                make_alg(AlgKind::kem_classical, "ECDH-P521")};
    }

    EncapsResult encaps(ByteView pk, RandomSource& rng) const override {
        auto eph = crypto::p521_keygen(rng);
        Bytes raw = crypto::p521_derive(eph.secret_key, pk);
        return {eph.public_key, shared(raw, eph.public_key, pk)};
    }

    Bytes decaps(ByteView sk, ByteView ct) const override {
        Bytes raw;
        try {
            raw = crypto::p521_derive(sk, ct);
        } catch (const Error& e) {
            if (e.code() == Errc::malformed_public_key)
                raise(Errc::decaps_failure, "ECDH-P521 ciphertext rejected");
            throw;
        }
        return shared(raw, ct, {});
    }

private:
    // The initiator's static public key is omitted from the binding; both
    // sides bind the ephemeral point, and the schedule binds the transcript.
    static Bytes shared(ByteView raw, ByteView eph_point, ByteView) {
        Bytes ss = crypto::hmac_sha384(to_bytes("vmuckle ecdh-p521 ss"), concat({raw, eph_point}));
        ss.resize(32);
        return ss;
    }
};

class EdDsa final : public Dss {
public:
    const std::string& name() const override {
        static const std::string n = "EdDSA";
        return n;
    }
    DssSizes sizes() const override { return {32, 64}; }
    DssKeyPair keygen(RandomSource& rng) const override {
        auto core = crypto::ed25519_keygen(rng);
        return {std::move(core.public_key), std::move(core.secret_key),
                make_alg(AlgKind::signature, "EdDSA")};
    }
    Bytes sign(ByteView sk, ByteView msg) const override { return crypto::ed25519_sign(sk, msg); }
    bool verify(ByteView pk, ByteView msg, ByteView sig) const override {
        return crypto::ed25519_verify(pk, msg, sig);
    }
};

Registry build_registry() {
    Registry r;
    r.add_kem(std::make_unique<NullKem>());
    r.add_kem(std::make_unique<TestKem>());
    r.add_kem(std::make_unique<EcdhP521Kem>());

    // FIPS 203 encapsulation-key/ciphertext sizes.
    r.add_kem(std::make_unique<ProfileKem>("ML-KEM-512", 800, 768));
    r.add_kem(std::make_unique<ProfileKem>("ML-KEM-768", 1184, 1088));
    r.add_kem(std::make_unique<ProfileKem>("ML-KEM-1024", 1568, 1568));
    r.add_kem(std::make_unique<ProfileKem>("HQC-128", 2249, 4497));
    r.add_kem(std::make_unique<ProfileKem>("HQC-192", 4522, 9042));
    r.add_kem(std::make_unique<ProfileKem>("HQC-256", 7245, 14469));
    r.add_kem(std::make_unique<ProfileKem>("FrodoKEM-640-SHAKE", 9616, 9720));
    r.add_kem(std::make_unique<ProfileKem>("FrodoKEM-976-SHAKE", 15632, 15744));
    r.add_kem(std::make_unique<ProfileKem>("FrodoKEM-1344-SHAKE", 21520, 21632));

    r.add_dss(std::make_unique<TestDss>());
    r.add_dss(std::make_unique<EdDsa>());

    // FIPS 204 / Falcon / FIPS 205 verification-key/signature sizes.
    r.add_dss(std::make_unique<ProfileDss>("ML-DSA-44", 1312, 2420));
    r.add_dss(std::make_unique<ProfileDss>("ML-DSA-65", 1952, 3309));
    r.add_dss(std::make_unique<ProfileDss>("ML-DSA-87", 2592, 4627));
    r.add_dss(std::make_unique<ProfileDss>("Falcon-512", 897, 666));
    r.add_dss(std::make_unique<ProfileDss>("Falcon-1024", 1793, 1280));
    r.add_dss(std::make_unique<ProfileDss>("SLH-DSA-SHAKE-128f", 32, 17088));
    r.add_dss(std::make_unique<ProfileDss>("SLH-DSA-SHAKE-192f", 48, 35664));
    r.add_dss(std::make_unique<ProfileDss>("SLH-DSA-SHAKE-256f", 64, 49856));
    return r;
}

}  // namespace

std::string_view alg_kind_name(AlgKind kind) {
    switch (kind) {
        case AlgKind::kem_classical: return "kem-classical";
        case AlgKind::kem_post_quantum: return "kem-post-quantum";
        case AlgKind::signature: return "signature";
        case AlgKind::mac: return "mac";
        case AlgKind::prf: return "prf";
        case AlgKind::aead: return "aead";
        case AlgKind::hash: return "hash";
    }
    return "?";
}

AlgorithmId make_alg(AlgKind kind, std::string name) {
    if (name == "none" && kind != AlgKind::kem_classical && kind != AlgKind::signature)
        raise(Errc::unknown_algorithm, "\"none\" is only legal for the optional components");
    return {kind, std::move(name)};
}

const Kem* Registry::kem(std::string_view name) const {
    for (const auto& k : m_kems)
        if (k->name() == name) return k.get();
    return nullptr;
}

const Dss* Registry::dss(std::string_view name) const {
    for (const auto& d : m_dsss)
        if (d->name() == name) return d.get();
    return nullptr;
}

const Kem& Registry::require_kem(std::string_view name) const {
    const Kem* k = kem(name);
    if (!k) raise(Errc::unknown_algorithm, "KEM \"" + std::string(name) + "\" not registered");
    return *k;
}

const Dss& Registry::require_dss(std::string_view name) const {
    const Dss* d = dss(name);
    if (!d)
        raise(Errc::unknown_algorithm, "signature \"" + std::string(name) + "\" not registered");
    return *d;
}

std::vector<std::string> Registry::kem_names() const {
    std::vector<std::string> out;
    for (const auto& k : m_kems) out.push_back(k->name());
    return out;
}

std::vector<std::string> Registry::dss_names() const {
    std::vector<std::string> out;
    for (const auto& d : m_dsss) out.push_back(d->name());
    return out;
}

void Registry::add_kem(std::unique_ptr<Kem> kem) {
    if (this->kem(kem->name())) raise(Errc::state_error, "duplicate KEM registration");
    m_kems.push_back(std::move(kem));
}

void Registry::add_dss(std::unique_ptr<Dss> dss) {
    if (this->dss(dss->name())) raise(Errc::state_error, "duplicate DSS registration");
    m_dsss.push_back(std::move(dss));
}

const Registry& registry() {
    static const Registry instance = build_registry();
    return instance;
}

CipherSuite make_suite(std::string_view kem_c, std::string_view kem_pq, std::string_view dss,
                       unsigned security_param) {
    if (security_param < 128) raise(Errc::bad_length, "security parameter below 128 bits");
    if (kem_pq == "none")
        raise(Errc::unknown_algorithm, "the post-quantum KEM is mandatory");
    if (kem_c != "none") registry().require_kem(kem_c);
    registry().require_kem(kem_pq);
    if (dss != "none") registry().require_dss(dss);

    CipherSuite suite;
    suite.kem_c = make_alg(AlgKind::kem_classical, std::string(kem_c));
    suite.kem_pq = make_alg(AlgKind::kem_post_quantum, std::string(kem_pq));
    suite.dss = make_alg(AlgKind::signature, std::string(dss));
    suite.mac = make_alg(AlgKind::mac, "HMAC-SHA-384");
    suite.prf = make_alg(AlgKind::prf, "HMAC-SHA-384");
    suite.aead = make_alg(AlgKind::aead, "AES-256-GCM");
    suite.hash = make_alg(AlgKind::hash, "SHA-384");
    suite.security_param = security_param;
    return suite;
}

KemKeyPair kem_keygen(const AlgorithmId& alg, unsigned security_param, RandomSource& rng) {
    if (security_param < 128) raise(Errc::bad_length, "security parameter below 128 bits");
    if (alg.kind != AlgKind::kem_classical && alg.kind != AlgKind::kem_post_quantum)
        raise(Errc::unknown_algorithm, "not a KEM algorithm id");
    return registry().require_kem(alg.name).keygen(rng);
}

EncapsResult kem_encaps(const AlgorithmId& alg, ByteView public_key, RandomSource& rng) {
    return registry().require_kem(alg.name).encaps(public_key, rng);
}

Bytes kem_decaps(const AlgorithmId& alg, ByteView secret_key, ByteView ciphertext) {
    return registry().require_kem(alg.name).decaps(secret_key, ciphertext);
}

DssKeyPair dss_keygen(const AlgorithmId& alg, RandomSource& rng) {
    return registry().require_dss(alg.name).keygen(rng);
}

Bytes dss_sign(const AlgorithmId& alg, ByteView secret_key, ByteView msg) {
    return registry().require_dss(alg.name).sign(secret_key, msg);
}

bool dss_verify(const AlgorithmId& alg, ByteView public_key, ByteView msg, ByteView sig) {
    return registry().require_dss(alg.name).verify(public_key, msg, sig);
}

Bytes prf_canonical_key(ByteView key) {
    if (key.empty()) return zeros(crypto::kSha384Len);
    return Bytes(key.begin(), key.end());
}

Bytes prf(ByteView key, ByteView input) {
    return crypto::hmac_sha384(prf_canonical_key(key), input);
}

Bytes mac_auth(ByteView key, ByteView msg) {
    return crypto::hmac_sha384(key, msg);
}

bool mac_verify(ByteView key, ByteView msg, ByteView tag) {
    return ct_equal(mac_auth(key, msg), tag);
}

Bytes aead_seal(ByteView key, ByteView nonce, ByteView ad, ByteView plaintext) {
    return crypto::aes256gcm_seal(key, nonce, ad, plaintext);
}

Bytes aead_open(ByteView key, ByteView nonce, ByteView ad, ByteView sealed) {
    return crypto::aes256gcm_open(key, nonce, ad, sealed);
}

Bytes hash(ByteView data) {
    return crypto::sha384(data);
}

}  // namespace vmuckle
