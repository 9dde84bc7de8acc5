#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vmuckle/bytes.hpp"
#include "vmuckle/crypto.hpp"
#include "vmuckle/rng.hpp"

namespace vmuckle {

enum class AlgKind {
    kem_classical,
    kem_post_quantum,
    signature,
    mac,
    prf,
    aead,
    hash,
};

std::string_view alg_kind_name(AlgKind kind);

/// Identifies one registered algorithm. "none" is legal only for the
/// optional components (classical KEM, signature).
struct AlgorithmId {
    AlgKind kind;
    std::string name;

    bool is_none() const { return name == "none"; }
    bool operator==(const AlgorithmId&) const = default;
};

AlgorithmId make_alg(AlgKind kind, std::string name);

struct KemSizes {
    size_t public_key = 0;
    size_t ciphertext = 0;
    size_t shared_secret = 0;
};

struct DssSizes {
    size_t public_key = 0;
    size_t signature = 0;
};

struct KemKeyPair {
    Bytes public_key;
    Bytes secret_key;
    AlgorithmId algorithm;
};

struct EncapsResult {
    Bytes ciphertext;
    Bytes shared_secret;
};

/// Key-encapsulation mechanism interface: keygen / encaps / decaps with the
/// usual correctness contract (decaps of an honest encapsulation returns the
/// encapsulated secret; malformed ciphertexts raise decaps_failure).
class Kem {
public:
    virtual ~Kem() = default;
    virtual const std::string& name() const = 0;
    virtual KemSizes sizes() const = 0;
    virtual KemKeyPair keygen(RandomSource& rng) const = 0;
    virtual EncapsResult encaps(ByteView public_key, RandomSource& rng) const = 0;
    virtual Bytes decaps(ByteView secret_key, ByteView ciphertext) const = 0;
};

struct DssKeyPair {
    Bytes public_key;
    Bytes secret_key;
    AlgorithmId algorithm;
};

/// Signature scheme interface. verify returns false on bad signatures
/// rather than raising.
class Dss {
public:
    virtual ~Dss() = default;
    virtual const std::string& name() const = 0;
    virtual DssSizes sizes() const = 0;
    virtual DssKeyPair keygen(RandomSource& rng) const = 0;
    virtual Bytes sign(ByteView secret_key, ByteView msg) const = 0;
    virtual bool verify(ByteView public_key, ByteView msg, ByteView sig) const = 0;
};

/// Registry of concrete algorithm bindings, queryable by the exact names
/// used in the project docs (e.g. "ML-KEM-768", "Falcon-512", "ECDH-P521").
class Registry {
public:
    const Kem* kem(std::string_view name) const;        // nullptr if unknown
    const Dss* dss(std::string_view name) const;
    const Kem& require_kem(std::string_view name) const;  // raises unknown_algorithm
    const Dss& require_dss(std::string_view name) const;

    bool has_kem(std::string_view name) const { return kem(name) != nullptr; }
    bool has_dss(std::string_view name) const { return dss(name) != nullptr; }

    std::vector<std::string> kem_names() const;
    std::vector<std::string> dss_names() const;

    void add_kem(std::unique_ptr<Kem> kem);
    void add_dss(std::unique_ptr<Dss> dss);

private:
    std::vector<std::unique_ptr<Kem>> m_kems;
    std::vector<std::unique_ptr<Dss>> m_dsss;
};

/// Process-wide registry with all built-in algorithms installed.
const Registry& registry();

/// Selected algorithms for one protocol run. The post-quantum KEM is
/// mandatory; the classical KEM and the signature scheme may be "none".
struct CipherSuite {
    AlgorithmId kem_c;
    AlgorithmId kem_pq;
    AlgorithmId dss;
    AlgorithmId mac;
    AlgorithmId prf;
    AlgorithmId aead;
    AlgorithmId hash;
    unsigned security_param = 256;  // λ in bits

    size_t hash_len() const { return crypto::kSha384Len; }
    size_t aead_key_len() const { return crypto::kGcmKeyLen; }
    size_t nonce_len() const { return security_param / 8; }
};

/// Builds a validated suite with the fixed symmetric stack
/// (SHA-384 / HMAC-SHA-384 / AES-256-GCM).
CipherSuite make_suite(std::string_view kem_c, std::string_view kem_pq, std::string_view dss,
                       unsigned security_param = 256);

// --- Suite-level operations -------------------------------------------------

/// "none" yields an empty key pair; unknown names raise unknown_algorithm.
KemKeyPair kem_keygen(const AlgorithmId& alg, unsigned security_param, RandomSource& rng);
EncapsResult kem_encaps(const AlgorithmId& alg, ByteView public_key, RandomSource& rng);
Bytes kem_decaps(const AlgorithmId& alg, ByteView secret_key, ByteView ciphertext);

DssKeyPair dss_keygen(const AlgorithmId& alg, RandomSource& rng);
Bytes dss_sign(const AlgorithmId& alg, ByteView secret_key, ByteView msg);
bool dss_verify(const AlgorithmId& alg, ByteView public_key, ByteView msg, ByteView sig);

/// Canonical key encoding for the PRF: the empty string (⊥ secure state,
/// absent psk, absent classical share) maps to an all-zero key of hash
/// length, so every PRF call sees a fixed-length key.
Bytes prf_canonical_key(ByteView key);

/// F(key, input) = HMAC-SHA-384(canonical(key), input). 48-byte output.
Bytes prf(ByteView key, ByteView input);

Bytes mac_auth(ByteView key, ByteView msg);
bool mac_verify(ByteView key, ByteView msg, ByteView tag);

/// AEAD under the suite's fixed AES-256-GCM.
Bytes aead_seal(ByteView key, ByteView nonce, ByteView ad, ByteView plaintext);
Bytes aead_open(ByteView key, ByteView nonce, ByteView ad, ByteView sealed);

Bytes hash(ByteView data);  // suite hash (SHA-384)

}  // namespace vmuckle
