#include "vmuckle/pki.hpp"

#include <fstream>

#include "vmuckle/errors.hpp"

namespace vmuckle::pki {

namespace {

constexpr char kCertMagic[4] = {'V', 'M', 'C', 'T'};
constexpr char kKeyMagic[4] = {'V', 'M', 'S', 'K'};
constexpr uint8_t kVersion = 1;

void append_str(Bytes& out, const std::string& s) {
    append_u24(out, static_cast<uint32_t>(s.size()));
    append(out, view(to_bytes(s)));
}

void append_blob(Bytes& out, ByteView b) {
    append_u24(out, static_cast<uint32_t>(b.size()));
    append(out, b);
}

std::string read_str(ByteReader& reader) {
    return to_string(reader.take_u24_prefixed());
}

Bytes tbs_body(const HybridCertificate& c) {
    Bytes out;
    out.insert(out.end(), kCertMagic, kCertMagic + 4);
    append_u8(out, kVersion);
    append_str(out, c.subject);
    append_str(out, c.issuer);
    append_u64(out, static_cast<uint64_t>(c.validity.not_before));
    append_u64(out, static_cast<uint64_t>(c.validity.not_after));
    append_str(out, c.pq_alg.name);
    append_blob(out, view(c.pq_pk));
    append_str(out, c.cl_alg.name);
    append_blob(out, view(c.cl_pk));
    return out;
}

bool both_signatures_valid(const HybridCertificate& cert, const HybridCertificate& issuer) {
    const Bytes tbs = cert.to_be_signed();
    try {
        return dss_verify(issuer.pq_alg, view(issuer.pq_pk), view(tbs), view(cert.sig_pq)) &&
               dss_verify(issuer.cl_alg, view(issuer.cl_pk), view(tbs), view(cert.sig_cl));
    } catch (const Error&) {
        return false;  // unregistered algorithm name in a received certificate
    }
}

ChainResult link_result(const HybridCertificate& cert, const HybridCertificate& issuer,
                        int64_t now) {
    if (cert.sig_pq.empty() || cert.sig_cl.empty())
        return {false, ChainStatus::missing_signature};
    if (now < cert.validity.not_before) return {false, ChainStatus::not_yet_valid};
    if (now > cert.validity.not_after) return {false, ChainStatus::expired};
    if (cert.issuer != issuer.subject) return {false, ChainStatus::bad_linkage};
    if (!both_signatures_valid(cert, issuer)) return {false, ChainStatus::bad_signature};
    return {true, ChainStatus::ok};
}

Bytes read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::io_error, "cannot open " + path);
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, ByteView data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(Errc::io_error, "cannot write " + path);
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
}

}  // namespace

std::string_view chain_status_name(ChainStatus s) {
    switch (s) {
        case ChainStatus::ok: return "ok";
        case ChainStatus::expired: return "expired";
        case ChainStatus::not_yet_valid: return "not-yet-valid";
        case ChainStatus::missing_signature: return "missing-signature";
        case ChainStatus::bad_signature: return "bad-signature";
        case ChainStatus::bad_linkage: return "bad-linkage";
        case ChainStatus::anchor_mismatch: return "anchor-mismatch";
    }
    return "?";
}

Bytes HybridCertificate::to_be_signed() const {
    return tbs_body(*this);
}

Bytes HybridCertificate::encode() const {
    Bytes out = tbs_body(*this);
    append_blob(out, view(sig_pq));
    append_blob(out, view(sig_cl));
    return out;
}

HybridCertificate HybridCertificate::decode(ByteView data) {
    ByteReader reader(data, Errc::cert_invalid);
    Bytes magic = reader.take(4);
    if (!std::equal(magic.begin(), magic.end(), kCertMagic))
        raise(Errc::cert_invalid, "bad certificate magic");
    if (reader.u8() != kVersion) raise(Errc::cert_invalid, "unsupported certificate version");

    HybridCertificate c;
    c.subject = read_str(reader);
    c.issuer = read_str(reader);
    c.validity.not_before = static_cast<int64_t>(reader.u64());
    c.validity.not_after = static_cast<int64_t>(reader.u64());
    c.pq_alg = make_alg(AlgKind::signature, read_str(reader));
    c.pq_pk = reader.take_u24_prefixed();
    c.cl_alg = make_alg(AlgKind::signature, read_str(reader));
    c.cl_pk = reader.take_u24_prefixed();
    c.sig_pq = reader.take_u24_prefixed();
    c.sig_cl = reader.take_u24_prefixed();
    reader.expect_end();
    return c;
}

CaKeys make_ca_keys(const std::string& name, const AlgorithmId& pq_alg, const AlgorithmId& cl_alg,
                    RandomSource& rng) {
    CaKeys ca;
    ca.name = name;
    ca.pq_alg = pq_alg;
    ca.cl_alg = cl_alg;
    auto pq = dss_keygen(pq_alg, rng);
    ca.pq_pk = std::move(pq.public_key);
    ca.pq_sk = std::move(pq.secret_key);
    auto cl = dss_keygen(cl_alg, rng);
    ca.cl_pk = std::move(cl.public_key);
    ca.cl_sk = std::move(cl.secret_key);
    return ca;
}

HybridCertificate issue(const CaKeys& ca, const SubjectKeys& subject, Validity validity) {
    if (ca.pq_sk.empty() || ca.cl_sk.empty())
        raise(Errc::missing_key, "hybrid issuance needs both CA signing keys");
    HybridCertificate cert;
    cert.subject = subject.name;
    cert.issuer = ca.name;
    cert.validity = validity;
    cert.pq_alg = subject.pq_alg;
    cert.pq_pk = subject.pq_pk;
    cert.cl_alg = subject.cl_alg;
    cert.cl_pk = subject.cl_pk;
    const Bytes tbs = cert.to_be_signed();
    cert.sig_pq = dss_sign(ca.pq_alg, view(ca.pq_sk), view(tbs));
    cert.sig_cl = dss_sign(ca.cl_alg, view(ca.cl_sk), view(tbs));
    return cert;
}

HybridCertificate self_issue(const CaKeys& ca, Validity validity) {
    SubjectKeys self{ca.name, ca.pq_alg, ca.pq_pk, ca.cl_alg, ca.cl_pk};
    return issue(ca, self, validity);
}

ChainResult verify_chain(const CertChain& chain, const HybridCertificate& trust_anchor,
                         int64_t now) {
    if (chain.root.encode() != trust_anchor.encode())
        return {false, ChainStatus::anchor_mismatch};
    ChainResult r = link_result(chain.root, chain.root, now);  // self-signed
    if (!r.ok) return r;
    r = link_result(chain.intermediate, chain.root, now);
    if (!r.ok) return r;
    return link_result(chain.leaf, chain.intermediate, now);
}

Bytes encode_presented_chain(const HybridCertificate& leaf,
                             const HybridCertificate& intermediate) {
    Bytes out;
    append_u8(out, 2);
    Bytes leaf_bytes = leaf.encode();
    append_u24(out, static_cast<uint32_t>(leaf_bytes.size()));
    append(out, view(leaf_bytes));
    Bytes mid_bytes = intermediate.encode();
    append_u24(out, static_cast<uint32_t>(mid_bytes.size()));
    append(out, view(mid_bytes));
    return out;
}

std::pair<HybridCertificate, HybridCertificate> decode_presented_chain(ByteView data) {
    ByteReader reader(data, Errc::cert_invalid);
    if (reader.u8() != 2) raise(Errc::cert_invalid, "presented chain must hold 2 certificates");
    Bytes leaf = reader.take_u24_prefixed();
    Bytes mid = reader.take_u24_prefixed();
    reader.expect_end();
    return {HybridCertificate::decode(view(leaf)), HybridCertificate::decode(view(mid))};
}

void save_certificate(const std::string& path, const HybridCertificate& cert) {
    write_file(path, view(cert.encode()));
}

HybridCertificate load_certificate(const std::string& path) {
    Bytes data = read_file(path);
    return HybridCertificate::decode(view(data));
}

void save_key(const std::string& path, const KeyFile& key) {
    Bytes out;
    out.insert(out.end(), kKeyMagic, kKeyMagic + 4);
    append_u8(out, kVersion);
    append_str(out, key.alg.name);
    append_blob(out, view(key.public_key));
    append_blob(out, view(key.secret_key));
    write_file(path, view(out));
}

KeyFile load_key(const std::string& path) {
    Bytes data = read_file(path);
    ByteReader reader(view(data), Errc::io_error);
    Bytes magic = reader.take(4);
    if (!std::equal(magic.begin(), magic.end(), kKeyMagic))
        raise(Errc::io_error, "bad key-file magic in " + path);
    if (reader.u8() != kVersion) raise(Errc::io_error, "unsupported key-file version");
    KeyFile key;
    key.alg = make_alg(AlgKind::signature, read_str(reader));
    key.public_key = reader.take_u24_prefixed();
    key.secret_key = reader.take_u24_prefixed();
    reader.expect_end();
    return key;
}

}  // namespace vmuckle::pki
