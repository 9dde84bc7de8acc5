#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vmuckle/bytes.hpp"
#include "vmuckle/rng.hpp"
#include "vmuckle/suite.hpp"

// Minimal hybrid certificate infrastructure: a two-layer hierarchy (root CA,
// intermediate CA, leaves) where every certificate carries both a
// post-quantum-slot and a classical-slot public key and every issuer signs
// with both of its keys. The encoding is a custom TLV (docs/wire-format.md),
// not X.509, so transmitted sizes stay attributable.
namespace vmuckle::pki {

struct Validity {
    int64_t not_before = 0;  // seconds since epoch
    int64_t not_after = 0;
    bool operator==(const Validity&) const = default;
};

struct HybridCertificate {
    std::string subject;
    std::string issuer;
    Validity validity;
    AlgorithmId pq_alg;  // subject's primary (handshake) verification key
    Bytes pq_pk;
    AlgorithmId cl_alg;  // subject's classical co-signing key
    Bytes cl_pk;
    Bytes sig_pq;  // issuer signatures over to_be_signed()
    Bytes sig_cl;

    Bytes to_be_signed() const;
    Bytes encode() const;
    static HybridCertificate decode(ByteView data);

    bool operator==(const HybridCertificate&) const = default;
};

/// leaf issued by intermediate, intermediate issued by root, root self-signed.
struct CertChain {
    HybridCertificate leaf;
    HybridCertificate intermediate;
    HybridCertificate root;
};

struct CaKeys {
    std::string name;
    AlgorithmId pq_alg;
    Bytes pq_pk, pq_sk;
    AlgorithmId cl_alg;
    Bytes cl_pk, cl_sk;
};

struct SubjectKeys {
    std::string name;
    AlgorithmId pq_alg;
    Bytes pq_pk;
    AlgorithmId cl_alg;
    Bytes cl_pk;
};

/// Generates both key pairs for a CA.
CaKeys make_ca_keys(const std::string& name, const AlgorithmId& pq_alg, const AlgorithmId& cl_alg,
                    RandomSource& rng);

/// Dual-signature issuance; raises missing_key unless the CA holds both
/// signing keys.
HybridCertificate issue(const CaKeys& ca, const SubjectKeys& subject, Validity validity);

/// Self-issued root certificate for a CA.
HybridCertificate self_issue(const CaKeys& ca, Validity validity);

enum class ChainStatus {
    ok,
    expired,
    not_yet_valid,
    missing_signature,
    bad_signature,
    bad_linkage,
    anchor_mismatch,
};

std::string_view chain_status_name(ChainStatus s);

struct ChainResult {
    bool ok = false;
    ChainStatus reason = ChainStatus::ok;
};

/// True iff every link verifies under BOTH issuer signatures, every validity
/// window contains `now`, issuer/subject linkage holds and the root equals
/// the trust anchor byte-exactly.
ChainResult verify_chain(const CertChain& chain, const HybridCertificate& trust_anchor,
                         int64_t now);

/// Wire form presented during the handshake: leaf + intermediate only (the
/// verifier completes the chain with its own trust anchor).
Bytes encode_presented_chain(const HybridCertificate& leaf, const HybridCertificate& intermediate);
std::pair<HybridCertificate, HybridCertificate> decode_presented_chain(ByteView data);

// --- File formats for the CLI (4-byte magic + TLV) ---------------------------

void save_certificate(const std::string& path, const HybridCertificate& cert);
HybridCertificate load_certificate(const std::string& path);

struct KeyFile {
    AlgorithmId alg;
    Bytes public_key;
    Bytes secret_key;
};
void save_key(const std::string& path, const KeyFile& key);
KeyFile load_key(const std::string& path);

}  // namespace vmuckle::pki
