#include <doctest.h>

#include <cstdio>

#include "test_util.hpp"
#include "vmuckle/pki.hpp"

using namespace vmuckle;
using namespace testutil;

namespace {

struct Hierarchy {
    pki::CaKeys root, ica;
    pki::HybridCertificate root_cert, ica_cert, leaf;
    DssKeyPair leaf_keys;
};

Hierarchy build(const std::string& pq_name, uint64_t seed = 11,
                pki::Validity validity = {0, 4102444800}) {
    DeterministicRandom rng(seed);
    const AlgorithmId pq = make_alg(AlgKind::signature, pq_name);
    const AlgorithmId cl = make_alg(AlgKind::signature, "EdDSA");
    Hierarchy h;
    h.root = pki::make_ca_keys("root", pq, cl, rng);
    h.root_cert = pki::self_issue(h.root, validity);
    h.ica = pki::make_ca_keys("ica", pq, cl, rng);
    h.ica_cert = issue(h.root, {"ica", h.ica.pq_alg, h.ica.pq_pk, h.ica.cl_alg, h.ica.cl_pk},
                       validity);
    h.leaf_keys = dss_keygen(pq, rng);
    DssKeyPair cl_leaf = dss_keygen(cl, rng);
    h.leaf = issue(h.ica, {"leaf", pq, h.leaf_keys.public_key, cl, cl_leaf.public_key}, validity);
    return h;
}

}  // namespace

TEST_CASE("self-issued root verifies under its own keys") {
    Hierarchy h = build("TestDSS");
    pki::CertChain chain{h.root_cert, h.root_cert, h.root_cert};
    // Degenerate chain of the root against itself.
    auto r = pki::verify_chain(chain, h.root_cert, 1000);
    CHECK(r.ok);
}

TEST_CASE("three-level chain verifies for every registered signature scheme") {
    for (const auto& pq : registry().dss_names()) {
        if (pq == "none") continue;
        CAPTURE(pq);
        Hierarchy h = build(pq);
        pki::CertChain chain{h.leaf, h.ica_cert, h.root_cert};
        auto r = pki::verify_chain(chain, h.root_cert, 1000);
        CHECK(r.ok);
    }
}

TEST_CASE("expired intermediate fails with the expired reason") {
    Hierarchy h = build("TestDSS");
    h.ica_cert = issue(h.root, {"ica", h.ica.pq_alg, h.ica.pq_pk, h.ica.cl_alg, h.ica.cl_pk},
                       {0, 500});
    pki::CertChain chain{h.leaf, h.ica_cert, h.root_cert};
    auto r = pki::verify_chain(chain, h.root_cert, 1000);
    CHECK_FALSE(r.ok);
    CHECK(r.reason == pki::ChainStatus::expired);
}

TEST_CASE("stripping one signature fails closed") {
    Hierarchy h = build("TestDSS");
    h.leaf.sig_cl.clear();
    pki::CertChain chain{h.leaf, h.ica_cert, h.root_cert};
    auto r = pki::verify_chain(chain, h.root_cert, 1000);
    CHECK_FALSE(r.ok);
    CHECK(r.reason == pki::ChainStatus::missing_signature);
}

TEST_CASE("tampering any to-be-signed byte flips verification") {
    Hierarchy h = build("TestDSS");
    h.leaf.subject = "Leaf";  // changes raw_tbs
    pki::CertChain chain{h.leaf, h.ica_cert, h.root_cert};
    auto r = pki::verify_chain(chain, h.root_cert, 1000);
    CHECK_FALSE(r.ok);
    CHECK(r.reason == pki::ChainStatus::bad_signature);
}

TEST_CASE("root must equal the trust anchor byte-exactly") {
    Hierarchy h = build("TestDSS");
    Hierarchy other = build("TestDSS", 999);
    pki::CertChain chain{h.leaf, h.ica_cert, h.root_cert};
    auto r = pki::verify_chain(chain, other.root_cert, 1000);
    CHECK_FALSE(r.ok);
    CHECK(r.reason == pki::ChainStatus::anchor_mismatch);
}

TEST_CASE("broken linkage is reported") {
    Hierarchy h = build("TestDSS");
    Hierarchy other = build("TestDSS", 1234);
    pki::CertChain chain{h.leaf, other.ica_cert, other.root_cert};
    auto r = pki::verify_chain(chain, other.root_cert, 1000);
    CHECK_FALSE(r.ok);
}

TEST_CASE("issuing without both CA keys is refused") {
    Hierarchy h = build("TestDSS");
    pki::CaKeys crippled = h.ica;
    crippled.cl_sk.clear();
    CHECK_THROWS_AS(
        issue(crippled, {"x", h.ica.pq_alg, h.ica.pq_pk, h.ica.cl_alg, h.ica.cl_pk}, {0, 10}),
        Error);
}

TEST_CASE("certificate encoding round-trips") {
    Hierarchy h = build("TestDSS");
    Bytes encoded = h.leaf.encode();
    CHECK(pki::HybridCertificate::decode(view(encoded)) == h.leaf);

    Bytes truncated(encoded.begin(), encoded.end() - 3);
    CHECK_THROWS_AS(pki::HybridCertificate::decode(view(truncated)), Error);
}

TEST_CASE("presented chain carries leaf and intermediate") {
    Hierarchy h = build("TestDSS");
    Bytes wireform = pki::encode_presented_chain(h.leaf, h.ica_cert);
    auto [leaf, mid] = pki::decode_presented_chain(view(wireform));
    CHECK(leaf == h.leaf);
    CHECK(mid == h.ica_cert);
}

TEST_CASE("key and certificate files round-trip") {
    Hierarchy h = build("TestDSS");
    const std::string cert_path = data_path("") + "../tmp_cert.bin";
    const std::string key_path = data_path("") + "../tmp_key.bin";
    pki::save_certificate(cert_path, h.leaf);
    CHECK(pki::load_certificate(cert_path) == h.leaf);

    pki::KeyFile kf{make_alg(AlgKind::signature, "TestDSS"), h.leaf_keys.public_key,
                    h.leaf_keys.secret_key};
    pki::save_key(key_path, kf);
    pki::KeyFile loaded = pki::load_key(key_path);
    CHECK(loaded.alg == kf.alg);
    CHECK(loaded.public_key == kf.public_key);
    CHECK(loaded.secret_key == kf.secret_key);
    std::remove(cert_path.c_str());
    std::remove(key_path.c_str());
}
