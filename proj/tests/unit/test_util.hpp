#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "vmuckle/handshake.hpp"
#include "vmuckle/pki.hpp"
#include "vmuckle/qkd.hpp"
#include "vmuckle/rng.hpp"

#ifndef VMUCKLE_TEST_DATA_DIR
#define VMUCKLE_TEST_DATA_DIR "tests/data"
#endif

namespace testutil {

using namespace vmuckle;

inline std::string data_path(const std::string& name) {
    return std::string(VMUCKLE_TEST_DATA_DIR) + "/" + name;
}

inline std::vector<std::vector<std::string>> read_kat_lines(const std::string& name) {
    std::ifstream in(data_path(name));
    REQUIRE(in.good());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::vector<std::string> row;
        std::string tok;
        while (ss >> tok) row.push_back(tok);
        if (!row.empty()) rows.push_back(std::move(row));
    }
    return rows;
}

inline std::map<std::string, Bytes> read_named_kat(const std::string& name) {
    std::map<std::string, Bytes> out;
    for (const auto& row : read_kat_lines(name)) {
        REQUIRE(row.size() == 2);
        out[row[0]] = from_hex(row[1]);
    }
    return out;
}

inline Bytes kat_hex(const std::string& field) {
    return field == "-" ? Bytes{} : from_hex(field);
}

/// Hands out a fixed byte string, then keeps producing a repeating pattern.
class FixedRandom final : public RandomSource {
public:
    explicit FixedRandom(Bytes data) : m_data(std::move(data)) {}
    void fill(std::span<uint8_t> out) override {
        for (auto& b : out) b = m_pos < m_data.size() ? m_data[m_pos++] : 0xA5;
    }

private:
    Bytes m_data;
    size_t m_pos = 0;
};

struct PartyMaterial {
    std::vector<pki::HybridCertificate> chain;
    Bytes sign_key;
};

struct HandshakeFixture {
    CipherSuite suite;
    Bytes psk;
    PartyMaterial init, resp;
    pki::HybridCertificate anchor;
    std::shared_ptr<qkd::Provider> qkd;
};

inline HandshakeFixture make_fixture(const std::string& kem_c, const std::string& kem_pq,
                                     const std::string& dss, uint64_t seed = 7) {
    HandshakeFixture fx;
    fx.suite = make_suite(kem_c, kem_pq, dss);
    DeterministicRandom rng(seed);
    fx.psk = rng.bytes(32);

    const pki::Validity validity{0, 4102444800};
    const AlgorithmId cl = make_alg(AlgKind::signature, "EdDSA");
    const AlgorithmId leaf_alg =
        dss == "none" ? make_alg(AlgKind::signature, "TestDSS") : fx.suite.dss;
    pki::CaKeys root = pki::make_ca_keys("test-root", leaf_alg, cl, rng);
    fx.anchor = pki::self_issue(root, validity);
    pki::CaKeys ica = pki::make_ca_keys("test-ica", leaf_alg, cl, rng);
    pki::HybridCertificate ica_cert =
        issue(root, {ica.name, ica.pq_alg, ica.pq_pk, ica.cl_alg, ica.cl_pk}, validity);

    for (const char* who : {"init", "resp"}) {
        DssKeyPair sig = dss_keygen(leaf_alg, rng);
        DssKeyPair cl_sig = dss_keygen(cl, rng);
        pki::HybridCertificate leaf =
            issue(ica, {who, leaf_alg, sig.public_key, cl, cl_sig.public_key}, validity);
        PartyMaterial& pm = std::string(who) == "init" ? fx.init : fx.resp;
        pm.chain = {leaf, ica_cert};
        pm.sign_key = sig.secret_key;
    }

    Bytes qseed = to_bytes("fixture-qkd-seed");
    append_u64(qseed, seed);
    fx.qkd = std::make_shared<qkd::Simulator>(view(qseed));
    return fx;
}

inline handshake::SessionConfig session_config(const HandshakeFixture& fx, handshake::Role role,
                                               handshake::AuthMode mode,
                                               unsigned max_stages = 0) {
    using handshake::Role;
    handshake::SessionConfig sc;
    sc.suite = fx.suite;
    sc.role = role;
    sc.local_id = role == Role::initiator ? "init" : "resp";
    sc.peer_id = role == Role::initiator ? "resp" : "init";
    sc.auth.mode = mode;
    if (mode != handshake::AuthMode::cert) sc.auth.psk = fx.psk;
    if (mode != handshake::AuthMode::psk) {
        const PartyMaterial& pm = role == Role::initiator ? fx.init : fx.resp;
        sc.auth.local_chain = pm.chain;
        sc.auth.local_sign_key = pm.sign_key;
        sc.auth.trust_anchor = fx.anchor;
    }
    sc.qkd_provider = fx.qkd;
    sc.qkd_stream_id = "test-stream";
    sc.max_stages = max_stages;
    return sc;
}

struct SessionPair {
    handshake::Session initiator;
    handshake::Session responder;
};

inline SessionPair make_sessions(const HandshakeFixture& fx, handshake::AuthMode mode,
                                 uint64_t seed = 99, unsigned max_stages = 0) {
    SessionPair pair{
        handshake::Session(session_config(fx, handshake::Role::initiator, mode, max_stages)),
        handshake::Session(session_config(fx, handshake::Role::responder, mode, max_stages))};
    pair.initiator.set_random_source(std::make_shared<DeterministicRandom>(seed * 2 + 1));
    pair.responder.set_random_source(std::make_shared<DeterministicRandom>(seed * 2 + 2));
    return pair;
}

}  // namespace testutil
