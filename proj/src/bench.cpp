#include "vmuckle/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <sstream>
#include <thread>

#include "vmuckle/errors.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <x86intrin.h>
#define VMUCKLE_HAVE_RDTSC 1
#endif

namespace vmuckle::bench {

using handshake::AuthMode;
using handshake::Role;
using handshake::Session;

namespace {

struct TestPki {
    std::vector<pki::HybridCertificate> init_chain, resp_chain;
    Bytes init_key, resp_key;
    pki::HybridCertificate anchor;
};

// Hybrid hierarchy matching the measured setup: CAs sign with ML-DSA-87 and
// EdDSA; leaves carry the benchmarked scheme plus an EdDSA key.
TestPki build_pki(const AlgorithmId& leaf_dss, RandomSource& rng) {
    const AlgorithmId ca_pq = make_alg(AlgKind::signature, "ML-DSA-87");
    const AlgorithmId cl = make_alg(AlgKind::signature, "EdDSA");
    const pki::Validity validity{0, 4102444800};

    pki::CaKeys root = pki::make_ca_keys("bench-root", ca_pq, cl, rng);
    pki::HybridCertificate root_cert = pki::self_issue(root, validity);
    pki::CaKeys ica = pki::make_ca_keys("bench-ica", ca_pq, cl, rng);
    pki::HybridCertificate ica_cert =
        issue(root, {ica.name, ica.pq_alg, ica.pq_pk, ica.cl_alg, ica.cl_pk}, validity);

    TestPki out;
    out.anchor = root_cert;
    for (const char* who : {"init", "resp"}) {
        DssKeyPair sig = dss_keygen(leaf_dss, rng);
        DssKeyPair cl_sig = dss_keygen(cl, rng);
        pki::HybridCertificate leaf =
            issue(ica, {who, leaf_dss, sig.public_key, cl, cl_sig.public_key}, validity);
        if (std::string(who) == "init") {
            out.init_chain = {leaf, ica_cert};
            out.init_key = sig.secret_key;
        } else {
            out.resp_chain = {leaf, ica_cert};
            out.resp_key = sig.secret_key;
        }
    }
    return out;
}

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

uint64_t cycle_counter(bool& measured) {
#ifdef VMUCKLE_HAVE_RDTSC
    measured = true;
    return __rdtsc();
#else
    measured = false;
    return static_cast<uint64_t>(now_ms() * 1e6);  // wall-time proxy at ~1 GHz
#endif
}

}  // namespace

BenchRecord measure_suite(const std::string& kem_c, const std::string& kem_pq,
                          const std::string& sig, AuthMode mode, int repetitions, uint64_t seed) {
    BenchRecord rec;
    rec.kem_pq = kem_pq;
    rec.kem_c = kem_c;
    rec.sig = mode == AuthMode::psk ? "PSK" : sig;
    rec.mode = mode;

    try {
        CipherSuite suite =
            make_suite(kem_c, kem_pq, mode == AuthMode::psk ? "none" : sig);

        DeterministicRandom setup_rng(seed);
        std::optional<TestPki> pki_material;
        if (mode != AuthMode::psk) pki_material = build_pki(suite.dss, setup_rng);
        Bytes psk = setup_rng.bytes(32);

        std::vector<double> walls;
        std::vector<double> cycles;
        for (int rep = 0; rep < std::max(repetitions, 1); rep++) {
            auto make_config = [&](Role role) {
                handshake::SessionConfig sc;
                sc.suite = suite;
                sc.role = role;
                sc.local_id = role == Role::initiator ? "init" : "resp";
                sc.peer_id = role == Role::initiator ? "resp" : "init";
                sc.auth.mode = mode;
                if (mode != AuthMode::cert) sc.auth.psk = psk;
                if (mode != AuthMode::psk) {
                    sc.auth.local_chain = role == Role::initiator ? pki_material->init_chain
                                                                  : pki_material->resp_chain;
                    sc.auth.local_sign_key =
                        role == Role::initiator ? pki_material->init_key : pki_material->resp_key;
                    sc.auth.trust_anchor = pki_material->anchor;
                }
                sc.qkd_stream_id = "bench";
                return sc;
            };

            Bytes qkd_seed = to_bytes("bench-qkd-");
            append_u64(qkd_seed, seed);
            auto provider = std::make_shared<qkd::Simulator>(view(qkd_seed));

            auto init_cfg = make_config(Role::initiator);
            auto resp_cfg = make_config(Role::responder);
            init_cfg.qkd_provider = provider;
            resp_cfg.qkd_provider = provider;
            Session initiator(std::move(init_cfg));
            Session responder(std::move(resp_cfg));
            Bytes rep_seed;
            append_u64(rep_seed, seed);
            append_u32(rep_seed, static_cast<uint32_t>(rep));
            initiator.set_random_source(std::make_shared<DeterministicRandom>(
                view(concat({view(rep_seed), view(to_bytes("i"))}))));
            responder.set_random_source(std::make_shared<DeterministicRandom>(
                view(concat({view(rep_seed), view(to_bytes("r"))}))));

            bool measured = false;
            const double w0 = now_ms();
            const uint64_t c0 = cycle_counter(measured);
            auto result = handshake::run_stage(initiator, responder);
            const uint64_t c1 = cycle_counter(measured);
            const double w1 = now_ms();
            if (!result.ok) {
                rec.error = "handshake did not accept";
                return rec;
            }
            rec.bytes_initiator = result.stats.bytes_initiator_sent;
            rec.bytes_responder = result.stats.bytes_responder_sent;
            rec.bytes_total = result.stats.total();
            rec.cycles_measured = measured;
            walls.push_back(w1 - w0);
            cycles.push_back(static_cast<double>(c1 - c0) / 1e9);
        }
        std::sort(walls.begin(), walls.end());
        std::sort(cycles.begin(), cycles.end());
        rec.wall_ms = walls[walls.size() / 2];
        rec.giga_cycles = cycles[cycles.size() / 2];
        rec.ok = true;
    } catch (const Error& e) {
        rec.error = e.what();
    }
    return rec;
}

std::vector<BenchRecord> bench_matrix(const std::vector<std::string>& kems_pq,
                                      const std::vector<std::string>& sigs,
                                      const std::vector<AuthMode>& auth_modes, int repetitions,
                                      uint64_t seed, const std::string& kem_c, unsigned parallel) {
    const bool want_psk =
        std::find(auth_modes.begin(), auth_modes.end(), AuthMode::psk) != auth_modes.end();
    std::vector<AuthMode> cert_modes;
    for (AuthMode m : auth_modes)
        if (m != AuthMode::psk) cert_modes.push_back(m);

    struct Cell {
        std::string sig;
        AuthMode mode;
        std::string kem;
    };
    std::vector<Cell> cells;
    for (const std::string& kem : kems_pq) {
        if (want_psk) cells.push_back({"", AuthMode::psk, kem});
        for (const std::string& sig : sigs)
            for (AuthMode m : cert_modes) cells.push_back({sig, m, kem});
    }

    std::vector<BenchRecord> records(cells.size());
    auto run_cell = [&](size_t i) {
        records[i] = measure_suite(kem_c, cells[i].kem, cells[i].sig, cells[i].mode, repetitions,
                                   seed);
    };
    if (parallel <= 1) {
        for (size_t i = 0; i < cells.size(); i++) run_cell(i);
        return records;
    }

    std::atomic<size_t> next{0};
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < parallel; w++)
        workers.emplace_back([&] {
            for (size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1))
                run_cell(i);
        });
    for (auto& worker : workers) worker.join();
    for (auto& rec : records) {  // contended timing is meaningless
        rec.wall_ms = 0.0;
        rec.giga_cycles = 0.0;
        rec.cycles_measured = false;
    }
    return records;
}

namespace {

std::string kb(size_t bytes) {
    char buf[32];
    snprintf(buf, sizeof(buf), "%.1f", static_cast<double>(bytes) / 1024.0);
    return buf;
}

}  // namespace

std::string to_markdown(const std::vector<BenchRecord>& records) {
    std::ostringstream out;
    out << "| KEM | Classical | Signature | Auth | Init KB | Resp KB | Total KB | Wall ms | "
           "Cycles (G) |\n";
    out << "|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& r : records) {
        if (!r.ok) {
            out << "| " << r.kem_pq << " | " << r.kem_c << " | " << r.sig << " | "
                << handshake::auth_mode_name(r.mode) << " | failed: " << r.error << " |\n";
            continue;
        }
        char cyc[32];
        snprintf(cyc, sizeof(cyc), "%.3f%s", r.giga_cycles, r.cycles_measured ? "" : "*");
        char wall[32];
        snprintf(wall, sizeof(wall), "%.2f", r.wall_ms);
        out << "| " << r.kem_pq << " | " << r.kem_c << " | " << r.sig << " | "
            << handshake::auth_mode_name(r.mode) << " | " << kb(r.bytes_initiator) << " | "
            << kb(r.bytes_responder) << " | " << kb(r.bytes_total) << " | " << wall << " | "
            << cyc << " |\n";
    }
    return out.str();
}

std::string to_csv(const std::vector<BenchRecord>& records) {
    std::ostringstream out;
    out << "kem_pq,kem_c,signature,auth,ok,bytes_initiator,bytes_responder,bytes_total,"
           "wall_ms,giga_cycles,cycles_measured,error\n";
    for (const auto& r : records) {
        out << r.kem_pq << ',' << r.kem_c << ',' << r.sig << ','
            << handshake::auth_mode_name(r.mode) << ',' << (r.ok ? 1 : 0) << ','
            << r.bytes_initiator << ',' << r.bytes_responder << ',' << r.bytes_total << ','
            << r.wall_ms << ',' << r.giga_cycles << ',' << (r.cycles_measured ? 1 : 0) << ",\""
            << r.error << "\"\n";
    }
    return out.str();
}

}  // namespace vmuckle::bench
