#pragma once

#include <string>
#include <vector>

#include "vmuckle/handshake.hpp"

// Handshake byte accounting and timing. Byte counts are application-layer
// only (messages plus the 4-byte per-message frame); cycle figures are
// best-effort estimates and never a pass/fail criterion.
namespace vmuckle::bench {

struct BenchRecord {
    std::string kem_pq;
    std::string kem_c;
    std::string sig;  // "PSK" for psk-only rows
    handshake::AuthMode mode = handshake::AuthMode::cert;
    bool ok = false;
    std::string error;
    size_t bytes_initiator = 0;
    size_t bytes_responder = 0;
    size_t bytes_total = 0;
    double wall_ms = 0.0;
    double giga_cycles = 0.0;
    bool cycles_measured = false;  // false = wall-time proxy
};

/// One cell: median over `repetitions` runs, byte counts from the counting
/// transport. Seeded, so identical seeds report identical bytes_total.
BenchRecord measure_suite(const std::string& kem_c, const std::string& kem_pq,
                          const std::string& sig, handshake::AuthMode mode, int repetitions,
                          uint64_t seed);

/// One record per (KEM × signature-column) combination, KEM-major, with a
/// PSK row per KEM when psk mode is requested. Per-cell failures are
/// recorded and the matrix continues. Cells run sequentially by default;
/// parallel > 1 spreads them over threads (byte counts stay exact, timing
/// figures become unreliable and are zeroed).
std::vector<BenchRecord> bench_matrix(const std::vector<std::string>& kems_pq,
                                      const std::vector<std::string>& sigs,
                                      const std::vector<handshake::AuthMode>& auth_modes,
                                      int repetitions, uint64_t seed,
                                      const std::string& kem_c = "ECDH-P521",
                                      unsigned parallel = 1);

std::string to_markdown(const std::vector<BenchRecord>& records);
std::string to_csv(const std::vector<BenchRecord>& records);

}  // namespace vmuckle::bench
