#include <doctest.h>

#include <algorithm>

#include "test_util.hpp"
#include "vmuckle/bench.hpp"

using namespace vmuckle;
using handshake::AuthMode;

TEST_CASE("byte accounting is reproducible for a fixed seed") {
    auto a = bench::measure_suite("ECDH-P521", "ML-KEM-512", "Falcon-512", AuthMode::cert, 1, 9);
    auto b = bench::measure_suite("ECDH-P521", "ML-KEM-512", "Falcon-512", AuthMode::cert, 1, 9);
    REQUIRE(a.ok);
    REQUIRE(b.ok);
    CHECK(a.bytes_total == b.bytes_total);
    CHECK(a.bytes_initiator == b.bytes_initiator);
    CHECK(a.bytes_total == a.bytes_initiator + a.bytes_responder);
}

TEST_CASE("bytes grow monotonically with kem public-key + ciphertext size") {
    std::vector<std::string> kems{
        "ML-KEM-512", "ML-KEM-768",         "ML-KEM-1024",        "HQC-128",
        "HQC-192",    "HQC-256",            "FrodoKEM-640-SHAKE", "FrodoKEM-976-SHAKE",
        "FrodoKEM-1344-SHAKE"};
    auto moved_bytes = [](const std::string& name) {
        auto sizes = registry().require_kem(name).sizes();
        return sizes.public_key + sizes.ciphertext;
    };
    std::sort(kems.begin(), kems.end(),
              [&](const auto& a, const auto& b) { return moved_bytes(a) < moved_bytes(b); });

    size_t previous = 0;
    for (const auto& kem : kems) {
        auto rec = bench::measure_suite("ECDH-P521", kem, "ML-DSA-44", AuthMode::cert, 1, 9);
        REQUIRE(rec.ok);
        CHECK(rec.bytes_total >= previous);
        previous = rec.bytes_total;
    }
}

TEST_CASE("psk rows carry no certificates and stay small") {
    auto psk = bench::measure_suite("ECDH-P521", "ML-KEM-512", "", AuthMode::psk, 1, 9);
    auto cert = bench::measure_suite("ECDH-P521", "ML-KEM-512", "ML-DSA-44", AuthMode::cert, 1, 9);
    REQUIRE(psk.ok);
    REQUIRE(cert.ok);
    CHECK(psk.bytes_total < cert.bytes_total / 4);
    CHECK(psk.sig == "PSK");
}

TEST_CASE("matrix continues past per-cell failures") {
    auto records = bench::bench_matrix({"ML-KEM-512", "definitely-unregistered"}, {"Falcon-512"},
                                       {AuthMode::psk, AuthMode::cert}, 1, 9);
    REQUIRE(records.size() == 4);
    CHECK(records[0].ok);
    CHECK(records[1].ok);
    CHECK_FALSE(records[2].ok);
    CHECK_FALSE(records[3].ok);
    CHECK_FALSE(records[2].error.empty());

    std::string md = bench::to_markdown(records);
    CHECK(md.find("ML-KEM-512") != std::string::npos);
    std::string csv = bench::to_csv(records);
    CHECK(csv.find("bytes_total") != std::string::npos);
}

TEST_CASE("test-primitive handshakes finish well under the smoke budget") {
    auto rec = bench::measure_suite("none", "TestKEM-32", "TestDSS", AuthMode::both, 3, 5);
    REQUIRE(rec.ok);
    CHECK(rec.wall_ms < 50.0);
}

TEST_CASE("parallel matrix reports the same byte counts as sequential") {
    auto seq = bench::bench_matrix({"ML-KEM-512", "ML-KEM-768"}, {"Falcon-512"},
                                   {AuthMode::psk, AuthMode::cert}, 1, 9);
    auto par = bench::bench_matrix({"ML-KEM-512", "ML-KEM-768"}, {"Falcon-512"},
                                   {AuthMode::psk, AuthMode::cert}, 1, 9, "ECDH-P521", 4);
    REQUIRE(seq.size() == par.size());
    for (size_t i = 0; i < seq.size(); i++) {
        CHECK(seq[i].bytes_total == par[i].bytes_total);
        CHECK(seq[i].ok == par[i].ok);
    }
}
