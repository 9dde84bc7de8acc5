#include <doctest.h>

#include <random>
#include <set>

#include "test_util.hpp"
#include "vmuckle/schedule.hpp"

using namespace vmuckle;
using namespace testutil;

namespace {

struct KatTranscript {
    wire::Transcript tr;
    schedule::StageInputs in;
};

// The fixed inputs behind tests/data/schedule_kat.txt.
KatTranscript kat_setup() {
    KatTranscript k;
    k.tr.record(1, view(wire::encode(wire::make_m1({}, Bytes(8, 0xAA), Bytes(32, 0x01)))));
    k.tr.record(2, view(wire::encode(wire::make_m2({}, Bytes(8, 0xBB), Bytes(32, 0x02)))));
    k.tr.record(3, view(wire::encode(wire::make_opaque(3, {}))));
    k.tr.record(4, view(wire::encode(wire::make_opaque(4, {}))));
    k.tr.record(5, view(wire::encode(wire::make_opaque(5, Bytes(48, 0xCC)))));
    k.in.ss_c = {};
    k.in.ss_pq = Bytes(32, 0x11);
    k.in.k_q = Bytes(32, 0x22);
    k.in.sec_state = {};
    k.in.security_param = 256;
    return k;
}

struct Step {
    std::string name;
    Bytes key, input, output;
};

std::vector<Step> run_all_steps(const KatTranscript& k, ByteView psk) {
    std::vector<Step> steps;
    auto observer = [&](std::string_view name, ByteView key, ByteView input, ByteView out) {
        steps.push_back({std::string(name), Bytes(key.begin(), key.end()),
                         Bytes(input.begin(), input.end()), Bytes(out.begin(), out.end())});
    };
    schedule::StageKeys keys = schedule::derive_handshake_secrets(k.in, k.tr, observer);
    schedule::derive_application_secrets(keys, k.tr, observer);
    schedule::mac_key(psk, view(keys.fk_c), observer);
    schedule::mac_key(psk, view(keys.fk_s), observer);
    return steps;
}

schedule::StageKeys full(const schedule::StageInputs& in, const wire::Transcript& tr) {
    schedule::StageKeys keys = schedule::derive_handshake_secrets(in, tr);
    schedule::derive_application_secrets(keys, tr);
    return keys;
}

}  // namespace

TEST_CASE("key schedule matches the independent oracle step by step") {
    auto rows = read_kat_lines("schedule_kat.txt");
    REQUIRE(rows.size() == 19);  // 17 derivation steps + the two mac keys

    KatTranscript k = kat_setup();
    std::vector<Step> steps = run_all_steps(k, {});
    REQUIRE(steps.size() == rows.size());
    for (size_t i = 0; i < rows.size(); i++) {
        CAPTURE(i);
        CAPTURE(rows[i][0]);
        CHECK(steps[i].name == rows[i][0]);
        CHECK(steps[i].key == kat_hex(rows[i][1]));
        CHECK(steps[i].input == kat_hex(rows[i][2]));
        CHECK(steps[i].output == kat_hex(rows[i][3]));
    }
}

TEST_CASE("derivation is deterministic across parties") {
    KatTranscript k = kat_setup();
    auto a = full(k.in, k.tr);
    auto b = full(k.in, k.tr);
    CHECK(a.ms == b.ms);
    CHECK(a.cats == b.cats);
    CHECK(a.sats == b.sats);
    CHECK(a.sec_state_next == b.sec_state_next);
    CHECK(a.tk_chs.size() == 32);
    CHECK(a.tk_shs.size() == 32);
}

TEST_CASE("outputs are pairwise distinct") {
    KatTranscript k = kat_setup();
    auto keys = full(k.in, k.tr);
    std::set<Bytes> outs{keys.ms, keys.cats, keys.sats, keys.sec_state_next};
    CHECK(outs.size() == 4);
}

TEST_CASE("no two derivation steps share key and input") {
    KatTranscript k = kat_setup();
    std::vector<Step> steps = run_all_steps(k, {});
    std::set<std::pair<Bytes, Bytes>> calls;
    for (const auto& s : steps) {
        CAPTURE(s.name);
        CHECK(calls.insert({s.key, s.input}).second);
    }
}

TEST_CASE("labels are byte-exact and mutually non-prefixing") {
    const auto& l = schedule::labels();
    CHECK(l[0] == "derive k c");
    CHECK(l[1] == "derive k pq");
    CHECK(l[2] == "first ck");
    CHECK(l[3] == "second ck");
    CHECK(l[4] == "third ck");
    CHECK(l[5] == "fourth ck");
    CHECK(l[6] == "derived");
    CHECK(l[7] == "c hs traffic");
    CHECK(l[8] == "s hs traffic");
    CHECK(l[9] == "finished");
    CHECK(l[10] == "c ap traffic");
    CHECK(l[11] == "s ap traffic");
    CHECK(l[12] == "secstate");
    CHECK(l[13] == "TLS 1.3, server CertificateVerify");
    CHECK(l[14] == "TLS 1.3, client CertificateVerify");

    std::vector<std::string_view> all(l.begin(), l.end());
    all.push_back(schedule::kTkLabel);
    for (size_t i = 0; i < all.size(); i++)
        for (size_t j = 0; j < all.size(); j++) {
            if (i == j) continue;
            CAPTURE(all[i]);
            CAPTURE(all[j]);
            CHECK_FALSE(all[j].starts_with(all[i]));
        }
}

TEST_CASE("flipping any single input changes the master secret") {
    std::mt19937_64 rng(77);
    int changed = 0;
    const int trials = 200;
    for (int trial = 0; trial < trials; trial++) {
        KatTranscript k = kat_setup();
        Bytes m1 = Bytes(k.tr.message(1).begin(), k.tr.message(1).end());
        Bytes m2 = Bytes(k.tr.message(2).begin(), k.tr.message(2).end());
        k.in.ss_c = Bytes(32, 0x00);  // give the classical share substance to perturb

        switch (rng() % 6) {
            case 0: k.in.ss_c[rng() % k.in.ss_c.size()] ^= 1 << (rng() % 8); break;
            case 1: k.in.ss_pq[rng() % k.in.ss_pq.size()] ^= 1 << (rng() % 8); break;
            case 2: k.in.k_q[rng() % k.in.k_q.size()] ^= 1 << (rng() % 8); break;
            case 3: k.in.sec_state = Bytes(48, 0); k.in.sec_state[rng() % 48] ^= 1; break;
            case 4: m1[1 + rng() % (m1.size() - 1)] ^= 1 << (rng() % 8); break;
            default: m2[1 + rng() % (m2.size() - 1)] ^= 1 << (rng() % 8); break;
        }
        wire::Transcript tr;
        tr.record(1, view(m1));
        tr.record(2, view(m2));
        for (uint8_t i = 3; i <= 5; i++) tr.record(i, k.tr.message(i));

        // Re-derive the unperturbed baseline with the same ss_c substance.
        KatTranscript ref = kat_setup();
        ref.in.ss_c = Bytes(32, 0x00);
        if (full(k.in, tr).ms != full(ref.in, ref.tr).ms) changed++;
    }
    CHECK(changed == trials);
}

TEST_CASE("avalanche: flipping one k_q bit changes the chain from k2 onward") {
    KatTranscript a = kat_setup();
    KatTranscript b = kat_setup();
    b.in.k_q[7] ^= 0x10;
    auto ka = full(a.in, a.tr);
    auto kb = full(b.in, b.tr);
    CHECK(ka.k_c == kb.k_c);
    CHECK(ka.k0 == kb.k0);
    CHECK(ka.k1 == kb.k1);
    CHECK(ka.k2 != kb.k2);
    CHECK(ka.k3 != kb.k3);
    CHECK(ka.chts != kb.chts);
    CHECK(ka.shts != kb.shts);
    CHECK(ka.dhs != kb.dhs);
    CHECK(ka.ms != kb.ms);
    CHECK(ka.sec_state_next != kb.sec_state_next);
}

TEST_CASE("empty classical share still completes and agrees") {
    KatTranscript k = kat_setup();
    REQUIRE(k.in.ss_c.empty());
    auto a = full(k.in, k.tr);
    auto b = full(k.in, k.tr);
    CHECK(a.ms == b.ms);
}

TEST_CASE("schedule validates its inputs") {
    KatTranscript k = kat_setup();

    schedule::StageInputs missing_pq = k.in;
    missing_pq.ss_pq.clear();
    CHECK_THROWS_AS(schedule::derive_handshake_secrets(missing_pq, k.tr), Error);

    schedule::StageInputs short_kq = k.in;
    short_kq.k_q.resize(16);
    CHECK_THROWS_AS(schedule::derive_handshake_secrets(short_kq, k.tr), Error);

    wire::Transcript empty;
    CHECK_THROWS_AS(schedule::derive_handshake_secrets(k.in, empty), Error);

    // Application secrets need H4 (m1..m5).
    wire::Transcript two;
    two.record(1, k.tr.message(1));
    two.record(2, k.tr.message(2));
    auto keys = schedule::derive_handshake_secrets(k.in, two);
    CHECK_THROWS_AS(schedule::derive_application_secrets(keys, two), Error);
}

TEST_CASE("mac keys separate the two finished keys") {
    KatTranscript k = kat_setup();
    auto keys = full(k.in, k.tr);
    Bytes psk = to_bytes("shared psk");
    CHECK(schedule::mac_key(view(psk), view(keys.fk_c)) !=
          schedule::mac_key(view(psk), view(keys.fk_s)));
    // Empty psk falls back to the canonical zero key.
    CHECK(schedule::mac_key({}, view(keys.fk_s)) ==
          schedule::mac_key(view(zeros(48)), view(keys.fk_s)));
}
