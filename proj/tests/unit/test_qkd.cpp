#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>

#include "test_util.hpp"
#include "vmuckle/qkd.hpp"

using namespace vmuckle;
using namespace testutil;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& contents) {
        path = data_path("") + "../tmp_qkd_keys.txt";
        std::ofstream out(path, std::ios::trunc);
        out << contents;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("simulator matches the oracle derivation") {
    auto kat = read_named_kat("primitives_kat.txt");
    qkd::Simulator sim(view(kat.at("qkd_seed")));
    CHECK(sim.get_key({"alice-bob", 0}, 256) == kat.at("qkd_key_0"));
    CHECK(sim.get_key({"alice-bob", 1}, 256) == kat.at("qkd_key_1"));
    CHECK(sim.get_key({"alice-bob", 7}, 256) == kat.at("qkd_key_7"));
}

TEST_CASE("two simulator endpoints agree on every handle") {
    Bytes seed = to_bytes("0123456789abcdef");
    qkd::Simulator a(view(seed)), b(view(seed));
    std::set<Bytes> keys;
    for (uint32_t i = 0; i < 1000; i++) {
        Bytes key = a.get_key({"s", i}, 256);
        CHECK(key == b.get_key({"s", i}, 256));
        CHECK(key.size() == 32);
        keys.insert(std::move(key));
    }
    CHECK(keys.size() == 1000);  // no collisions across indices
}

TEST_CASE("simulator validates seed and length") {
    CHECK_THROWS_AS(qkd::Simulator(view(to_bytes("short"))), Error);
    qkd::Simulator sim(view(to_bytes("0123456789abcdef")));
    CHECK(sim.get_key({"s", 0}, 128).size() == 16);
    CHECK_THROWS_AS(sim.get_key({"s", 0}, 130), Error);  // not a byte multiple
    CHECK_THROWS_AS(sim.get_key({"s", 0}, 512), Error);  // beyond one hash block
}

TEST_CASE("file provider serves hex lines by index") {
    TempFile file("00112233445566778899aabbccddeeff00112233445566778899aabbccddeeff\n"
                  "ff00ff00ff00ff00ff00ff00ff00ff00ff00ff00ff00ff00ff00ff00ff00ff00\n"
                  "0102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f20\n");
    qkd::FileProvider provider(file.path);
    CHECK(provider.get_key({"f", 1}, 256) ==
          from_hex("ff00ff00ff00ff00ff00ff00ff00ff00ff00ff00ff00ff00ff00ff00ff00ff00"));
    CHECK_THROWS_AS(provider.get_key({"f", 3}, 256), Error);  // beyond file contents
}

TEST_CASE("file provider rejects bad lines") {
    TempFile odd("abc\n");
    CHECK_THROWS_AS(qkd::FileProvider{odd.path}, Error);

    TempFile short_line("aabb\n");
    qkd::FileProvider provider(short_line.path);
    CHECK_THROWS_AS(provider.get_key({"f", 0}, 256), Error);  // line shorter than λ/8
}

TEST_CASE("single-use guard flags handle reuse") {
    Bytes seed = to_bytes("0123456789abcdef");
    qkd::SingleUseGuard guard(std::make_shared<qkd::Simulator>(view(seed)));
    CHECK(guard.get_key({"s", 4}, 256).size() == 32);
    CHECK_THROWS_AS(guard.get_key({"s", 4}, 256), Error);
    CHECK_NOTHROW(guard.get_key({"s", 5}, 256));
}

TEST_CASE("source specs parse") {
    auto sim = qkd::from_spec("sim:00112233445566778899aabbccddeeff:linkA");
    CHECK(sim.stream_id == "linkA");
    CHECK(sim.provider->get_key({"linkA", 0}, 256).size() == 32);
    CHECK_THROWS_AS(qkd::from_spec("carrier-pigeon:x"), Error);
}
