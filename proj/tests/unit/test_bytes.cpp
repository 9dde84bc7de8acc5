#include <doctest.h>

#include "vmuckle/bytes.hpp"

using namespace vmuckle;

TEST_CASE("hex round trip and error cases") {
    Bytes b = {0x00, 0x7F, 0xFF, 0x10};
    CHECK(to_hex(view(b)) == "007fff10");
    CHECK(from_hex("007fff10") == b);
    CHECK(from_hex("007FFF10") == b);
    CHECK_THROWS_AS(from_hex("abc"), Error);
    CHECK_THROWS_AS(from_hex("zz"), Error);
}

TEST_CASE("big-endian writers and reader agree") {
    Bytes out;
    append_u8(out, 0xAB);
    append_u24(out, 0x010203);
    append_u32(out, 0xDEADBEEF);
    append_u64(out, 0x0102030405060708ULL);
    ByteReader r(view(out));
    CHECK(r.u8() == 0xAB);
    CHECK(r.u24() == 0x010203u);
    CHECK(r.u32() == 0xDEADBEEFu);
    CHECK(r.u64() == 0x0102030405060708ULL);
    CHECK(r.done());
    CHECK_THROWS_AS(r.u8(), Error);
}

TEST_CASE("reader underrun raises the configured code") {
    Bytes out = {0x00, 0x00};
    ByteReader r(view(out), Errc::cert_invalid);
    try {
        r.u32();
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::cert_invalid);
    }
}

TEST_CASE("constant-time equality") {
    Bytes a = {1, 2, 3}, b = {1, 2, 3}, c = {1, 2, 4};
    CHECK(ct_equal(view(a), view(b)));
    CHECK_FALSE(ct_equal(view(a), view(c)));
    CHECK_FALSE(ct_equal(view(a), ByteView{}));
}
