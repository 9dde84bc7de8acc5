#include "vmuckle/bytes.hpp"

#include <algorithm>
#include <cstring>

namespace vmuckle {

Bytes to_bytes(std::string_view s) {
    return Bytes(s.begin(), s.end());
}

std::string to_string(ByteView b) {
    return std::string(reinterpret_cast<const char*>(b.data()), b.size());
}

std::string to_hex(ByteView b) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(b.size() * 2);
    for (uint8_t byte : b) {
        out.push_back(digits[byte >> 4]);
        out.push_back(digits[byte & 0x0F]);
    }
    return out;
}

namespace {

int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

Bytes from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) raise(Errc::bad_hex, "odd-length hex string");
    Bytes out;
    out.reserve(hex.size() / 2);
    for (size_t i = 0; i < hex.size(); i += 2) {
        int hi = hex_nibble(hex[i]);
        int lo = hex_nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) raise(Errc::bad_hex, "non-hex character");
        out.push_back(static_cast<uint8_t>(hi << 4 | lo));
    }
    return out;
}

Bytes zeros(size_t n) {
    return Bytes(n, 0);
}

Bytes concat(std::initializer_list<ByteView> parts) {
    size_t total = 0;
    for (const auto& p : parts) total += p.size();
    Bytes out;
    out.reserve(total);
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

void append(Bytes& out, ByteView part) {
    out.insert(out.end(), part.begin(), part.end());
}

void append_u8(Bytes& out, uint8_t v) {
    out.push_back(v);
}

void append_u16(Bytes& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

void append_u24(Bytes& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

void append_u32(Bytes& out, uint32_t v) {
    append_u16(out, static_cast<uint16_t>(v >> 16));
    append_u16(out, static_cast<uint16_t>(v));
}

void append_u64(Bytes& out, uint64_t v) {
    append_u32(out, static_cast<uint32_t>(v >> 32));
    append_u32(out, static_cast<uint32_t>(v));
}

void ByteReader::need(size_t n) const {
    if (remaining() < n) raise(m_errc, "truncated input");
}

uint8_t ByteReader::u8() {
    need(1);
    return m_data[m_pos++];
}

uint16_t ByteReader::u16() {
    need(2);
    uint16_t v = static_cast<uint16_t>(m_data[m_pos] << 8 | m_data[m_pos + 1]);
    m_pos += 2;
    return v;
}

uint32_t ByteReader::u24() {
    need(3);
    uint32_t v = static_cast<uint32_t>(m_data[m_pos]) << 16 |
                 static_cast<uint32_t>(m_data[m_pos + 1]) << 8 |
                 static_cast<uint32_t>(m_data[m_pos + 2]);
    m_pos += 3;
    return v;
}

uint32_t ByteReader::u32() {
    uint32_t hi = u16();
    return hi << 16 | u16();
}

uint64_t ByteReader::u64() {
    uint64_t hi = u32();
    return hi << 32 | u32();
}

Bytes ByteReader::take(size_t n) {
    need(n);
    Bytes out(m_data.begin() + static_cast<ptrdiff_t>(m_pos),
              m_data.begin() + static_cast<ptrdiff_t>(m_pos + n));
    m_pos += n;
    return out;
}

Bytes ByteReader::take_u24_prefixed() {
    return take(u24());
}

void ByteReader::expect_end() const {
    if (!done()) raise(m_errc, "trailing bytes");
}

bool ct_equal(ByteView a, ByteView b) {
    if (a.size() != b.size()) return false;
    uint8_t diff = 0;
    for (size_t i = 0; i < a.size(); i++) diff |= static_cast<uint8_t>(a[i] ^ b[i]);
    return diff == 0;
}

void secure_wipe(Bytes& b) {
    if (b.empty()) return;
    volatile uint8_t* p = b.data();
    for (size_t i = 0; i < b.size(); i++) p[i] = 0;
    b.clear();
}

}  // namespace vmuckle
