#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vmuckle/errors.hpp"

namespace vmuckle {

using Bytes = std::vector<uint8_t>;
using ByteView = std::span<const uint8_t>;

inline ByteView view(const Bytes& b) { return {b.data(), b.size()}; }

Bytes to_bytes(std::string_view s);
std::string to_string(ByteView b);

std::string to_hex(ByteView b);
Bytes from_hex(std::string_view hex);

Bytes zeros(size_t n);
Bytes concat(std::initializer_list<ByteView> parts);

void append(Bytes& out, ByteView part);
void append_u8(Bytes& out, uint8_t v);
void append_u16(Bytes& out, uint16_t v);
void append_u24(Bytes& out, uint32_t v);
void append_u32(Bytes& out, uint32_t v);
void append_u64(Bytes& out, uint64_t v);

/// Sequential big-endian reader over a byte view. Underruns raise the
/// error code the reader was constructed with (malformed_message by default).
class ByteReader {
public:
    explicit ByteReader(ByteView data, Errc on_underrun = Errc::malformed_message)
        : m_data(data), m_errc(on_underrun) {}

    uint8_t u8();
    uint16_t u16();
    uint32_t u24();
    uint32_t u32();
    uint64_t u64();
    Bytes take(size_t n);
    Bytes take_u24_prefixed();

    size_t remaining() const { return m_data.size() - m_pos; }
    bool done() const { return remaining() == 0; }

    /// Raises unless every byte has been consumed.
    void expect_end() const;

private:
    void need(size_t n) const;

    ByteView m_data;
    size_t m_pos = 0;
    Errc m_errc;
};

/// Constant-time comparison; length mismatch returns false (length is not secret here).
bool ct_equal(ByteView a, ByteView b);

/// Best-effort in-place zeroization.
void secure_wipe(Bytes& b);

}  // namespace vmuckle
