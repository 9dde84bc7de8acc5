#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "vmuckle/bytes.hpp"
#include "vmuckle/suite.hpp"

// Message encoding for m1..m8, transcript accumulation and the context
// values fed into the key schedule.
//
// Plaintext message layout (docs/wire-format.md):
//   u8 type (1..8) followed by the message's fields in order,
//   each field as u24 big-endian length || bytes.
// m1 and m2 travel in the clear; m3..m8 travel AEAD-sealed with
// associated data "Message N" and nonce = BE96(N).
namespace vmuckle::wire {

inline constexpr size_t kMaxFieldLen = 0xFFFFFF;  // u24 length prefix

struct M1 {
    Bytes pk_c;  // empty when the classical KEM is not in use
    Bytes pk_pq;
    Bytes n_i;
    bool operator==(const M1&) const = default;
};

struct M2 {
    Bytes ct_c;  // empty iff pk_c was empty
    Bytes ct_pq;
    Bytes n_r;
    bool operator==(const M2&) const = default;
};

/// m3..m8 carry one payload field (certificate chain, signature or MAC tag;
/// possibly zero-length).
struct Opaque {
    Bytes payload;
    bool operator==(const Opaque&) const = default;
};

struct HandshakeMessage {
    uint8_t index = 0;  // 1..8
    std::variant<M1, M2, Opaque> body;
    bool operator==(const HandshakeMessage&) const = default;
};

HandshakeMessage make_m1(Bytes pk_c, Bytes pk_pq, Bytes n_i);
HandshakeMessage make_m2(Bytes ct_c, Bytes ct_pq, Bytes n_r);
HandshakeMessage make_opaque(uint8_t index, Bytes payload);

/// Canonical, injective encoding. Raises field_too_long past the u24 limit.
Bytes encode(const HandshakeMessage& msg);

/// Inverse of encode on its image; raises malformed_message on truncation,
/// bad type tags or trailing bytes.
HandshakeMessage decode(ByteView data);

enum class Ctx : uint8_t { h_eps, h0, h1, h2, h3, h4, h5, h6 };

/// Transcript of one stage: the plaintext encodings of m1..m8 in order.
/// Contexts hash these plaintext encodings; sealing never changes a context.
class Transcript {
public:
    /// Records the plaintext encoding of message `index`; messages must be
    /// recorded in index order, each exactly once.
    void record(uint8_t index, ByteView plaintext_encoding);

    bool has(uint8_t index) const { return index >= 1 && index <= m_count; }
    uint8_t count() const { return m_count; }
    ByteView message(uint8_t index) const;

    /// H_ε = "" (zero length); H_0 = H(""); H_k = H(m1 ∥ … ∥ m_{k+1}).
    /// Raises missing_prefix when the required messages are absent.
    Bytes context(Ctx which) const;

private:
    std::array<Bytes, 8> m_messages;
    uint8_t m_count = 0;
};

/// Associated data "Message N" (ASCII, no terminator) for N in 3..8.
Bytes message_ad(uint8_t index);

/// 96-bit big-endian nonce holding the message index within the stage.
Bytes message_nonce(uint8_t index);

/// Seals/opens the plaintext encoding of message `index` (3..8) under the
/// given traffic key. open raises aead_auth_failure on any modification of
/// ciphertext or associated data.
Bytes seal_message(ByteView key, uint8_t index, ByteView plaintext);
Bytes open_message(ByteView key, uint8_t index, ByteView sealed);

}  // namespace vmuckle::wire
