#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vmuckle/bytes.hpp"
#include "vmuckle/rng.hpp"

// MACsec MKA bridge: derives the CAK/KEK/ICK hierarchy from the handshake
// master secret (as MSK) with HMAC-SHA-256, performs key-server SAK
// generation and moves SAKs inside an MKPDU-like frame (AES-256-GCM wrap
// under the KEK, 16-byte truncated HMAC-SHA-256 ICV under the ICK). The
// frame layout is this project's own, documented in docs/wire-format.md.
namespace vmuckle::mka {

inline constexpr size_t kMskLen = 48;
inline constexpr size_t kSakLen = 32;
inline constexpr size_t kIcvLen = 16;
inline constexpr size_t kSciLen = 8;
inline constexpr size_t kSakNonceLen = 32;
inline constexpr size_t kMemberIdLen = 12;
inline constexpr uint16_t kCipherSuiteGcmAes256 = 0x0001;

struct MkaHierarchy {
    Bytes msk;  // 48 bytes
    Bytes ckn;  // 1..32 bytes
    Bytes cak;  // HMAC-SHA-256(msk, ckn)
    Bytes kek;  // HMAC-SHA-256(cak, "IEEE8021 KEK" ∥ ckn)
    Bytes ick;  // HMAC-SHA-256(cak, "IEEE8021 ICK" ∥ ckn)
};

MkaHierarchy derive_hierarchy(ByteView msk, ByteView ckn);

struct Member {
    Bytes id;  // 1..12 bytes
    uint8_t priority = 0;
};

/// Highest priority wins; ties break to the lexicographically lowest id.
/// Raises empty_membership on an empty list.
Bytes elect_key_server(const std::vector<Member>& members);

struct SakRecord {
    Bytes sak;  // HMAC-SHA-256(cak, sci ∥ BE32(key_number) ∥ nonce)
    std::array<uint8_t, kSciLen> sci{};
    uint32_t key_number = 0;
    Bytes nonce;  // 32-byte key-server random
};

SakRecord generate_sak(const MkaHierarchy& h, const std::array<uint8_t, kSciLen>& sci,
                       uint32_t key_number, RandomSource& rng);

struct FrameHeader {
    std::array<uint8_t, kMemberIdLen> member_id{};
    uint8_t key_server_priority = 0;
};

/// Builds the MKPDU-like frame: header ∥ wrapped SAK ∥ ICV.
Bytes wrap_sak(const MkaHierarchy& h, const SakRecord& rec, const FrameHeader& header,
               RandomSource& rng);

/// Verifies the ICV first (icv_mismatch), then opens the AEAD
/// (aead_auth_failure), then returns the carried record.
SakRecord unwrap_sak(const MkaHierarchy& h, ByteView frame);

/// 16-byte truncated HMAC-SHA-256 under the ICK; exposed for oracle tests.
Bytes icv(ByteView ick, ByteView frame_prefix);

}  // namespace vmuckle::mka
