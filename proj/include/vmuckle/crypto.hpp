#pragma once

#include "vmuckle/bytes.hpp"
#include "vmuckle/rng.hpp"

// Thin wrappers over the OpenSSL primitives the library uses. Everything
// here is deterministic in its inputs; key generation takes the caller's
// RandomSource instead of the library RNG.
namespace vmuckle::crypto {

inline constexpr size_t kSha384Len = 48;
inline constexpr size_t kSha256Len = 32;
inline constexpr size_t kGcmKeyLen = 32;
inline constexpr size_t kGcmNonceLen = 12;
inline constexpr size_t kGcmTagLen = 16;

Bytes sha384(ByteView data);
Bytes sha256(ByteView data);

Bytes hmac_sha384(ByteView key, ByteView msg);
Bytes hmac_sha256(ByteView key, ByteView msg);

/// AES-256-GCM. seal returns ciphertext || 16-byte tag; open raises
/// Errc::aead_auth_failure on any mismatch.
Bytes aes256gcm_seal(ByteView key, ByteView nonce, ByteView ad, ByteView plaintext);
Bytes aes256gcm_open(ByteView key, ByteView nonce, ByteView ad, ByteView sealed);

struct RawKeyPair {
    Bytes public_key;
    Bytes secret_key;
};

// X25519: 32-byte raw keys on both sides.
RawKeyPair x25519_keygen(RandomSource& rng);
Bytes x25519_derive(ByteView secret_key, ByteView peer_public);

// Ed25519: 32-byte keys, 64-byte signatures.
RawKeyPair ed25519_keygen(RandomSource& rng);
Bytes ed25519_sign(ByteView secret_key, ByteView msg);
bool ed25519_verify(ByteView public_key, ByteView msg, ByteView sig);

// NIST P-521 ECDH: 133-byte uncompressed points, 66-byte scalars,
// 66-byte shared x-coordinate.
inline constexpr size_t kP521PointLen = 133;
inline constexpr size_t kP521ScalarLen = 66;
RawKeyPair p521_keygen(RandomSource& rng);
Bytes p521_derive(ByteView secret_scalar, ByteView peer_point);

}  // namespace vmuckle::crypto
