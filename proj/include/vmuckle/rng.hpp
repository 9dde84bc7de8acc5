#pragma once

#include <cstdint>
#include <memory>
#include <span>

#include "vmuckle/bytes.hpp"

namespace vmuckle {

/// Injected randomness source. Protocol code never touches a global RNG so
/// that whole handshakes replay byte-exactly from a seed.
class RandomSource {
public:
    virtual ~RandomSource() = default;
    virtual void fill(std::span<uint8_t> out) = 0;

    Bytes bytes(size_t n) {
        Bytes b(n);
        fill(b);
        return b;
    }
};

/// Operating-system entropy.
class OsRandom final : public RandomSource {
public:
    void fill(std::span<uint8_t> out) override;
};

/// Deterministic stream for tests and reproducible runs: the stream is the
/// concatenation of HMAC-SHA-384(seed, BE64(block_index)) blocks.
class DeterministicRandom final : public RandomSource {
public:
    explicit DeterministicRandom(ByteView seed);
    explicit DeterministicRandom(uint64_t seed);

    void fill(std::span<uint8_t> out) override;

private:
    Bytes m_seed;
    Bytes m_buffer;
    size_t m_used = 0;
    uint64_t m_counter = 0;
};

}  // namespace vmuckle
