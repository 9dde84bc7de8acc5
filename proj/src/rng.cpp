#include "vmuckle/rng.hpp"

#include <openssl/rand.h>

#include <cstring>

#include "vmuckle/crypto.hpp"
#include "vmuckle/errors.hpp"

namespace vmuckle {

void OsRandom::fill(std::span<uint8_t> out) {
    if (out.empty()) return;
    if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1)
        raise(Errc::state_error, "system entropy unavailable");
}

DeterministicRandom::DeterministicRandom(ByteView seed) : m_seed(seed.begin(), seed.end()) {}

DeterministicRandom::DeterministicRandom(uint64_t seed) {
    m_seed.resize(8);
    for (int i = 7; i >= 0; i--) {
        m_seed[static_cast<size_t>(i)] = static_cast<uint8_t>(seed);
        seed >>= 8;
    }
}

void DeterministicRandom::fill(std::span<uint8_t> out) {
    size_t produced = 0;
    while (produced < out.size()) {
        if (m_used == m_buffer.size()) {
            Bytes block_index(8);
            uint64_t c = m_counter++;
            for (int i = 7; i >= 0; i--) {
                block_index[static_cast<size_t>(i)] = static_cast<uint8_t>(c);
                c >>= 8;
            }
            m_buffer = crypto::hmac_sha384(m_seed, block_index);
            m_used = 0;
        }
        size_t n = std::min(out.size() - produced, m_buffer.size() - m_used);
        std::memcpy(out.data() + produced, m_buffer.data() + m_used, n);
        produced += n;
        m_used += n;
    }
}

}  // namespace vmuckle
