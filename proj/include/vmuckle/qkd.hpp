#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "vmuckle/bytes.hpp"

// GetKey provider abstraction for QKD-supplied symmetric keys, plus a
// deterministic two-endpoint simulator standing in for real hardware.
namespace vmuckle::qkd {

struct KeyHandle {
    std::string stream_id;
    uint32_t index = 0;

    auto operator<=>(const KeyHandle&) const = default;
};

/// Both endpoints of a stream must receive identical bytes for identical
/// handles; keys are security_param/8 bytes.
class Provider {
public:
    virtual ~Provider() = default;
    virtual Bytes get_key(const KeyHandle& handle, unsigned security_param_bits) = 0;
};

/// Deterministic simulator: get_key = HMAC-SHA-384(seed, stream ∥ 0x00 ∥
/// BE32(index) ∥ BE32(λ)) truncated to λ/8 bytes. Two instances with equal
/// seeds agree on every handle.
class Simulator final : public Provider {
public:
    /// Requires a seed of at least 16 bytes.
    explicit Simulator(ByteView seed);

    Bytes get_key(const KeyHandle& handle, unsigned security_param_bits) override;

private:
    Bytes m_seed;
};

/// Replays externally supplied key material from a file of newline-separated
/// hex keys; line i serves index i.
class FileProvider final : public Provider {
public:
    explicit FileProvider(const std::string& path);

    Bytes get_key(const KeyHandle& handle, unsigned security_param_bits) override;

private:
    std::vector<Bytes> m_keys;
    std::mutex m_mutex;
};

/// Debug wrapper that raises qkd_handle_reuse when a handle is consumed twice.
class SingleUseGuard final : public Provider {
public:
    explicit SingleUseGuard(std::shared_ptr<Provider> inner) : m_inner(std::move(inner)) {}

    Bytes get_key(const KeyHandle& handle, unsigned security_param_bits) override;

private:
    std::shared_ptr<Provider> m_inner;
    std::set<KeyHandle> m_used;
    std::mutex m_mutex;
};

/// Parses "sim:<seed-hex>:<stream>" or "file:<path>" (the --qkd-source CLI
/// syntax). The stream id of a sim source becomes the default stream.
struct SourceSpec {
    std::shared_ptr<Provider> provider;
    std::string stream_id;
};
SourceSpec from_spec(const std::string& spec);

}  // namespace vmuckle::qkd
