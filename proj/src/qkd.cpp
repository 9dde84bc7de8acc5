#include "vmuckle/qkd.hpp"

#include <fstream>

#include "vmuckle/crypto.hpp"
#include "vmuckle/errors.hpp"

namespace vmuckle::qkd {

namespace {

size_t key_len(unsigned security_param_bits) {
    if (security_param_bits == 0 || security_param_bits % 8 != 0 ||
        security_param_bits / 8 > crypto::kSha384Len)
        raise(Errc::bad_length, "unsupported QKD key length");
    return security_param_bits / 8;
}

}  // namespace

Simulator::Simulator(ByteView seed) : m_seed(seed.begin(), seed.end()) {
    if (m_seed.size() < 16) raise(Errc::seed_too_short, "simulator seed must be >= 16 bytes");
}

Bytes Simulator::get_key(const KeyHandle& handle, unsigned security_param_bits) {
    const size_t len = key_len(security_param_bits);
    Bytes msg = to_bytes(handle.stream_id);
    append_u8(msg, 0x00);
    append_u32(msg, handle.index);
    append_u32(msg, security_param_bits);
    Bytes key = crypto::hmac_sha384(m_seed, msg);
    key.resize(len);
    return key;
}

FileProvider::FileProvider(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::io_error, "cannot open key file " + path);
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        m_keys.push_back(from_hex(line));
    }
}

Bytes FileProvider::get_key(const KeyHandle& handle, unsigned security_param_bits) {
    const size_t len = key_len(security_param_bits);
    std::lock_guard lock(m_mutex);
    if (handle.index >= m_keys.size())
        raise(Errc::index_out_of_range, "key index beyond file contents");
    const Bytes& key = m_keys[handle.index];
    if (key.size() < len) raise(Errc::wrong_length, "key line shorter than requested length");
    return Bytes(key.begin(), key.begin() + static_cast<ptrdiff_t>(len));
}

Bytes SingleUseGuard::get_key(const KeyHandle& handle, unsigned security_param_bits) {
    {
        std::lock_guard lock(m_mutex);
        if (!m_used.insert(handle).second)
            raise(Errc::qkd_handle_reuse, "QKD handle consumed twice: " + handle.stream_id + "/" +
                                              std::to_string(handle.index));
    }
    return m_inner->get_key(handle, security_param_bits);
}

SourceSpec from_spec(const std::string& spec) {
    if (spec.rfind("sim:", 0) == 0) {
        const size_t second = spec.find(':', 4);
        if (second == std::string::npos)
            raise(Errc::io_error, "sim source needs sim:<seed-hex>:<stream>");
        Bytes seed = from_hex(spec.substr(4, second - 4));
        std::string stream = spec.substr(second + 1);
        return {std::make_shared<Simulator>(view(seed)), stream};
    }
    if (spec.rfind("file:", 0) == 0) {
        return {std::make_shared<FileProvider>(spec.substr(5)), "file"};
    }
    raise(Errc::io_error, "unknown QKD source spec: " + spec);
}

}  // namespace vmuckle::qkd
