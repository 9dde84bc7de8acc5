#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vmuckle {

enum class Errc {
    unknown_algorithm,
    malformed_public_key,
    decaps_failure,
    aead_auth_failure,
    field_too_long,
    malformed_message,
    missing_prefix,
    bad_length,
    seed_too_short,
    index_out_of_range,
    bad_hex,
    wrong_length,
    cert_invalid,
    signature_invalid,
    mac_invalid,
    qkd_unavailable,
    qkd_handle_reuse,
    config_mismatch,
    missing_key,
    empty_membership,
    icv_mismatch,
    state_error,
    io_error,
};

std::string_view errc_name(Errc code);

/// Exception carrying a structured error code alongside the message.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), m_code(code) {}

    Errc code() const { return m_code; }

private:
    Errc m_code;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) {
    throw Error(code, what);
}

}  // namespace vmuckle
