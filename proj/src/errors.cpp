#include "vmuckle/errors.hpp"

namespace vmuckle {

std::string_view errc_name(Errc code) {
    switch (code) {
        case Errc::unknown_algorithm: return "unknown-algorithm";
        case Errc::malformed_public_key: return "malformed-public-key";
        case Errc::decaps_failure: return "decaps-failure";
        case Errc::aead_auth_failure: return "aead-auth-failure";
        case Errc::field_too_long: return "field-too-long";
        case Errc::malformed_message: return "malformed-message";
        case Errc::missing_prefix: return "missing-prefix";
        case Errc::bad_length: return "bad-length";
        case Errc::seed_too_short: return "seed-too-short";
        case Errc::index_out_of_range: return "index-out-of-range";
        case Errc::bad_hex: return "bad-hex";
        case Errc::wrong_length: return "wrong-length";
        case Errc::cert_invalid: return "cert-invalid";
        case Errc::signature_invalid: return "signature-invalid";
        case Errc::mac_invalid: return "mac-invalid";
        case Errc::qkd_unavailable: return "qkd-unavailable";
        case Errc::qkd_handle_reuse: return "qkd-handle-reuse";
        case Errc::config_mismatch: return "config-mismatch";
        case Errc::missing_key: return "missing-key";
        case Errc::empty_membership: return "empty-membership";
        case Errc::icv_mismatch: return "icv-mismatch";
        case Errc::state_error: return "state-error";
        case Errc::io_error: return "io-error";
    }
    return "unknown";
}

}  // namespace vmuckle
