#pragma once

#include <array>
#include <functional>
#include <string_view>

#include "vmuckle/bytes.hpp"
#include "vmuckle/wire.hpp"

// The key schedule of one stage. Every derivation is a two-argument PRF
// call F(key, label ∥ context); labels are mutually non-prefixing so the
// concatenation stays injective.
//
//   k_c   = F(ss_c,     l0 ∥ H1)        CHTS  = F(k3, l7 ∥ H1)
//   k_pq  = F(ss_pq,    l1 ∥ H1)        SHTS  = F(k3, l8 ∥ H1)
//   k0    = F(k_pq,     l2 ∥ H1)        dHS   = F(k3, l6 ∥ H0)
//   k1    = F(k_c,      l3 ∥ k0)        tk_*  = F(*HTS, "tk" ∥ Hε)[0:32]
//   k2    = F(k_q,      l4 ∥ k1)        fk_*  = F(*HTS, l9 ∥ Hε)
//   k3    = F(SecState, l5 ∥ k2)
//
//   MS    = F(dHS, 0x00)                CATS  = F(MS, l10 ∥ H4)
//   SATS  = F(MS, l11 ∥ H4)             SecState' = F(MS, l12 ∥ H4)
namespace vmuckle::schedule {

/// l0..l14, byte-exact ASCII.
const std::array<std::string_view, 15>& labels();

/// Label for the traffic-key expansion step.
inline constexpr std::string_view kTkLabel = "tk";

/// Signature context prefixes (l13 for the responder, l14 for the initiator).
ByteView server_certificate_verify_label();
ByteView client_certificate_verify_label();

struct StageInputs {
    Bytes ss_c;       // may be empty (classical KEM not in use)
    Bytes ss_pq;      // must be non-empty
    Bytes k_q;        // QKD key, security_param/8 bytes
    Bytes sec_state;  // empty on the first stage (⊥)
    unsigned security_param = 256;
};

struct StageKeys {
    Bytes k_c, k_pq, k0, k1, k2, k3;
    Bytes chts, shts, dhs;
    Bytes tk_chs, tk_shs;  // 32-byte AEAD keys
    Bytes fk_c, fk_s;
    Bytes ms, cats, sats, sec_state_next;
    bool handshake_done = false;
    bool application_done = false;
};

/// Observer invoked once per PRF step with the step name, the key, the
/// label∥context input and the derived output. Drives the KAT emitter and
/// the call-separation tests.
using StepObserver =
    std::function<void(std::string_view step, ByteView key, ByteView input, ByteView output)>;

/// The 13 steps through fk_C/fk_S. Requires H1 (m1, m2 recorded).
StageKeys derive_handshake_secrets(const StageInputs& in, const wire::Transcript& transcript,
                                   const StepObserver& observe = {});

/// The remaining 4 steps (MS, CATS, SATS, SecState'). Requires H4 (m1..m5).
void derive_application_secrets(StageKeys& keys, const wire::Transcript& transcript,
                                const StepObserver& observe = {});

/// MAC key for the confirmation tags: F(psk, fk). An empty psk uses the
/// canonical all-zero key, so the tag still provides key confirmation.
Bytes mac_key(ByteView psk, ByteView finished_key, const StepObserver& observe = {});

}  // namespace vmuckle::schedule
