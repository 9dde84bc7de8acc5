#include "vmuckle/schedule.hpp"

#include "vmuckle/errors.hpp"
#include "vmuckle/suite.hpp"

namespace vmuckle::schedule {

namespace {

Bytes step(std::string_view name, ByteView key, std::string_view label, ByteView context,
           const StepObserver& observe) {
    Bytes input = concat({view(to_bytes(label)), context});
    Bytes out = prf(key, input);
    if (observe) observe(name, prf_canonical_key(key), input, out);
    return out;
}

Bytes step_truncated(std::string_view name, ByteView key, std::string_view label,
                     ByteView context, size_t out_len, const StepObserver& observe) {
    Bytes input = concat({view(to_bytes(label)), context});
    Bytes out = prf(key, input);
    out.resize(out_len);
    if (observe) observe(name, prf_canonical_key(key), input, out);
    return out;
}

}  // namespace

const std::array<std::string_view, 15>& labels() {
    static const std::array<std::string_view, 15> kLabels = {
        "derive k c",                          // l0
        "derive k pq",                         // l1
        "first ck",                            // l2
        "second ck",                           // l3
        "third ck",                            // l4
        "fourth ck",                           // l5
        "derived",                             // l6
        "c hs traffic",                        // l7
        "s hs traffic",                        // l8
        "finished",                            // l9
        "c ap traffic",                        // l10
        "s ap traffic",                        // l11
        "secstate",                            // l12
        "TLS 1.3, server CertificateVerify",   // l13
        "TLS 1.3, client CertificateVerify",   // l14
    };
    return kLabels;
}

ByteView server_certificate_verify_label() {
    static const Bytes l13 = to_bytes(labels()[13]);
    return view(l13);
}

ByteView client_certificate_verify_label() {
    static const Bytes l14 = to_bytes(labels()[14]);
    return view(l14);
}

StageKeys derive_handshake_secrets(const StageInputs& in, const wire::Transcript& transcript,
                                   const StepObserver& observe) {
    if (in.ss_pq.empty()) raise(Errc::bad_length, "post-quantum shared secret missing");
    if (in.k_q.size() != in.security_param / 8)
        raise(Errc::wrong_length, "QKD key must be security_param/8 bytes");

    const auto& l = labels();
    const Bytes h1 = transcript.context(wire::Ctx::h1);
    const Bytes h0 = transcript.context(wire::Ctx::h0);
    const Bytes h_eps = transcript.context(wire::Ctx::h_eps);

    StageKeys k;
    k.k_c = step("k_c", in.ss_c, l[0], h1, observe);
    k.k_pq = step("k_pq", in.ss_pq, l[1], h1, observe);
    k.k0 = step("k0", k.k_pq, l[2], h1, observe);
    k.k1 = step("k1", k.k_c, l[3], k.k0, observe);
    k.k2 = step("k2", in.k_q, l[4], k.k1, observe);
    k.k3 = step("k3", in.sec_state, l[5], k.k2, observe);
    k.chts = step("CHTS", k.k3, l[7], h1, observe);
    k.shts = step("SHTS", k.k3, l[8], h1, observe);
    k.dhs = step("dHS", k.k3, l[6], h0, observe);
    k.tk_chs = step_truncated("tk_chs", k.chts, kTkLabel, h_eps, crypto::kGcmKeyLen, observe);
    k.tk_shs = step_truncated("tk_shs", k.shts, kTkLabel, h_eps, crypto::kGcmKeyLen, observe);
    k.fk_c = step("fk_C", k.chts, l[9], h_eps, observe);
    k.fk_s = step("fk_S", k.shts, l[9], h_eps, observe);
    k.handshake_done = true;
    return k;
}

void derive_application_secrets(StageKeys& keys, const wire::Transcript& transcript,
                                const StepObserver& observe) {
    if (!keys.handshake_done) raise(Errc::state_error, "handshake secrets not derived");
    const auto& l = labels();
    const Bytes h4 = transcript.context(wire::Ctx::h4);

    // MS ← F(dHS, 0): the literal zero is a single 0x00 byte.
    static const Bytes kZeroByte{0x00};
    keys.ms = prf(keys.dhs, kZeroByte);
    if (observe) observe("MS", prf_canonical_key(keys.dhs), kZeroByte, keys.ms);

    keys.cats = step("CATS", keys.ms, l[10], h4, observe);
    keys.sats = step("SATS", keys.ms, l[11], h4, observe);
    keys.sec_state_next = step("SecStateNext", keys.ms, l[12], h4, observe);
    keys.application_done = true;
}

Bytes mac_key(ByteView psk, ByteView finished_key, const StepObserver& observe) {
    Bytes out = prf(psk, finished_key);
    if (observe) observe("mac_key", prf_canonical_key(psk), finished_key, out);
    return out;
}

}  // namespace vmuckle::schedule
