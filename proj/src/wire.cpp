#include "vmuckle/wire.hpp"

#include <string>

#include "vmuckle/errors.hpp"

namespace vmuckle::wire {

namespace {

void append_field(Bytes& out, ByteView field) {
    if (field.size() > kMaxFieldLen) raise(Errc::field_too_long, "field exceeds 2^24-1 bytes");
    append_u24(out, static_cast<uint32_t>(field.size()));
    append(out, field);
}

}  // namespace

HandshakeMessage make_m1(Bytes pk_c, Bytes pk_pq, Bytes n_i) {
    return {1, M1{std::move(pk_c), std::move(pk_pq), std::move(n_i)}};
}

HandshakeMessage make_m2(Bytes ct_c, Bytes ct_pq, Bytes n_r) {
    return {2, M2{std::move(ct_c), std::move(ct_pq), std::move(n_r)}};
}

HandshakeMessage make_opaque(uint8_t index, Bytes payload) {
    if (index < 3 || index > 8) raise(Errc::state_error, "opaque message index out of range");
    return {index, Opaque{std::move(payload)}};
}

Bytes encode(const HandshakeMessage& msg) {
    Bytes out;
    append_u8(out, msg.index);
    if (const auto* m1 = std::get_if<M1>(&msg.body)) {
        if (msg.index != 1) raise(Errc::state_error, "m1 body with wrong index");
        append_field(out, m1->pk_c);
        append_field(out, m1->pk_pq);
        append_field(out, m1->n_i);
    } else if (const auto* m2 = std::get_if<M2>(&msg.body)) {
        if (msg.index != 2) raise(Errc::state_error, "m2 body with wrong index");
        append_field(out, m2->ct_c);
        append_field(out, m2->ct_pq);
        append_field(out, m2->n_r);
    } else {
        const auto& opaque = std::get<Opaque>(msg.body);
        if (msg.index < 3 || msg.index > 8) raise(Errc::state_error, "bad opaque index");
        append_field(out, opaque.payload);
    }
    return out;
}

HandshakeMessage decode(ByteView data) {
    ByteReader reader(data);
    uint8_t type = reader.u8();
    HandshakeMessage msg;
    msg.index = type;
    switch (type) {
        case 1: {
            M1 m1;
            m1.pk_c = reader.take_u24_prefixed();
            m1.pk_pq = reader.take_u24_prefixed();
            m1.n_i = reader.take_u24_prefixed();
            msg.body = std::move(m1);
            break;
        }
        case 2: {
            M2 m2;
            m2.ct_c = reader.take_u24_prefixed();
            m2.ct_pq = reader.take_u24_prefixed();
            m2.n_r = reader.take_u24_prefixed();
            msg.body = std::move(m2);
            break;
        }
        case 3:
        case 4:
        case 5:
        case 6:
        case 7:
        case 8:
            msg.body = Opaque{reader.take_u24_prefixed()};
            break;
        default:
            raise(Errc::malformed_message, "unknown message type " + std::to_string(type));
    }
    reader.expect_end();
    return msg;
}

void Transcript::record(uint8_t index, ByteView plaintext_encoding) {
    if (index != m_count + 1 || index > 8)
        raise(Errc::state_error, "transcript messages must be recorded in order");
    m_messages[index - 1].assign(plaintext_encoding.begin(), plaintext_encoding.end());
    m_count = index;
}

ByteView Transcript::message(uint8_t index) const {
    if (!has(index)) raise(Errc::missing_prefix, "message not recorded");
    return view(m_messages[index - 1]);
}

Bytes Transcript::context(Ctx which) const {
    if (which == Ctx::h_eps) return {};
    if (which == Ctx::h0) return hash({});

    // H_k covers m1..m_{k+1}
    const auto k = static_cast<uint8_t>(which) - static_cast<uint8_t>(Ctx::h0);
    const uint8_t last = static_cast<uint8_t>(k + 1);
    if (m_count < last)
        raise(Errc::missing_prefix,
              "context H" + std::to_string(k) + " requires m1..m" + std::to_string(last));
    Bytes stream;
    for (uint8_t i = 1; i <= last; i++) append(stream, view(m_messages[i - 1]));
    return hash(stream);
}

Bytes message_ad(uint8_t index) {
    if (index < 3 || index > 8) raise(Errc::state_error, "sealed message index out of range");
    return to_bytes("Message " + std::to_string(index));
}

Bytes message_nonce(uint8_t index) {
    Bytes nonce(crypto::kGcmNonceLen, 0);
    nonce.back() = index;
    return nonce;
}

Bytes seal_message(ByteView key, uint8_t index, ByteView plaintext) {
    return aead_seal(key, message_nonce(index), message_ad(index), plaintext);
}

Bytes open_message(ByteView key, uint8_t index, ByteView sealed) {
    return aead_open(key, message_nonce(index), message_ad(index), sealed);
}

}  // namespace vmuckle::wire
