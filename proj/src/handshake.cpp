#include "vmuckle/handshake.hpp"

#include <ctime>
#include <deque>

#include "vmuckle/errors.hpp"

namespace vmuckle::handshake {

namespace {

int64_t now_epoch() {
    return static_cast<int64_t>(std::time(nullptr));
}

}  // namespace

std::string_view status_name(Status s) {
    switch (s) {
        case Status::none: return "none";
        case Status::active: return "active";
        case Status::accept: return "accept";
        case Status::reject: return "reject";
    }
    return "?";
}

std::string_view auth_mode_name(AuthMode m) {
    switch (m) {
        case AuthMode::psk: return "psk";
        case AuthMode::cert: return "cert";
        case AuthMode::both: return "both";
    }
    return "?";
}

AuthMode auth_mode_from_name(std::string_view name) {
    if (name == "psk") return AuthMode::psk;
    if (name == "cert") return AuthMode::cert;
    if (name == "both") return AuthMode::both;
    raise(Errc::config_mismatch, "unknown auth mode " + std::string(name));
}

Session::Session(SessionConfig config) : m_config(std::move(config)) {
    const AuthConfig& auth = m_config.auth;
    const bool uses_psk = auth.mode == AuthMode::psk || auth.mode == AuthMode::both;
    const bool uses_dss = auth.mode == AuthMode::cert || auth.mode == AuthMode::both;

    if (uses_psk && auth.psk.empty())
        raise(Errc::config_mismatch, "psk authentication configured without a psk");
    if (uses_dss) {
        if (auth.local_chain.size() != 2 || auth.local_sign_key.empty() || !auth.trust_anchor)
            raise(Errc::config_mismatch,
                  "certificate authentication needs leaf+intermediate, signing key and anchor");
        if (m_config.suite.dss.is_none())
            raise(Errc::config_mismatch, "certificate authentication needs a signature scheme");
    }
    if (!auth.local_chain.empty() && auth.local_sign_key.empty())
        raise(Errc::config_mismatch, "certificate chain without matching signing key");
    if (!auth.local_sign_key.empty() && auth.local_chain.empty())
        raise(Errc::config_mismatch, "signing key without certificate chain");
    if (!uses_psk && !uses_dss)
        raise(Errc::config_mismatch, "at least one authentication method must be configured");

    m_rng = std::make_shared<OsRandom>();
}

StageRecord& Session::cur() {
    if (m_records.empty()) raise(Errc::state_error, "no stage in progress");
    return m_records.back();
}

const StageRecord& Session::cur() const {
    if (m_records.empty()) raise(Errc::state_error, "no stage in progress");
    return m_records.back();
}

Status Session::status() const {
    return m_records.empty() ? Status::none : m_records.back().status;
}

Status Session::status(unsigned stage) const {
    if (stage == 0 || stage > m_records.size()) return Status::none;
    return m_records[stage - 1].status;
}

Errc Session::reject_reason() const {
    return cur().reject_reason;
}

const StageRecord& Session::record(unsigned stage) const {
    if (stage == 0 || stage > m_records.size())
        raise(Errc::index_out_of_range, "no such stage record");
    return m_records[stage - 1];
}

const HandshakeOutput& Session::output(unsigned stage) const {
    const StageRecord& rec = record(stage);
    if (rec.status != Status::accept) raise(Errc::state_error, "stage did not accept");
    return rec.output;
}

unsigned Session::accepted_stages() const {
    unsigned n = 0;
    for (const auto& rec : m_records)
        if (rec.status == Status::accept) n++;
    return n;
}

std::string Session::export_msk_hex(unsigned stage) const {
    return to_hex(view(output(stage).ms));
}

bool Session::can_step() const {
    if (m_config.max_stages != 0 && m_stage >= m_config.max_stages && status() != Status::active)
        return false;
    if (m_records.empty()) return true;  // first stage can begin
    if (status() == Status::active) return true;
    return status() == Status::accept;  // next stage can begin
}

void Session::begin_stage() {
    if (!m_records.empty() && m_records.back().status == Status::active)
        raise(Errc::state_error, "previous stage still active");
    if (m_config.max_stages != 0 && m_stage >= m_config.max_stages)
        raise(Errc::state_error, "stage limit reached");
    m_stage++;
    m_records.emplace_back();
    m_records.back().status = Status::active;
    m_transcript = wire::Transcript{};
    m_eph_c = {};
    m_eph_pq = {};
    m_peer_sig_pk.clear();
    m_expected = m_config.role == Role::initiator ? 2 : 1;
}

void Session::reject(Errc reason) {
    StageRecord& rec = cur();
    rec.status = Status::reject;
    rec.reject_reason = reason;
}

void Session::accept() {
    StageRecord& rec = cur();
    rec.status = Status::accept;
    rec.output.ms = rec.keys.ms;
    rec.output.cats = rec.keys.cats;
    rec.output.sats = rec.keys.sats;
    rec.output.stage = m_stage;
    if (m_config.auth.mode != AuthMode::cert) rec.output.peer_auth.insert(AuthMethod::psk);
    if (m_config.auth.mode != AuthMode::psk) rec.output.peer_auth.insert(AuthMethod::dss);
    m_sec_state = rec.keys.sec_state_next;
}

std::vector<Bytes> Session::start() {
    if (m_config.role != Role::initiator)
        raise(Errc::state_error, "only the initiator starts a stage");
    if (!m_records.empty() && m_records.back().status != Status::accept)
        raise(Errc::state_error, "cannot start a new stage now");
    begin_stage();

    Bytes n_i = m_rng->bytes(m_config.suite.nonce_len());
    m_eph_pq = kem_keygen(m_config.suite.kem_pq, m_config.suite.security_param, *m_rng);
    if (!m_config.suite.kem_c.is_none())
        m_eph_c = kem_keygen(m_config.suite.kem_c, m_config.suite.security_param, *m_rng);
    else
        m_eph_c = {{}, {}, m_config.suite.kem_c};

    Bytes m1 = wire::encode(
        wire::make_m1(m_eph_c.public_key, m_eph_pq.public_key, std::move(n_i)));
    m_transcript.record(1, view(m1));
    cur().sent.push_back(m1);
    return {m1};
}

std::vector<Bytes> Session::on_message(ByteView message) {
    // Responder sessions roll into the next stage when m1 arrives after an
    // accepted stage.
    if (m_config.role == Role::responder &&
        (m_records.empty() || m_records.back().status == Status::accept)) {
        if (m_config.max_stages != 0 && m_stage >= m_config.max_stages) return {};
        begin_stage();
    }
    if (m_records.empty() || cur().status != Status::active) return {};

    cur().received.push_back(Bytes(message.begin(), message.end()));
    try {
        if (m_expected == 1 || m_expected == 2) {
            wire::HandshakeMessage msg = wire::decode(message);
            if (msg.index != m_expected) {
                reject(Errc::malformed_message);
                return {};
            }
            if (msg.index == 1) return handle_m1(msg, message);
            handle_m2(msg, message);
            m_expected = 3;
            return {};
        }
        handle_sealed(m_expected, message);
        if (cur().status != Status::active) return {};  // rejected inside
        if (m_config.role == Role::initiator && m_expected == 5) {
            derive_application();
            return initiator_auth_flight();
        }
        if (m_config.role == Role::responder && m_expected == 8) {
            accept();
            return {};
        }
        m_expected++;
        return {};
    } catch (const Error& e) {
        reject(e.code());
        return {};
    }
}

std::vector<Bytes> Session::handle_m1(const wire::HandshakeMessage& msg, ByteView raw) {
    const auto& m1 = std::get<wire::M1>(msg.body);
    m_transcript.record(1, raw);

    Bytes n_r = m_rng->bytes(m_config.suite.nonce_len());
    Bytes ct_c, ss_c;
    if (!m1.pk_c.empty() && !m_config.suite.kem_c.is_none()) {
        auto enc = kem_encaps(m_config.suite.kem_c, view(m1.pk_c), *m_rng);
        ct_c = std::move(enc.ciphertext);
        ss_c = std::move(enc.shared_secret);
    }
    auto enc_pq = kem_encaps(m_config.suite.kem_pq, view(m1.pk_pq), *m_rng);

    StageRecord& rec = cur();
    rec.ss_c = ss_c;
    rec.ss_pq = enc_pq.shared_secret;

    Bytes m2 = wire::encode(wire::make_m2(std::move(ct_c), std::move(enc_pq.ciphertext),
                                          std::move(n_r)));
    m_transcript.record(2, view(m2));
    rec.sent.push_back(m2);

    fetch_qkd_and_schedule();
    std::vector<Bytes> flight = responder_auth_flight();
    derive_application();  // MS is available after m5 on both sides
    flight.insert(flight.begin(), std::move(m2));
    m_expected = 6;
    return flight;
}

void Session::handle_m2(const wire::HandshakeMessage& msg, ByteView raw) {
    const auto& m2 = std::get<wire::M2>(msg.body);
    const bool classical = !m_config.suite.kem_c.is_none();
    if (classical && m2.ct_c.empty())
        raise(Errc::config_mismatch, "responder skipped the classical encapsulation");
    if (!classical && !m2.ct_c.empty())
        raise(Errc::config_mismatch, "unexpected classical ciphertext");

    StageRecord& rec = cur();
    rec.ss_pq = kem_decaps(m_config.suite.kem_pq, view(m_eph_pq.secret_key), view(m2.ct_pq));
    if (classical)
        rec.ss_c = kem_decaps(m_config.suite.kem_c, view(m_eph_c.secret_key), view(m2.ct_c));
    m_transcript.record(2, raw);
    fetch_qkd_and_schedule();
}

void Session::fetch_qkd_and_schedule() {
    StageRecord& rec = cur();
    if (!m_config.qkd_provider) raise(Errc::qkd_unavailable, "no QKD provider configured");
    try {
        qkd::KeyHandle handle{m_config.qkd_stream_id, m_config.qkd_index_base + m_stage - 1};
        rec.k_q = m_config.qkd_provider->get_key(handle, m_config.suite.security_param);
    } catch (const Error& e) {
        if (e.code() == Errc::wrong_length || e.code() == Errc::bad_length) throw;
        raise(Errc::qkd_unavailable, e.what());
    }

    schedule::StageInputs in;
    in.ss_c = rec.ss_c;
    in.ss_pq = rec.ss_pq;
    in.k_q = rec.k_q;
    in.sec_state = m_sec_state;
    in.security_param = m_config.suite.security_param;
    rec.keys = schedule::derive_handshake_secrets(in, m_transcript);
}

void Session::derive_application() {
    schedule::derive_application_secrets(cur().keys, m_transcript);
}

Bytes Session::auth_cert_payload() const {
    if (m_config.auth.mode == AuthMode::psk) return {};
    return pki::encode_presented_chain(m_config.auth.local_chain[0],
                                       m_config.auth.local_chain[1]);
}

Bytes Session::auth_signature(ByteView context_label, wire::Ctx ctx) {
    if (m_config.auth.mode == AuthMode::psk) return {};
    Bytes msg = concat({context_label, view(m_transcript.context(ctx))});
    return dss_sign(m_config.suite.dss, view(m_config.auth.local_sign_key), view(msg));
}

Bytes Session::seal_and_log(uint8_t index, ByteView plaintext_payload) {
    Bytes plaintext = wire::encode(wire::make_opaque(index, Bytes(plaintext_payload.begin(),
                                                                  plaintext_payload.end())));
    m_transcript.record(index, view(plaintext));
    ByteView key = index <= 5 ? view(cur().keys.tk_shs) : view(cur().keys.tk_chs);
    Bytes sealed = wire::seal_message(key, index, view(plaintext));
    cur().sent.push_back(sealed);
    return sealed;
}

std::vector<Bytes> Session::responder_auth_flight() {
    std::vector<Bytes> flight;
    // m3: certificate chain (or empty placeholder), recorded before sigma is
    // computed so H2 covers it.
    flight.push_back(seal_and_log(3, view(auth_cert_payload())));
    // m4: sigma_R over l13 || H2
    Bytes sig = auth_signature(schedule::server_certificate_verify_label(), wire::Ctx::h2);
    flight.push_back(seal_and_log(4, view(sig)));
    // m5: tau_R over H3 under F(psk, fk_S); always sent — with an empty psk it
    // still provides key confirmation.
    Bytes key = schedule::mac_key(view(m_config.auth.psk), view(cur().keys.fk_s));
    Bytes tag = mac_auth(view(key), view(m_transcript.context(wire::Ctx::h3)));
    flight.push_back(seal_and_log(5, view(tag)));
    return flight;
}

std::vector<Bytes> Session::initiator_auth_flight() {
    std::vector<Bytes> flight;
    flight.push_back(seal_and_log(6, view(auth_cert_payload())));
    Bytes sig = auth_signature(schedule::client_certificate_verify_label(), wire::Ctx::h5);
    flight.push_back(seal_and_log(7, view(sig)));
    Bytes key = schedule::mac_key(view(m_config.auth.psk), view(cur().keys.fk_c));
    Bytes tag = mac_auth(view(key), view(m_transcript.context(wire::Ctx::h6)));
    flight.push_back(seal_and_log(8, view(tag)));
    accept();
    return flight;
}

bool Session::verify_peer_cert(ByteView payload) {
    if (m_config.auth.mode == AuthMode::psk) {
        if (!payload.empty()) {
            reject(Errc::config_mismatch);
            return false;
        }
        return true;
    }
    if (payload.empty()) {
        reject(Errc::cert_invalid);
        return false;
    }
    try {
        auto [leaf, intermediate] = pki::decode_presented_chain(payload);
        pki::CertChain chain{std::move(leaf), std::move(intermediate),
                             *m_config.auth.trust_anchor};
        auto result = pki::verify_chain(chain, *m_config.auth.trust_anchor, now_epoch());
        if (!result.ok) {
            reject(Errc::cert_invalid);
            return false;
        }
        if (chain.leaf.pq_alg != m_config.suite.dss) {
            reject(Errc::cert_invalid);
            return false;
        }
        if (!m_config.peer_id.empty() && chain.leaf.subject != m_config.peer_id) {
            reject(Errc::cert_invalid);
            return false;
        }
        m_peer_sig_pk = chain.leaf.pq_pk;
        return true;
    } catch (const Error&) {
        reject(Errc::cert_invalid);
        return false;
    }
}

bool Session::verify_peer_signature(ByteView payload, ByteView context_label, wire::Ctx ctx) {
    if (m_config.auth.mode == AuthMode::psk) {
        if (!payload.empty()) {
            reject(Errc::config_mismatch);
            return false;
        }
        return true;
    }
    Bytes msg = concat({context_label, view(m_transcript.context(ctx))});
    if (!dss_verify(m_config.suite.dss, view(m_peer_sig_pk), view(msg), payload)) {
        reject(Errc::signature_invalid);
        return false;
    }
    return true;
}

bool Session::verify_peer_mac(ByteView payload, ByteView finished_key, wire::Ctx ctx) {
    Bytes key = schedule::mac_key(view(m_config.auth.psk), finished_key);
    if (!mac_verify(view(key), view(m_transcript.context(ctx)), payload)) {
        reject(Errc::mac_invalid);
        return false;
    }
    return true;
}

void Session::handle_sealed(uint8_t index, ByteView sealed) {
    ByteView key = index <= 5 ? view(cur().keys.tk_shs) : view(cur().keys.tk_chs);
    Bytes plaintext = wire::open_message(key, index, sealed);  // aead_auth_failure on tamper
    wire::HandshakeMessage msg = wire::decode(view(plaintext));
    if (msg.index != index) raise(Errc::malformed_message, "sealed message index mismatch");
    const Bytes& payload = std::get<wire::Opaque>(msg.body).payload;

    // sigma covers H2/H5 (transcript through m3/m6) and tau covers H3/H6
    // (through m4/m7), so each message is recorded before its check runs.
    m_transcript.record(index, view(plaintext));

    switch (index) {
        case 3:
        case 6:
            verify_peer_cert(view(payload));
            break;
        case 4:
            verify_peer_signature(view(payload), schedule::server_certificate_verify_label(),
                                  wire::Ctx::h2);
            break;
        case 7:
            verify_peer_signature(view(payload), schedule::client_certificate_verify_label(),
                                  wire::Ctx::h5);
            break;
        case 5:
            verify_peer_mac(view(payload), view(cur().keys.fk_s), wire::Ctx::h3);
            break;
        case 8:
            verify_peer_mac(view(payload), view(cur().keys.fk_c), wire::Ctx::h6);
            break;
        default:
            raise(Errc::state_error, "unexpected sealed index");
    }
}

std::shared_ptr<Session> SessionStore::get(const std::string& id) const {
    std::lock_guard lock(m_mutex);
    auto it = m_sessions.find(id);
    return it == m_sessions.end() ? nullptr : it->second;
}

void SessionStore::put(const std::string& id, std::shared_ptr<Session> session) {
    std::lock_guard lock(m_mutex);
    m_sessions[id] = std::move(session);
}

bool SessionStore::erase(const std::string& id) {
    std::lock_guard lock(m_mutex);
    return m_sessions.erase(id) > 0;
}

size_t SessionStore::size() const {
    std::lock_guard lock(m_mutex);
    return m_sessions.size();
}

StageResult run_stage(Session& initiator, Session& responder, const TamperHook& tamper) {
    StageResult result;
    std::deque<Bytes> to_responder;
    std::deque<Bytes> to_initiator;
    size_t counter = 0;

    auto push = [&](Role sender, std::vector<Bytes> flight) {
        for (Bytes& m : flight) {
            counter++;
            const size_t framed = 4 + m.size();
            if (sender == Role::initiator)
                result.stats.bytes_initiator_sent += framed;
            else
                result.stats.bytes_responder_sent += framed;
            result.stats.messages++;
            bool keep = true;
            if (tamper) keep = tamper(sender, counter, m);
            if (!keep) continue;
            (sender == Role::initiator ? to_responder : to_initiator).push_back(std::move(m));
        }
    };

    push(Role::initiator, initiator.start());
    while (!to_responder.empty() || !to_initiator.empty()) {
        if (!to_responder.empty()) {
            Bytes m = std::move(to_responder.front());
            to_responder.pop_front();
            push(Role::responder, responder.on_message(view(m)));
        } else {
            Bytes m = std::move(to_initiator.front());
            to_initiator.pop_front();
            push(Role::initiator, initiator.on_message(view(m)));
        }
        if (initiator.status() == Status::reject || responder.status() == Status::reject) break;
    }

    result.ok = initiator.status() == Status::accept && responder.status() == Status::accept &&
                initiator.current_stage() == responder.current_stage();
    if (initiator.status() == Status::accept)
        result.initiator_output = initiator.output(initiator.current_stage());
    if (responder.status() == Status::accept)
        result.responder_output = responder.output(responder.current_stage());
    return result;
}

}  // namespace vmuckle::handshake
