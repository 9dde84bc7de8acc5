#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vmuckle/bytes.hpp"
#include "vmuckle/pki.hpp"
#include "vmuckle/qkd.hpp"
#include "vmuckle/schedule.hpp"
#include "vmuckle/suite.hpp"
#include "vmuckle/wire.hpp"

// Initiator and responder state machines for the eight-message stage:
//
//   I                                R
//   | -- m1: pk_c, pk_pq, n_I ---->  |   ephemeral key exchange
//   | <--- m2: ct_c, ct_pq, n_R ---  |
//   |        (both fetch k_q, derive handshake secrets)
//   | <--- m3: {cert_R}  tk_shs ---  |   responder authentication
//   | <--- m4: {sig_R}   tk_shs ---  |
//   | <--- m5: {tau_R}   tk_shs ---  |
//   |        (both derive MS / CATS / SATS / SecState')
//   | ---- m6: {cert_I}  tk_chs -->  |   initiator authentication
//   | ---- m7: {sig_I}   tk_chs -->  |
//   | ---- m8: {tau_I}   tk_chs -->  |
//
// A session is single-threaded; distinct sessions are independent. Completed
// stages chain: SecState of stage t+1 is stage t's sec_state_next.
namespace vmuckle::handshake {

enum class Role { initiator, responder };
enum class AuthMode { psk, cert, both };
enum class AuthMethod { psk, dss };
enum class Status { none, active, accept, reject };  // none = ⊥

std::string_view status_name(Status s);
std::string_view auth_mode_name(AuthMode m);
AuthMode auth_mode_from_name(std::string_view name);

/// Long-term authentication material for one party. Every *configured*
/// method must verify (fail-closed): psk and/or certificate + signing key.
struct AuthConfig {
    AuthMode mode = AuthMode::psk;
    Bytes psk;                                    // non-empty for psk/both
    std::string psk_id;
    std::vector<pki::HybridCertificate> local_chain;  // leaf, intermediate (cert/both)
    Bytes local_sign_key;
    std::optional<pki::HybridCertificate> trust_anchor;
};

struct SessionConfig {
    CipherSuite suite;
    Role role = Role::initiator;
    std::string local_id;
    std::string peer_id;
    AuthConfig auth;
    std::shared_ptr<qkd::Provider> qkd_provider;
    std::string qkd_stream_id;
    uint32_t qkd_index_base = 0;  // stage t uses index base + t - 1
    unsigned max_stages = 0;      // 0 = unlimited
};

struct HandshakeOutput {
    Bytes ms;
    Bytes cats;
    Bytes sats;
    unsigned stage = 0;
    std::set<AuthMethod> peer_auth;  // methods that verified; non-empty on accept
};

/// Everything one stage accumulated; kept for key export and for the
/// security-model harness, which reads ephemeral material from here.
struct StageRecord {
    Status status = Status::none;
    Errc reject_reason = Errc::state_error;
    std::vector<Bytes> sent;      // wire bytes in transmission order
    std::vector<Bytes> received;
    Bytes ss_pq, ss_c, k_q;       // ephemeral secrets of this stage
    schedule::StageKeys keys;
    HandshakeOutput output;
};

class Session {
public:
    explicit Session(SessionConfig config);

    /// Initiator only: begins the first stage, or the next one once the
    /// current stage accepted. Returns the m1 flight.
    std::vector<Bytes> start();

    /// Feeds one wire message; returns the response flight (possibly empty).
    /// Protocol failures set the stage status to reject (with a reason) and
    /// return an empty flight; they do not throw.
    std::vector<Bytes> on_message(ByteView message);

    /// True when start() (initiator) or on_message() can make progress.
    bool can_step() const;

    Role role() const { return m_config.role; }
    const std::string& local_id() const { return m_config.local_id; }
    const std::string& peer_id() const { return m_config.peer_id; }

    unsigned current_stage() const { return m_stage; }  // 1-based; 0 before start
    Status status() const;                              // current stage
    Status status(unsigned stage) const;
    Errc reject_reason() const;

    const StageRecord& record(unsigned stage) const;
    const HandshakeOutput& output(unsigned stage) const;  // stage must be accepted
    unsigned accepted_stages() const;

    /// SecState that will seed the next stage. The setter exists for state
    /// persistence and for fault-injection tests.
    const Bytes& sec_state() const { return m_sec_state; }
    void set_sec_state(Bytes s) { m_sec_state = std::move(s); }

    /// MS of an accepted stage in hex — the MACsec MSK export.
    std::string export_msk_hex(unsigned stage) const;

    void set_random_source(std::shared_ptr<RandomSource> rng) { m_rng = std::move(rng); }

private:
    void begin_stage();
    StageRecord& cur();
    const StageRecord& cur() const;

    std::vector<Bytes> handle_m1(const wire::HandshakeMessage& m1, ByteView raw);
    void handle_m2(const wire::HandshakeMessage& m2, ByteView raw);
    void handle_sealed(uint8_t index, ByteView sealed);

    void fetch_qkd_and_schedule();
    void derive_application();
    std::vector<Bytes> responder_auth_flight();
    std::vector<Bytes> initiator_auth_flight();

    Bytes auth_cert_payload() const;
    Bytes auth_signature(ByteView context_label, wire::Ctx ctx);
    bool verify_peer_cert(ByteView payload);
    bool verify_peer_signature(ByteView payload, ByteView context_label, wire::Ctx ctx);
    bool verify_peer_mac(ByteView payload, ByteView finished_key, wire::Ctx ctx);

    void reject(Errc reason);
    void accept();
    Bytes seal_and_log(uint8_t index, ByteView plaintext);

    SessionConfig m_config;
    std::shared_ptr<RandomSource> m_rng;
    unsigned m_stage = 0;
    std::vector<StageRecord> m_records;
    Bytes m_sec_state;  // ⊥ (empty) before the first stage completes

    // per-stage transient state
    wire::Transcript m_transcript;
    KemKeyPair m_eph_c, m_eph_pq;
    Bytes m_peer_sig_pk;  // leaf key extracted from the peer's chain
    uint8_t m_expected = 0;
};

/// Thread-safe id → session map.
class SessionStore {
public:
    std::shared_ptr<Session> get(const std::string& id) const;
    void put(const std::string& id, std::shared_ptr<Session> session);
    bool erase(const std::string& id);
    size_t size() const;

private:
    mutable std::mutex m_mutex;
    std::map<std::string, std::shared_ptr<Session>> m_sessions;
};

/// In-memory transport: pumps flights between two sessions, counting
/// transmitted bytes (4-byte frame + message, mirroring the TCP framing).
/// The tamper hook may mutate or drop messages in transit.
struct PumpStats {
    size_t bytes_initiator_sent = 0;
    size_t bytes_responder_sent = 0;
    size_t messages = 0;
    size_t total() const { return bytes_initiator_sent + bytes_responder_sent; }
};

/// Called with (sender role, message counter starting at 1, message). Return
/// false to drop the message.
using TamperHook = std::function<bool(Role sender, size_t index, Bytes& message)>;

struct StageResult {
    bool ok = false;                 // both sides accepted
    PumpStats stats;
    std::optional<HandshakeOutput> initiator_output;
    std::optional<HandshakeOutput> responder_output;
};

/// Drives one full stage between two compatibly configured sessions.
StageResult run_stage(Session& initiator, Session& responder, const TamperHook& tamper = {});

}  // namespace vmuckle::handshake
