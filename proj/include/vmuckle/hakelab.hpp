#pragma once

#include <deque>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vmuckle/bytes.hpp"
#include "vmuckle/handshake.hpp"

// Executable bookkeeping for the key-exchange security experiment: parties,
// sessions driven one message at a time by adversarial Send queries,
// Reveal/Test/Corrupt/Compromise answers with their ⊥-on-repeat contracts,
// matching/origin session relations, and the clean_vm / clean_cvm predicates
// evaluated retrospectively over the query log. This is a property-test
// harness for the model's definitions, not a proof.
namespace vmuckle::hakelab {

enum class QueryKind {
    create,
    send,
    reveal,
    test,
    corrupt_sk,  // pre-shared key of a party('s pairs)
    corrupt_qk,  // post-quantum long-term signing key
    corrupt_ck,  // classical long-term signing key
    compromise_qk,  // ephemeral post-quantum KEM secret
    compromise_ck,  // ephemeral classical KEM secret
    compromise_sk,  // ephemeral symmetric (QKD) key
    compromise_ss,  // per-stage secret state
};

std::string_view query_kind_name(QueryKind k);

struct Query {
    QueryKind kind;
    int i = 0;                       // party index
    int j = 0;                       // partner (create)
    handshake::Role role = handshake::Role::initiator;
    int s = 0;                       // session index
    int t = 0;                       // stage (1-based)
    std::optional<Bytes> message;    // send payload; nullopt = activation ⊥
};

/// ⊥ answers have bot = true and no data.
struct Answer {
    bool bot = false;
    Bytes data;                      // revealed/derived key material
    std::vector<Bytes> messages;     // send responses
    int session = -1;                // create result
};

struct LabConfig {
    int n_parties = 2;
    int n_sessions = 4;
    int n_stages = 3;
    handshake::AuthMode auth_mode = handshake::AuthMode::both;
    uint64_t seed = 1;
    std::string kem_c = "none";            // classical KEM for sessions
    std::string kem_pq = "TestKEM-32";
    std::string dss = "TestDSS";
};

class Lab {
public:
    explicit Lab(LabConfig config);
    Lab(Lab&&) noexcept;
    Lab& operator=(Lab&&) noexcept;
    ~Lab();

    /// Executes one adversarial query; raises index_out_of_range on bad
    /// indices, answers ⊥ per the model's repeat/invalid rules.
    Answer dispatch(const Query& q);

    // Message plumbing used by trace replay: flights produced by Send are
    // queued per (party, session) until delivered.
    size_t outbox_size(int i, int s) const;
    Bytes outbox_pop(int i, int s);
    Bytes& outbox_front(int i, int s);
    void outbox_drop(int i, int s);

    /// matching: sent(a) = received(b) and sent(b) = received(a) through
    /// stage t; prefix: sent(a) equals received(b) truncated to sent(a)'s
    /// length; origin: matching or prefix-matching.
    bool matching_sessions(int i, int s, int j, int r, int t) const;
    bool prefix_matching(int i, int s, int j, int r, int t) const;
    bool origin_session(int i, int s, int j, int r, int t) const;

    bool clean_vm(int i, int s, int t) const;
    bool clean_cvm(int i, int s, int t) const;

    /// Whether a query of this kind targeting (i, s, t) appears in the log
    /// (t is ignored for Corrupt queries).
    bool query_issued(QueryKind k, int i, int s, int t) const;

    handshake::Status session_status(int i, int s, int t) const;
    bool session_exists(int i, int s) const;
    const handshake::Session& session(int i, int s) const;
    uint8_t test_bit() const { return m_test_bit; }

private:
    struct Party;
    struct SessionSlot;
    struct LoggedQuery {
        QueryKind kind;
        int i, s, t;
        uint64_t seq;
    };

    SessionSlot* slot(int i, int s);
    const SessionSlot* slot(int i, int s) const;
    void check_party(int i) const;
    std::optional<std::pair<int, int>> matching_partner(int i, int s, int t) const;
    bool matching_through(int i, int s, int j, int r, int t_from, int t_to) const;
    bool issued(QueryKind k, int i, int s, int t) const;
    bool issued_before(QueryKind k, int party, uint64_t seq) const;
    std::optional<uint64_t> accept_seq(int i, int s, int t) const;
    bool condition3(int i, int s, int t, bool classical) const;
    bool long_term_condition(int i, int s, int t) const;

    LabConfig m_config;
    CipherSuite m_suite;
    std::vector<std::unique_ptr<Party>> m_parties;
    std::unique_ptr<pki::HybridCertificate> m_anchor;
    std::shared_ptr<qkd::Provider> m_qkd;
    std::vector<LoggedQuery> m_log;
    uint64_t m_next_seq = 1;
    uint8_t m_test_bit = 0;
    bool m_test_used = false;
    std::unique_ptr<RandomSource> m_rng;
};

// --- Trace replay -------------------------------------------------------------

/// One replayed line: the input line, what happened, and whether an inline
/// expectation (if any) held.
struct TraceLine {
    std::string text;
    std::string result;
    bool has_assertion = false;
    bool passed = true;
};

struct TraceResult {
    std::vector<TraceLine> lines;
    bool ok = true;  // all assertions held
};

/// Replays the s-expression-like trace format of docs/wire-format.md.
TraceResult replay_trace(std::istream& in, const LabConfig& config);
TraceResult replay_trace_text(const std::string& text, const LabConfig& config);

// --- Random trace generation for property tests --------------------------------

struct TraceGenConfig {
    uint64_t seed = 1;
    int stages = 2;
    double p_reveal = 0.3;
    double p_compromise = 0.4;
    double p_corrupt = 0.3;
};

/// Runs honest sessions to completion while issuing a random schedule of
/// Reveal/Corrupt/Compromise queries; returns the populated lab for
/// predicate checks.
std::unique_ptr<Lab> run_random_trace(const LabConfig& lab_config, const TraceGenConfig& gen);

}  // namespace vmuckle::hakelab
