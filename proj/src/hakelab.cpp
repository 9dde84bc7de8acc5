#include "vmuckle/hakelab.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "vmuckle/errors.hpp"

namespace vmuckle::hakelab {

using handshake::AuthMode;
using handshake::Role;
using handshake::Session;
using handshake::Status;

namespace {

Bytes seed_bytes(uint64_t seed, std::string_view tag, uint32_t a = 0, uint32_t b = 0) {
    Bytes out = to_bytes(tag);
    append_u64(out, seed);
    append_u32(out, a);
    append_u32(out, b);
    return out;
}

}  // namespace

std::string_view query_kind_name(QueryKind k) {
    switch (k) {
        case QueryKind::create: return "create";
        case QueryKind::send: return "send";
        case QueryKind::reveal: return "reveal";
        case QueryKind::test: return "test";
        case QueryKind::corrupt_sk: return "corrupt-sk";
        case QueryKind::corrupt_qk: return "corrupt-qk";
        case QueryKind::corrupt_ck: return "corrupt-ck";
        case QueryKind::compromise_qk: return "compromise-qk";
        case QueryKind::compromise_ck: return "compromise-ck";
        case QueryKind::compromise_sk: return "compromise-sk";
        case QueryKind::compromise_ss: return "compromise-ss";
    }
    return "?";
}

struct Lab::SessionSlot {
    std::unique_ptr<Session> session;
    int partner = 0;
    Role role = Role::initiator;
    std::deque<Bytes> outbox;
    std::set<int> revealed_stages;                       // answered Reveal targets
    std::set<std::pair<QueryKind, int>> compromised;     // answered Compromise targets
    std::map<int, uint64_t> accept_seq;                  // stage -> seq of acceptance
};

struct Lab::Party {
    std::string name;
    DssKeyPair pq_sig;   // long-term post-quantum identity (CorruptQK)
    DssKeyPair cl_sig;   // long-term classical identity (CorruptCK)
    std::map<int, Bytes> psks;  // partner -> shared psk (CorruptSK)
    std::vector<pki::HybridCertificate> chain;  // leaf, intermediate
    bool corrupted_sk = false;
    bool corrupted_qk = false;
    bool corrupted_ck = false;
    std::vector<std::unique_ptr<SessionSlot>> sessions;
};

Lab::Lab(LabConfig config) : m_config(std::move(config)) {
    m_suite = make_suite(m_config.kem_c, m_config.kem_pq, m_config.dss);
    m_rng = std::make_unique<DeterministicRandom>(view(seed_bytes(m_config.seed, "lab-rng")));
    m_test_bit = m_rng->bytes(1)[0] & 1;

    DeterministicRandom key_rng{view(seed_bytes(m_config.seed, "lab-keys"))};
    const AlgorithmId cl_alg = make_alg(AlgKind::signature, "EdDSA");
    const pki::Validity validity{0, 4102444800};  // far-future expiry for lab runs

    pki::CaKeys root = pki::make_ca_keys("lab-root", m_suite.dss, cl_alg, key_rng);
    pki::HybridCertificate root_cert = pki::self_issue(root, validity);
    pki::CaKeys ica = pki::make_ca_keys("lab-ica", m_suite.dss, cl_alg, key_rng);
    pki::HybridCertificate ica_cert =
        issue(root, {ica.name, ica.pq_alg, ica.pq_pk, ica.cl_alg, ica.cl_pk}, validity);
    m_anchor = std::make_unique<pki::HybridCertificate>(root_cert);
    m_qkd = std::make_shared<qkd::Simulator>(view(seed_bytes(m_config.seed, "lab-qkd-seed")));

    for (int i = 0; i < m_config.n_parties; i++) {
        auto party = std::make_unique<Party>();
        party->name = "P" + std::to_string(i);
        party->pq_sig = dss_keygen(m_suite.dss, key_rng);
        party->cl_sig = dss_keygen(cl_alg, key_rng);
        pki::HybridCertificate leaf =
            issue(ica,
                  {party->name, m_suite.dss, party->pq_sig.public_key, cl_alg,
                   party->cl_sig.public_key},
                  validity);
        party->chain = {std::move(leaf), ica_cert};
        party->sessions.resize(static_cast<size_t>(m_config.n_sessions));
        m_parties.push_back(std::move(party));
    }
    for (int i = 0; i < m_config.n_parties; i++)
        for (int j = i + 1; j < m_config.n_parties; j++) {
            Bytes psk = key_rng.bytes(32);
            m_parties[static_cast<size_t>(i)]->psks[j] = psk;
            m_parties[static_cast<size_t>(j)]->psks[i] = psk;
        }
}

Lab::Lab(Lab&&) noexcept = default;
Lab& Lab::operator=(Lab&&) noexcept = default;
Lab::~Lab() = default;

void Lab::check_party(int i) const {
    if (i < 0 || i >= m_config.n_parties) raise(Errc::index_out_of_range, "party index");
}

Lab::SessionSlot* Lab::slot(int i, int s) {
    check_party(i);
    if (s < 0 || s >= m_config.n_sessions) raise(Errc::index_out_of_range, "session index");
    return m_parties[static_cast<size_t>(i)]->sessions[static_cast<size_t>(s)].get();
}

const Lab::SessionSlot* Lab::slot(int i, int s) const {
    return const_cast<Lab*>(this)->slot(i, s);
}

bool Lab::session_exists(int i, int s) const {
    return slot(i, s) != nullptr;
}

const Session& Lab::session(int i, int s) const {
    const SessionSlot* sl = slot(i, s);
    if (!sl) raise(Errc::state_error, "session not created");
    return *sl->session;
}

handshake::Status Lab::session_status(int i, int s, int t) const {
    const SessionSlot* sl = slot(i, s);
    if (!sl) return Status::none;
    return sl->session->status(static_cast<unsigned>(t));
}

Answer Lab::dispatch(const Query& q) {
    const uint64_t seq = m_next_seq++;
    m_log.push_back({q.kind, q.i, q.s, q.t, seq});

    Answer bot{true, {}, {}, -1};
    switch (q.kind) {
        case QueryKind::create: {
            check_party(q.i);
            check_party(q.j);
            if (q.i == q.j) raise(Errc::index_out_of_range, "self-partnered session");
            if (q.s < 0 || q.s >= m_config.n_sessions)
                raise(Errc::index_out_of_range, "session index");
            Party& party = *m_parties[static_cast<size_t>(q.i)];
            if (party.sessions[static_cast<size_t>(q.s)]) return bot;  // already exists

            handshake::SessionConfig sc;
            sc.suite = m_suite;
            sc.role = q.role;
            sc.local_id = party.name;
            sc.peer_id = "P" + std::to_string(q.j);
            sc.auth.mode = m_config.auth_mode;
            if (m_config.auth_mode != AuthMode::cert) sc.auth.psk = party.psks.at(q.j);
            if (m_config.auth_mode != AuthMode::psk) {
                sc.auth.local_chain = party.chain;
                sc.auth.local_sign_key = party.pq_sig.secret_key;
                sc.auth.trust_anchor = *m_anchor;
            }
            sc.qkd_provider = m_qkd;
            const int lo = std::min(q.i, q.j), hi = std::max(q.i, q.j);
            sc.qkd_stream_id =
                "lab-" + std::to_string(lo) + "-" + std::to_string(hi) + "-" + std::to_string(q.s);
            sc.max_stages = static_cast<unsigned>(m_config.n_stages);

            auto slot = std::make_unique<SessionSlot>();
            slot->partner = q.j;
            slot->role = q.role;
            slot->session = std::make_unique<Session>(std::move(sc));
            slot->session->set_random_source(std::make_shared<DeterministicRandom>(view(
                seed_bytes(m_config.seed, "lab-session", static_cast<uint32_t>(q.i),
                           static_cast<uint32_t>(q.s)))));
            party.sessions[static_cast<size_t>(q.s)] = std::move(slot);
            return {false, {}, {}, q.s};
        }
        case QueryKind::send: {
            SessionSlot* sl = slot(q.i, q.s);
            if (!sl) return bot;
            Session& ses = *sl->session;
            std::vector<Bytes> flight;
            if (!q.message || q.message->empty()) {
                // activation ⊥: the initiator begins its first or next stage
                if (ses.role() != Role::initiator || !ses.can_step() ||
                    ses.status() == Status::active)
                    return bot;
                flight = ses.start();
            } else {
                if (!ses.can_step() || ses.status() == Status::reject) return bot;
                flight = ses.on_message(view(*q.message));
            }
            for (const Bytes& m : flight) sl->outbox.push_back(m);
            for (unsigned t = 1; t <= ses.current_stage(); t++)
                if (ses.status(t) == Status::accept && !sl->accept_seq.count(static_cast<int>(t)))
                    sl->accept_seq[static_cast<int>(t)] = seq;
            return {false, {}, std::move(flight), -1};
        }
        case QueryKind::reveal: {
            SessionSlot* sl = slot(q.i, q.s);
            if (!sl) return bot;
            if (sl->session->status(static_cast<unsigned>(q.t)) != Status::accept) return bot;
            if (!sl->revealed_stages.insert(q.t).second) return bot;
            return {false, sl->session->output(static_cast<unsigned>(q.t)).ms, {}, -1};
        }
        case QueryKind::test: {
            SessionSlot* sl = slot(q.i, q.s);
            if (!sl) return bot;
            if (m_test_used) return bot;
            if (sl->session->status(static_cast<unsigned>(q.t)) != Status::accept) return bot;
            m_test_used = true;
            if (m_test_bit == 1)
                return {false, sl->session->output(static_cast<unsigned>(q.t)).ms, {}, -1};
            return {false, m_rng->bytes(crypto::kSha384Len), {}, -1};
        }
        case QueryKind::corrupt_sk: {
            check_party(q.i);
            Party& party = *m_parties[static_cast<size_t>(q.i)];
            if (party.corrupted_sk) return bot;
            party.corrupted_sk = true;
            Bytes all;
            for (const auto& [partner, psk] : party.psks) append(all, view(psk));
            return {false, std::move(all), {}, -1};
        }
        case QueryKind::corrupt_qk: {
            check_party(q.i);
            Party& party = *m_parties[static_cast<size_t>(q.i)];
            if (party.corrupted_qk) return bot;
            party.corrupted_qk = true;
            return {false, party.pq_sig.secret_key, {}, -1};
        }
        case QueryKind::corrupt_ck: {
            check_party(q.i);
            Party& party = *m_parties[static_cast<size_t>(q.i)];
            if (party.corrupted_ck) return bot;
            party.corrupted_ck = true;
            return {false, party.cl_sig.secret_key, {}, -1};
        }
        case QueryKind::compromise_qk:
        case QueryKind::compromise_ck:
        case QueryKind::compromise_sk:
        case QueryKind::compromise_ss: {
            SessionSlot* sl = slot(q.i, q.s);
            if (!sl) return bot;
            if (q.t < 1 || q.t > m_config.n_stages)
                raise(Errc::index_out_of_range, "stage index");
            Bytes material;
            const unsigned have = sl->session->current_stage();
            for (unsigned u = 1; u <= std::min<unsigned>(static_cast<unsigned>(q.t), have); u++) {
                const auto& rec = sl->session->record(u);
                switch (q.kind) {
                    case QueryKind::compromise_qk: append(material, view(rec.ss_pq)); break;
                    case QueryKind::compromise_ck: append(material, view(rec.ss_c)); break;
                    case QueryKind::compromise_sk: append(material, view(rec.k_q)); break;
                    case QueryKind::compromise_ss:
                        append(material, view(rec.keys.sec_state_next));
                        break;
                    default: break;
                }
            }
            if (material.empty()) return bot;
            if (!sl->compromised.insert({q.kind, q.t}).second) return bot;
            return {false, std::move(material), {}, -1};
        }
    }
    raise(Errc::state_error, "unhandled query kind");
}

size_t Lab::outbox_size(int i, int s) const {
    const SessionSlot* sl = slot(i, s);
    return sl ? sl->outbox.size() : 0;
}

Bytes Lab::outbox_pop(int i, int s) {
    SessionSlot* sl = slot(i, s);
    if (!sl || sl->outbox.empty()) raise(Errc::state_error, "outbox empty");
    Bytes m = std::move(sl->outbox.front());
    sl->outbox.pop_front();
    return m;
}

Bytes& Lab::outbox_front(int i, int s) {
    SessionSlot* sl = slot(i, s);
    if (!sl || sl->outbox.empty()) raise(Errc::state_error, "outbox empty");
    return sl->outbox.front();
}

void Lab::outbox_drop(int i, int s) {
    SessionSlot* sl = slot(i, s);
    if (!sl || sl->outbox.empty()) raise(Errc::state_error, "outbox empty");
    sl->outbox.pop_front();
}

namespace {

// m_s[t] / m_r[t]: everything a session sent/received up to stage t.
std::vector<Bytes> flatten(const Session& ses, int t, bool sent) {
    std::vector<Bytes> out;
    const unsigned last = std::min<unsigned>(static_cast<unsigned>(t), ses.current_stage());
    for (unsigned u = 1; u <= last; u++) {
        const auto& rec = ses.record(u);
        const auto& log = sent ? rec.sent : rec.received;
        out.insert(out.end(), log.begin(), log.end());
    }
    return out;
}

}  // namespace

bool Lab::matching_sessions(int i, int s, int j, int r, int t) const {
    const SessionSlot* a = slot(i, s);
    const SessionSlot* b = slot(j, r);
    if (!a || !b) return false;
    return flatten(*a->session, t, true) == flatten(*b->session, t, false) &&
           flatten(*b->session, t, true) == flatten(*a->session, t, false);
}

bool Lab::prefix_matching(int i, int s, int j, int r, int t) const {
    const SessionSlot* a = slot(i, s);
    const SessionSlot* b = slot(j, r);
    if (!a || !b) return false;
    std::vector<Bytes> sent = flatten(*a->session, t, true);
    std::vector<Bytes> recv = flatten(*b->session, t, false);
    if (recv.size() < sent.size()) return false;
    recv.resize(sent.size());
    return sent == recv;
}

bool Lab::origin_session(int i, int s, int j, int r, int t) const {
    return matching_sessions(i, s, j, r, t) || prefix_matching(i, s, j, r, t);
}

std::optional<std::pair<int, int>> Lab::matching_partner(int i, int s, int t) const {
    for (int j = 0; j < m_config.n_parties; j++)
        for (int r = 0; r < m_config.n_sessions; r++) {
            if (j == i && r == s) continue;
            if (slot(j, r) && matching_sessions(i, s, j, r, t)) return std::make_pair(j, r);
        }
    return std::nullopt;
}

bool Lab::matching_through(int i, int s, int j, int r, int t_from, int t_to) const {
    for (int u = t_from; u <= t_to; u++)
        if (!matching_sessions(i, s, j, r, u)) return false;
    return true;
}

bool Lab::issued(QueryKind k, int i, int s, int t) const {
    for (const auto& entry : m_log)
        if (entry.kind == k && entry.i == i && entry.s == s && entry.t == t) return true;
    return false;
}

bool Lab::issued_before(QueryKind k, int party, uint64_t seq) const {
    for (const auto& entry : m_log)
        if (entry.kind == k && entry.i == party && entry.seq < seq) return true;
    return false;
}

bool Lab::query_issued(QueryKind k, int i, int s, int t) const {
    if (k == QueryKind::corrupt_sk || k == QueryKind::corrupt_qk || k == QueryKind::corrupt_ck) {
        for (const auto& entry : m_log)
            if (entry.kind == k && entry.i == i) return true;
        return false;
    }
    return issued(k, i, s, t);
}

std::optional<uint64_t> Lab::accept_seq(int i, int s, int t) const {
    const SessionSlot* sl = slot(i, s);
    if (!sl) return std::nullopt;
    auto it = sl->accept_seq.find(t);
    if (it == sl->accept_seq.end()) return std::nullopt;
    return it->second;
}

// Condition 3: with a matching session, at least one compromise pattern must
// be absent — (i)/(ii) directly at stage t, (iii)/(iv) via a clean earlier
// stage t' with an uncompromised SecState chain; clean_cvm adds the
// classical analogues (v)/(vi).
bool Lab::condition3(int i, int s, int t, bool classical) const {
    auto partner = matching_partner(i, s, t);
    if (!partner) return true;
    const auto [j, r] = *partner;

    auto no_compromise_at = [&](QueryKind k, int stage) {
        return !issued(k, i, s, stage) && !issued(k, j, r, stage);
    };

    if (no_compromise_at(QueryKind::compromise_qk, t)) return true;       // (i)
    if (no_compromise_at(QueryKind::compromise_sk, t)) return true;       // (ii)
    if (classical && no_compromise_at(QueryKind::compromise_ck, t)) return true;  // (v)

    std::vector<QueryKind> chained{QueryKind::compromise_qk, QueryKind::compromise_sk};
    if (classical) chained.push_back(QueryKind::compromise_ck);  // (vi)

    for (QueryKind kind : chained) {
        for (int t_prime = 1; t_prime <= t; t_prime++) {
            if (!matching_through(i, s, j, r, t_prime, t)) continue;
            if (!no_compromise_at(kind, t_prime)) continue;
            bool ok = true;
            for (int u = t_prime; u <= t && ok; u++) {
                if (u != t_prime && !no_compromise_at(QueryKind::compromise_ss, u)) ok = false;
                if (issued(QueryKind::reveal, i, s, u) || issued(QueryKind::reveal, j, r, u))
                    ok = false;
            }
            if (ok) return true;  // (iii)/(iv)/(vi)
        }
    }
    return false;
}

// Conditions 4 and 5: for the session (and any origin session), at least one
// of the pair {post-quantum long-term key, pair psk} stayed uncorrupted
// until that session's stage-t acceptance.
bool Lab::long_term_condition(int i, int s, int t) const {
    auto check = [&](int party, int session_idx) {
        const SessionSlot* sl = slot(party, session_idx);
        if (!sl) return true;
        auto acc = accept_seq(party, session_idx, t);
        if (!acc) return true;  // never accepted: nothing was issued "before accept"
        const bool qk = issued_before(QueryKind::corrupt_qk, party, *acc);
        const bool sk = issued_before(QueryKind::corrupt_sk, party, *acc) ||
                        issued_before(QueryKind::corrupt_sk, sl->partner, *acc);
        return !qk || !sk;
    };

    if (!check(i, s)) return false;  // condition 4
    for (int j = 0; j < m_config.n_parties; j++)
        for (int r = 0; r < m_config.n_sessions; r++) {
            if ((j == i && r == s) || !slot(j, r)) continue;
            if (origin_session(i, s, j, r, t) && !check(j, r)) return false;  // condition 5
        }
    return true;
}

bool Lab::clean_vm(int i, int s, int t) const {
    if (query_issued(QueryKind::reveal, i, s, t)) return false;  // condition 1
    for (int j = 0; j < m_config.n_parties; j++)
        for (int r = 0; r < m_config.n_sessions; r++) {
            if ((j == i && r == s) || !slot(j, r)) continue;
            if (matching_sessions(i, s, j, r, t) && query_issued(QueryKind::reveal, j, r, t))
                return false;  // condition 2
        }
    if (!condition3(i, s, t, /*classical=*/false)) return false;
    return long_term_condition(i, s, t);
}

bool Lab::clean_cvm(int i, int s, int t) const {
    if (query_issued(QueryKind::reveal, i, s, t)) return false;
    for (int j = 0; j < m_config.n_parties; j++)
        for (int r = 0; r < m_config.n_sessions; r++) {
            if ((j == i && r == s) || !slot(j, r)) continue;
            if (matching_sessions(i, s, j, r, t) && query_issued(QueryKind::reveal, j, r, t))
                return false;
        }
    if (!condition3(i, s, t, /*classical=*/true)) return false;
    return long_term_condition(i, s, t);
}

// --- Trace replay ---------------------------------------------------------------

namespace {

std::vector<std::string> tokenize_trace_line(const std::string& raw) {
    std::string line = raw;
    if (auto pos = line.find(';'); pos != std::string::npos) line.resize(pos);
    std::vector<std::string> tokens;
    std::string tok;
    for (char c : line) {
        if (c == '(' || c == ')' || c == ' ' || c == '\t' || c == '\r') {
            if (!tok.empty()) tokens.push_back(std::exchange(tok, {}));
        } else {
            tok.push_back(c);
        }
    }
    if (!tok.empty()) tokens.push_back(tok);
    return tokens;
}

std::optional<QueryKind> query_op(const std::string& name) {
    for (QueryKind k : {QueryKind::reveal, QueryKind::test, QueryKind::corrupt_sk,
                        QueryKind::corrupt_qk, QueryKind::corrupt_ck, QueryKind::compromise_qk,
                        QueryKind::compromise_ck, QueryKind::compromise_sk,
                        QueryKind::compromise_ss})
        if (name == query_kind_name(k)) return k;
    return std::nullopt;
}

bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    raise(Errc::io_error, "expected true/false, got " + s);
}

}  // namespace

TraceResult replay_trace(std::istream& in, const LabConfig& config) {
    Lab lab(config);
    TraceResult result;
    std::string raw;
    while (std::getline(in, raw)) {
        auto tokens = tokenize_trace_line(raw);
        if (tokens.empty()) continue;
        TraceLine line;
        line.text = raw;
        const std::string& op = tokens[0];
        auto arg = [&](size_t idx) { return std::stoi(tokens.at(idx)); };

        try {
            if (op == "create") {
                Query q;
                q.kind = QueryKind::create;
                q.i = arg(1);
                q.j = arg(2);
                q.role = tokens.at(3) == "init" ? Role::initiator : Role::responder;
                q.s = arg(4);
                Answer a = lab.dispatch(q);
                line.result = a.bot ? "bot" : "ok";
                if (tokens.size() > 5) {
                    line.has_assertion = true;
                    line.passed = line.result == tokens[5];
                }
            } else if (op == "activate") {
                Query q;
                q.kind = QueryKind::send;
                q.i = arg(1);
                q.s = arg(2);
                Answer a = lab.dispatch(q);
                line.result = a.bot ? "bot" : std::to_string(a.messages.size()) + " message(s)";
                if (tokens.size() > 3) {
                    line.has_assertion = true;
                    line.passed = (a.bot ? "bot" : "ok") == tokens[3];
                }
            } else if (op == "deliver") {
                int i = arg(1), s = arg(2), j = arg(3), r = arg(4);
                Bytes m = lab.outbox_pop(i, s);
                Query q;
                q.kind = QueryKind::send;
                q.i = j;
                q.s = r;
                q.message = std::move(m);
                Answer a = lab.dispatch(q);
                line.result = a.bot ? "bot" : std::to_string(a.messages.size()) + " message(s)";
            } else if (op == "run") {
                int i = arg(1), s = arg(2), j = arg(3), r = arg(4);
                size_t guard = 0;
                while ((lab.outbox_size(i, s) > 0 || lab.outbox_size(j, r) > 0) && guard++ < 256) {
                    const bool forward = lab.outbox_size(i, s) > 0;
                    Query q;
                    q.kind = QueryKind::send;
                    q.i = forward ? j : i;
                    q.s = forward ? r : s;
                    q.message = forward ? lab.outbox_pop(i, s) : lab.outbox_pop(j, r);
                    lab.dispatch(q);
                }
                line.result = "pumped";
            } else if (op == "drop") {
                lab.outbox_drop(arg(1), arg(2));
                line.result = "dropped";
            } else if (op == "tamper") {
                Bytes& m = lab.outbox_front(arg(1), arg(2));
                const size_t pos = static_cast<size_t>(arg(3)) % m.size();
                m[pos] ^= static_cast<uint8_t>(arg(4) == 0 ? 1 : arg(4));
                line.result = "tampered";
            } else if (op == "status") {
                Status st = lab.session_status(arg(1), arg(2), arg(3));
                line.result = std::string(handshake::status_name(st));
                if (tokens.size() > 4) {
                    line.has_assertion = true;
                    line.passed = line.result == tokens[4];
                }
            } else if (op == "matching" || op == "origin") {
                const bool actual = op == "matching"
                                        ? lab.matching_sessions(arg(1), arg(2), arg(3), arg(4),
                                                                arg(5))
                                        : lab.origin_session(arg(1), arg(2), arg(3), arg(4),
                                                             arg(5));
                line.result = actual ? "true" : "false";
                if (tokens.size() > 6) {
                    line.has_assertion = true;
                    line.passed = actual == parse_bool(tokens[6]);
                }
            } else if (op == "clean-vm" || op == "clean-cvm") {
                const bool actual = op == "clean-vm" ? lab.clean_vm(arg(1), arg(2), arg(3))
                                                     : lab.clean_cvm(arg(1), arg(2), arg(3));
                line.result = actual ? "true" : "false";
                if (tokens.size() > 4) {
                    line.has_assertion = true;
                    line.passed = actual == parse_bool(tokens[4]);
                }
            } else if (auto kind = query_op(op)) {
                Query q;
                q.kind = *kind;
                q.i = arg(1);
                size_t expect_idx = 2;
                if (*kind != QueryKind::corrupt_sk && *kind != QueryKind::corrupt_qk &&
                    *kind != QueryKind::corrupt_ck) {
                    q.s = arg(2);
                    q.t = arg(3);
                    expect_idx = 4;
                }
                Answer a = lab.dispatch(q);
                line.result = a.bot ? "bot" : "key";
                if (tokens.size() > expect_idx) {
                    line.has_assertion = true;
                    line.passed = line.result == tokens[expect_idx];
                }
            } else {
                line.result = "unknown op";
                line.has_assertion = true;
                line.passed = false;
            }
        } catch (const Error& e) {
            line.result = std::string("error: ") + e.what();
            line.has_assertion = true;
            line.passed = false;
        }
        if (!line.passed) result.ok = false;
        result.lines.push_back(std::move(line));
    }
    return result;
}

TraceResult replay_trace_text(const std::string& text, const LabConfig& config) {
    std::istringstream in(text);
    return replay_trace(in, config);
}

std::unique_ptr<Lab> run_random_trace(const LabConfig& lab_config, const TraceGenConfig& gen) {
    auto lab = std::make_unique<Lab>(lab_config);
    std::mt19937_64 rng(gen.seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    lab->dispatch({QueryKind::create, 0, 1, Role::initiator, 0, 0, std::nullopt});
    lab->dispatch({QueryKind::create, 1, 0, Role::responder, 0, 0, std::nullopt});

    auto pump = [&] {
        size_t guard = 0;
        while ((lab->outbox_size(0, 0) > 0 || lab->outbox_size(1, 0) > 0) && guard++ < 256) {
            const bool fwd = lab->outbox_size(0, 0) > 0;
            Query q;
            q.kind = QueryKind::send;
            q.i = fwd ? 1 : 0;
            q.s = 0;
            q.message = fwd ? lab->outbox_pop(0, 0) : lab->outbox_pop(1, 0);
            lab->dispatch(q);
        }
    };

    const int stages = std::min(gen.stages, lab_config.n_stages);
    for (int t = 1; t <= stages; t++) {
        lab->dispatch({QueryKind::send, 0, 0, Role::initiator, 0, 0, std::nullopt});
        pump();

        auto maybe = [&](double p, QueryKind kind) {
            if (coin(rng) >= p) return;
            Query q;
            q.kind = kind;
            q.i = static_cast<int>(rng() % 2);
            q.s = 0;
            q.t = static_cast<int>(rng() % static_cast<uint64_t>(t)) + 1;
            lab->dispatch(q);
        };
        maybe(gen.p_reveal, QueryKind::reveal);
        maybe(gen.p_compromise, QueryKind::compromise_qk);
        maybe(gen.p_compromise, QueryKind::compromise_sk);
        maybe(gen.p_compromise, QueryKind::compromise_ck);
        maybe(gen.p_compromise, QueryKind::compromise_ss);
        maybe(gen.p_corrupt, QueryKind::corrupt_sk);
        maybe(gen.p_corrupt, QueryKind::corrupt_qk);
        maybe(gen.p_corrupt, QueryKind::corrupt_ck);
    }
    return lab;
}

}  // namespace vmuckle::hakelab
