// vmuckle — operator CLI: handshakes over TCP or in memory, the MACsec demo
// flow, bandwidth benchmarks, the mini-PKI, schedule KAT emission and
// security-model trace replay.

#include <CLI11.hpp>

#include <arpa/inet.h>
#include <netdb.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include "vmuckle/bench.hpp"
#include "vmuckle/hakelab.hpp"
#include "vmuckle/handshake.hpp"
#include "vmuckle/mka.hpp"
#include "vmuckle/schedule.hpp"

using namespace vmuckle;
using handshake::AuthMode;
using handshake::Role;
using handshake::Session;
using handshake::Status;

namespace {

// --- helpers -------------------------------------------------------------------

std::shared_ptr<RandomSource> make_rng(const std::string& salt) {
    if (const char* seed = std::getenv("VMUCKLE_SEED")) {
        Bytes s = to_bytes(std::string(seed) + "/" + salt);
        return std::make_shared<DeterministicRandom>(view(s));
    }
    return std::make_shared<OsRandom>();
}

Bytes read_psk_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::io_error, "cannot open psk file " + path);
    std::string hex;
    in >> hex;
    return from_hex(hex);
}

constexpr char kChainMagic[4] = {'V', 'M', 'C', 'H'};

void save_chain(const std::string& path, const pki::HybridCertificate& leaf,
                const pki::HybridCertificate& intermediate) {
    Bytes out;
    out.insert(out.end(), kChainMagic, kChainMagic + 4);
    append(out, view(pki::encode_presented_chain(leaf, intermediate)));
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) raise(Errc::io_error, "cannot write " + path);
    file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
}

std::pair<pki::HybridCertificate, pki::HybridCertificate> load_chain(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) raise(Errc::io_error, "cannot open " + path);
    Bytes data((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
    if (data.size() < 4 || !std::equal(data.begin(), data.begin() + 4, kChainMagic))
        raise(Errc::io_error, "bad chain-file magic in " + path);
    return pki::decode_presented_chain(ByteView(data).subspan(4));
}

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::string item;
    for (char c : csv) {
        if (c == ',') {
            if (!item.empty()) out.push_back(std::exchange(item, {}));
        } else {
            item.push_back(c);
        }
    }
    if (!item.empty()) out.push_back(item);
    return out;
}

std::string fingerprint(ByteView secret) {
    return to_hex(secret.first(std::min<size_t>(4, secret.size())));
}

// --- TCP framing -----------------------------------------------------------------

struct Socket {
    int fd = -1;
    ~Socket() {
        if (fd >= 0) close(fd);
    }
};

int tcp_connect(const std::string& host, uint16_t port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0 || !res)
        raise(Errc::io_error, "cannot resolve " + host);
    int fd = -1;
    for (addrinfo* ai = res; ai; ai = ai->ai_next) {
        fd = socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) continue;
        if (connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
        close(fd);
        fd = -1;
    }
    freeaddrinfo(res);
    if (fd < 0) raise(Errc::io_error, "cannot connect to " + host + ":" + std::to_string(port));
    return fd;
}

int tcp_accept_once(uint16_t port) {
    int listener = socket(AF_INET, SOCK_STREAM, 0);
    if (listener < 0) raise(Errc::io_error, "socket failed");
    int yes = 1;
    setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
    addr.sin_port = htons(port);
    if (bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        close(listener);
        raise(Errc::io_error, "cannot bind port " + std::to_string(port));
    }
    if (listen(listener, 1) != 0) {
        close(listener);
        raise(Errc::io_error, "listen failed");
    }
    int fd = accept(listener, nullptr, nullptr);
    close(listener);
    if (fd < 0) raise(Errc::io_error, "accept failed");
    return fd;
}

void send_framed(int fd, ByteView msg) {
    Bytes frame;
    append_u32(frame, static_cast<uint32_t>(msg.size()));
    append(frame, msg);
    size_t sent = 0;
    while (sent < frame.size()) {
        ssize_t n = send(fd, frame.data() + sent, frame.size() - sent, 0);
        if (n <= 0) raise(Errc::io_error, "send failed");
        sent += static_cast<size_t>(n);
    }
}

Bytes recv_exact(int fd, size_t n) {
    Bytes out(n);
    size_t got = 0;
    while (got < n) {
        ssize_t r = recv(fd, out.data() + got, n - got, 0);
        if (r <= 0) raise(Errc::io_error, "connection closed");
        got += static_cast<size_t>(r);
    }
    return out;
}

Bytes recv_framed(int fd) {
    Bytes header = recv_exact(fd, 4);
    ByteReader reader(view(header));
    return recv_exact(fd, reader.u32());
}

// --- session setup ----------------------------------------------------------------

struct CommonOpts {
    std::string kem_pq = "ML-KEM-768";
    std::string kem_c = "ECDH-P521";
    std::string sig = "ML-DSA-65";
    std::string auth = "psk";
    std::string psk_file;
    std::string cert_chain;
    std::string key_file;
    std::string trust_anchor;
    std::string qkd_source = "sim:00112233445566778899aabbccddeeff:link0";
    std::string peer_id;
    unsigned stages = 1;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--kem-pq", opts.kem_pq, "post-quantum KEM name");
    cmd->add_option("--kem-c", opts.kem_c, "classical KEM name or 'none'");
    cmd->add_option("--sig", opts.sig, "signature scheme name or 'none'");
    cmd->add_option("--auth", opts.auth, "authentication mode: psk, cert or both");
    cmd->add_option("--psk-file", opts.psk_file, "file holding the psk as hex");
    cmd->add_option("--cert-chain", opts.cert_chain, "chain file (leaf + intermediate)");
    cmd->add_option("--key", opts.key_file, "signing key file");
    cmd->add_option("--trust-anchor", opts.trust_anchor, "root certificate file");
    cmd->add_option("--qkd-source", opts.qkd_source, "sim:<seed-hex>:<stream> or file:<path>");
    cmd->add_option("--peer-id", opts.peer_id, "expected peer identity (leaf subject)");
    cmd->add_option("--stages", opts.stages, "number of consecutive stages");
}

handshake::SessionConfig build_config(const CommonOpts& opts, Role role,
                                      const std::string& local_id) {
    handshake::SessionConfig sc;
    const AuthMode mode = handshake::auth_mode_from_name(opts.auth);
    sc.suite = make_suite(opts.kem_c, opts.kem_pq, mode == AuthMode::psk ? "none" : opts.sig);
    sc.role = role;
    sc.local_id = local_id;
    sc.peer_id = opts.peer_id;
    sc.auth.mode = mode;
    if (mode != AuthMode::cert) {
        if (opts.psk_file.empty()) raise(Errc::config_mismatch, "--psk-file required");
        sc.auth.psk = read_psk_file(opts.psk_file);
    }
    if (mode != AuthMode::psk) {
        if (opts.cert_chain.empty() || opts.key_file.empty() || opts.trust_anchor.empty())
            raise(Errc::config_mismatch, "--cert-chain, --key and --trust-anchor required");
        auto [leaf, intermediate] = load_chain(opts.cert_chain);
        sc.auth.local_chain = {leaf, intermediate};
        sc.auth.local_sign_key = pki::load_key(opts.key_file).secret_key;
        sc.auth.trust_anchor = pki::load_certificate(opts.trust_anchor);
    }
    auto source = qkd::from_spec(opts.qkd_source);
    sc.qkd_provider = source.provider;
    sc.qkd_stream_id = source.stream_id;
    return sc;
}

// Runs `stages` consecutive stages over an established socket.
int run_tcp_session(Session& session, int fd, unsigned stages, const std::string& export_msk) {
    for (unsigned stage = 1; stage <= stages; stage++) {
        if (session.role() == Role::initiator)
            for (const Bytes& m : session.start()) send_framed(fd, view(m));
        while (session.status() == Status::active ||
               (session.role() == Role::responder && session.current_stage() < stage)) {
            Bytes incoming = recv_framed(fd);
            for (const Bytes& m : session.on_message(view(incoming))) send_framed(fd, view(m));
        }
        if (session.status() != Status::accept) {
            std::cerr << "stage " << stage << " rejected: "
                      << errc_name(session.reject_reason()) << "\n";
            return 1;
        }
        const auto& out = session.output(stage);
        std::cout << "stage " << stage << " accepted  ms=" << fingerprint(view(out.ms))
                  << " cats=" << fingerprint(view(out.cats))
                  << " sats=" << fingerprint(view(out.sats)) << "\n";
    }
    if (!export_msk.empty()) {
        std::ofstream out(export_msk, std::ios::trunc);
        out << session.export_msk_hex(session.current_stage()) << "\n";
        std::cout << "MSK written to " << export_msk << "\n";
    }
    return 0;
}

// --- subcommands --------------------------------------------------------------------

int cmd_handshake(const CommonOpts& opts, const std::string& role_name,
                  const std::string& listen, const std::string& connect_to,
                  const std::string& export_msk) {
    const Role role = role_name == "init" ? Role::initiator : Role::responder;
    Session session(build_config(opts, role, role_name));
    session.set_random_source(make_rng(role_name));

    Socket sock;
    if (!connect_to.empty()) {
        auto colon = connect_to.rfind(':');
        if (colon == std::string::npos) raise(Errc::io_error, "--connect needs host:port");
        sock.fd = tcp_connect(connect_to.substr(0, colon),
                              static_cast<uint16_t>(std::stoi(connect_to.substr(colon + 1))));
    } else if (!listen.empty()) {
        auto colon = listen.rfind(':');
        const std::string port = colon == std::string::npos ? listen : listen.substr(colon + 1);
        sock.fd = tcp_accept_once(static_cast<uint16_t>(std::stoi(port)));
    } else {
        raise(Errc::io_error, "one of --listen or --connect is required");
    }
    return run_tcp_session(session, sock.fd, opts.stages, export_msk);
}

int cmd_bench(const std::string& kems_csv, const std::string& sigs_csv,
              const std::string& modes_csv, int reps, const std::string& csv_path, uint64_t seed,
              unsigned parallel) {
    std::vector<AuthMode> modes;
    for (const auto& name : split_list(modes_csv))
        modes.push_back(handshake::auth_mode_from_name(name));
    auto records = bench::bench_matrix(split_list(kems_csv), split_list(sigs_csv), modes, reps,
                                       seed, "ECDH-P521", parallel);
    std::cout << "byte counts are application-layer only (handshake messages + 4-byte frames); "
                 "cycle figures marked * are wall-time estimates\n\n";
    std::cout << bench::to_markdown(records);
    if (!csv_path.empty()) {
        std::ofstream out(csv_path, std::ios::trunc);
        out << bench::to_csv(records);
        std::cout << "\nCSV written to " << csv_path << "\n";
    }
    for (const auto& r : records)
        if (!r.ok) return 1;
    return 0;
}

int cmd_demo_macsec(const CommonOpts& opts, const std::string& ckn_str, uint8_t priority_a,
                    uint8_t priority_b) {
    // Both endpoints in one process, wired through the in-memory pump.
    auto init_cfg = build_config(opts, Role::initiator, "node-a");
    auto resp_cfg = build_config(opts, Role::responder, "node-b");
    Session initiator(std::move(init_cfg));
    Session responder(std::move(resp_cfg));
    initiator.set_random_source(make_rng("node-a"));
    responder.set_random_source(make_rng("node-b"));

    auto result = handshake::run_stage(initiator, responder);
    if (!result.ok) {
        const Errc reason = initiator.status() == Status::reject ? initiator.reject_reason()
                                                                 : responder.reject_reason();
        std::cerr << "handshake failed: " << errc_name(reason) << "\n";
        return 1;
    }
    std::cout << "handshake accepted; exporting MS as MSK\n";

    const Bytes ckn = to_bytes(ckn_str);
    mka::MkaHierarchy side_a =
        mka::derive_hierarchy(view(result.initiator_output->ms), view(ckn));
    mka::MkaHierarchy side_b =
        mka::derive_hierarchy(view(result.responder_output->ms), view(ckn));

    std::vector<mka::Member> members{{to_bytes("node-a"), priority_a},
                                     {to_bytes("node-b"), priority_b}};
    Bytes server = mka::elect_key_server(members);
    std::cout << "key server: " << to_string(view(server)) << "\n";

    const bool a_is_server = server == to_bytes("node-a");
    mka::MkaHierarchy& server_h = a_is_server ? side_a : side_b;
    mka::MkaHierarchy& peer_h = a_is_server ? side_b : side_a;

    auto rng = make_rng("sak");
    mka::SakRecord sak = mka::generate_sak(server_h, {0, 0, 0, 0, 0, 0, 0, 1}, 1, *rng);
    mka::FrameHeader header;
    std::copy(server.begin(), server.end(), header.member_id.begin());
    header.key_server_priority = a_is_server ? priority_a : priority_b;
    Bytes frame = mka::wrap_sak(server_h, sak, header, *rng);
    mka::SakRecord received = mka::unwrap_sak(peer_h, view(frame));

    auto report = [&](const char* who, const mka::MkaHierarchy& h, const Bytes& sak_bytes) {
        std::cout << who << "  msk=" << fingerprint(view(h.msk))
                  << " cak=" << fingerprint(view(h.cak)) << " kek=" << fingerprint(view(h.kek))
                  << " ick=" << fingerprint(view(h.ick)) << " sak=" << fingerprint(view(sak_bytes))
                  << "\n";
    };
    report("node-a", side_a, a_is_server ? sak.sak : received.sak);
    report("node-b", side_b, a_is_server ? received.sak : sak.sak);

    if (received.sak != sak.sak || side_a.cak != side_b.cak) {
        std::cerr << "key mismatch between the two nodes\n";
        return 1;
    }
    std::cout << "both nodes derived identical MACsec keys\n";
    return 0;
}

int cmd_schedule_kat(const std::string& out_path) {
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path, std::ios::trunc);
        out = &file;
    }
    wire::Transcript tr;
    tr.record(1, view(wire::encode(wire::make_m1({}, Bytes(8, 0xAA), Bytes(32, 0x01)))));
    tr.record(2, view(wire::encode(wire::make_m2({}, Bytes(8, 0xBB), Bytes(32, 0x02)))));
    tr.record(3, view(wire::encode(wire::make_opaque(3, {}))));
    tr.record(4, view(wire::encode(wire::make_opaque(4, {}))));
    tr.record(5, view(wire::encode(wire::make_opaque(5, Bytes(48, 0xCC)))));
    schedule::StageInputs in;
    in.ss_pq = Bytes(32, 0x11);
    in.k_q = Bytes(32, 0x22);
    in.security_param = 256;

    auto emit = [&](std::string_view name, ByteView key, ByteView input, ByteView output) {
        *out << name << " " << (key.empty() ? "-" : to_hex(key)) << " "
             << (input.empty() ? "-" : to_hex(input)) << " " << to_hex(output) << "\n";
    };
    auto keys = schedule::derive_handshake_secrets(in, tr, emit);
    schedule::derive_application_secrets(keys, tr, emit);
    schedule::mac_key({}, view(keys.fk_c), emit);
    schedule::mac_key({}, view(keys.fk_s), emit);
    return 0;
}

int cmd_hakelab_replay(const std::string& path, const hakelab::LabConfig& cfg) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "cannot open trace " << path << "\n";
        return 1;
    }
    auto result = hakelab::replay_trace(in, cfg);
    for (const auto& line : result.lines) {
        const char* mark = !line.has_assertion ? "  " : (line.passed ? "ok" : "XX");
        std::cout << mark << "  " << line.text << "   => " << line.result << "\n";
    }
    std::cout << (result.ok ? "trace OK" : "trace FAILED") << "\n";
    return result.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"VMuckle hybrid authenticated key exchange"};
    app.require_subcommand(1);

    // handshake
    CommonOpts hs_opts;
    std::string role = "init", listen, connect_to, export_msk;
    auto* hs = app.add_subcommand("handshake", "run a handshake over TCP");
    add_common(hs, hs_opts);
    hs->add_option("--role", role, "init or resp")->check(CLI::IsMember({"init", "resp"}));
    hs->add_option("--listen", listen, "[host:]port to accept on");
    hs->add_option("--connect", connect_to, "host:port to connect to");
    hs->add_option("--export-msk", export_msk, "write the final MS (hex) to this file");

    // bench
    std::string bench_kems = "ML-KEM-512,ML-KEM-768,ML-KEM-1024";
    std::string bench_sigs = "ML-DSA-44,ML-DSA-65,ML-DSA-87,Falcon-512,Falcon-1024";
    std::string bench_modes = "psk,cert";
    std::string bench_csv;
    int bench_reps = 3;
    uint64_t bench_seed = 1;
    unsigned bench_parallel = 1;
    auto* bench_cmd = app.add_subcommand("bench", "measure handshake bandwidth and timing");
    bench_cmd->add_option("--kems", bench_kems, "comma-separated post-quantum KEMs");
    bench_cmd->add_option("--sigs", bench_sigs, "comma-separated signature schemes");
    bench_cmd->add_option("--auth", bench_modes, "comma-separated auth modes");
    bench_cmd->add_option("--reps", bench_reps, "repetitions per cell (median)");
    bench_cmd->add_option("--csv", bench_csv, "also write CSV here");
    bench_cmd->add_option("--seed", bench_seed, "deterministic seed");
    bench_cmd->add_option("--parallel", bench_parallel,
                          "worker threads (byte accounting only; timings are dropped)");

    // demo-macsec
    CommonOpts demo_opts;
    std::string ckn = "VMUCKLE-CA-01";
    unsigned priority_a = 10, priority_b = 20;
    auto* demo = app.add_subcommand("demo-macsec",
                                    "handshake + MKA hierarchy + SAK wrap between two nodes");
    add_common(demo, demo_opts);
    demo->add_option("--ckn", ckn, "connectivity association key name");
    demo->add_option("--priority-a", priority_a, "key server priority of node-a");
    demo->add_option("--priority-b", priority_b, "key server priority of node-b");

    // pki
    auto* pki_cmd = app.add_subcommand("pki", "mini hybrid PKI");
    std::string subject = "subject", out_cert, out_key_pq, out_key_cl, out_chain, ca_cert,
                ca_key_pq, ca_key_cl, pq_alg = "ML-DSA-87", cl_alg = "EdDSA", show_path;
    std::string v_leaf, v_intermediate, v_root;
    int64_t days = 365;
    auto* gen_root = pki_cmd->add_subcommand("gen-root", "generate a self-signed root");
    gen_root->add_option("--subject", subject);
    gen_root->add_option("--pq-alg", pq_alg);
    gen_root->add_option("--cl-alg", cl_alg);
    gen_root->add_option("--days", days);
    gen_root->add_option("--out-cert", out_cert)->required();
    gen_root->add_option("--out-key-pq", out_key_pq)->required();
    gen_root->add_option("--out-key-cl", out_key_cl)->required();
    auto* gen_mid = pki_cmd->add_subcommand("gen-intermediate", "issue an intermediate CA");
    auto* gen_leaf = pki_cmd->add_subcommand("gen-leaf", "issue a leaf certificate");
    for (auto* cmd : {gen_mid, gen_leaf}) {
        cmd->add_option("--subject", subject);
        cmd->add_option("--pq-alg", pq_alg);
        cmd->add_option("--cl-alg", cl_alg);
        cmd->add_option("--days", days);
        cmd->add_option("--ca-cert", ca_cert)->required();
        cmd->add_option("--ca-key-pq", ca_key_pq)->required();
        cmd->add_option("--ca-key-cl", ca_key_cl)->required();
        cmd->add_option("--out-cert", out_cert)->required();
        cmd->add_option("--out-key-pq", out_key_pq)->required();
        cmd->add_option("--out-key-cl", out_key_cl)->required();
    }
    gen_leaf->add_option("--out-chain", out_chain,
                         "also write the presentable chain (leaf + issuing intermediate)");
    auto* show = pki_cmd->add_subcommand("show", "print a certificate");
    show->add_option("file", show_path)->required();
    auto* verify_cmd = pki_cmd->add_subcommand("verify", "verify a 3-level chain");
    verify_cmd->add_option("--leaf", v_leaf)->required();
    verify_cmd->add_option("--intermediate", v_intermediate)->required();
    verify_cmd->add_option("--root", v_root)->required();

    // schedule-kat
    std::string kat_out;
    auto* kat = app.add_subcommand("schedule-kat",
                                   "emit the key-schedule known-answer derivation steps");
    kat->add_option("--out", kat_out, "write to file instead of stdout");

    // hakelab-replay
    std::string trace_path;
    hakelab::LabConfig lab_cfg;
    lab_cfg.kem_c = "TestKEM-32";
    auto* replay = app.add_subcommand("hakelab-replay", "replay an adversarial trace");
    replay->add_option("file", trace_path)->required();
    replay->add_option("--parties", lab_cfg.n_parties);
    replay->add_option("--sessions", lab_cfg.n_sessions);
    replay->add_option("--stages", lab_cfg.n_stages);
    replay->add_option("--seed", lab_cfg.seed);
    replay->add_option("--kem-pq", lab_cfg.kem_pq);
    replay->add_option("--kem-c", lab_cfg.kem_c);
    replay->add_option("--dss", lab_cfg.dss);

    CLI11_PARSE(app, argc, argv);

    try {
        if (hs->parsed()) return cmd_handshake(hs_opts, role, listen, connect_to, export_msk);
        if (bench_cmd->parsed())
            return cmd_bench(bench_kems, bench_sigs, bench_modes, bench_reps, bench_csv,
                             bench_seed, bench_parallel);
        if (demo->parsed())
            return cmd_demo_macsec(demo_opts, ckn, static_cast<uint8_t>(priority_a),
                                   static_cast<uint8_t>(priority_b));
        if (kat->parsed()) return cmd_schedule_kat(kat_out);
        if (replay->parsed()) return cmd_hakelab_replay(trace_path, lab_cfg);

        if (pki_cmd->parsed()) {
            auto rng = make_rng("pki");
            const auto now = static_cast<int64_t>(::time(nullptr));
            const pki::Validity validity{now - 86400, now + days * 86400};
            auto write_ca = [&](const pki::CaKeys& ca) {
                pki::save_key(out_key_pq, {ca.pq_alg, ca.pq_pk, ca.pq_sk});
                pki::save_key(out_key_cl, {ca.cl_alg, ca.cl_pk, ca.cl_sk});
            };
            auto load_ca = [&]() {
                pki::HybridCertificate cert = pki::load_certificate(ca_cert);
                pki::KeyFile pq = pki::load_key(ca_key_pq);
                pki::KeyFile cl = pki::load_key(ca_key_cl);
                return pki::CaKeys{cert.subject, pq.alg,        pq.public_key, pq.secret_key,
                                   cl.alg,       cl.public_key, cl.secret_key};
            };
            if (gen_root->parsed()) {
                pki::CaKeys ca = pki::make_ca_keys(subject, make_alg(AlgKind::signature, pq_alg),
                                                   make_alg(AlgKind::signature, cl_alg), *rng);
                pki::save_certificate(out_cert, pki::self_issue(ca, validity));
                write_ca(ca);
                std::cout << "root " << subject << " written\n";
                return 0;
            }
            if (gen_mid->parsed() || gen_leaf->parsed()) {
                pki::CaKeys issuer = load_ca();
                pki::CaKeys fresh = pki::make_ca_keys(subject, make_alg(AlgKind::signature, pq_alg),
                                                      make_alg(AlgKind::signature, cl_alg), *rng);
                pki::HybridCertificate cert =
                    issue(issuer, {subject, fresh.pq_alg, fresh.pq_pk, fresh.cl_alg, fresh.cl_pk},
                          validity);
                pki::save_certificate(out_cert, cert);
                write_ca(fresh);
                if (gen_leaf->parsed() && !out_chain.empty())
                    save_chain(out_chain, cert, pki::load_certificate(ca_cert));
                std::cout << (gen_mid->parsed() ? "intermediate " : "leaf ") << subject
                          << " written\n";
                return 0;
            }
            if (show->parsed()) {
                pki::HybridCertificate cert = pki::load_certificate(show_path);
                std::cout << "subject: " << cert.subject << "\nissuer: " << cert.issuer
                          << "\nvalidity: " << cert.validity.not_before << " .. "
                          << cert.validity.not_after << "\npq: " << cert.pq_alg.name << " ("
                          << cert.pq_pk.size() << " bytes)\nclassical: " << cert.cl_alg.name
                          << " (" << cert.cl_pk.size() << " bytes)\nsignatures: "
                          << cert.sig_pq.size() << " + " << cert.sig_cl.size() << " bytes\n";
                return 0;
            }
            if (verify_cmd->parsed()) {
                pki::CertChain chain{pki::load_certificate(v_leaf),
                                     pki::load_certificate(v_intermediate),
                                     pki::load_certificate(v_root)};
                auto r = pki::verify_chain(chain, chain.root,
                                           static_cast<int64_t>(::time(nullptr)));
                std::cout << (r.ok ? "chain OK" : "chain INVALID: ") << " "
                          << pki::chain_status_name(r.reason) << "\n";
                return r.ok ? 0 : 1;
            }
            std::cerr << "pki needs a subcommand\n";
            return 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
