#include "cli_support.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cmath>
#include <csignal>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>

namespace zkpeap::cli {
namespace {

using namespace std::chrono_literals;

std::atomic<bool> g_stop{false};

void handle_stop_signal(int) {
    g_stop.store(true);
}

// ---------------------------------------------------------------------------
// enroll

struct EnrollArgs {
    std::string registry_path;
    std::string identity;
    std::string password_file;
    unsigned bits = kProductionMinModulusBits;
    unsigned rounds = 20;
    std::string kdf_name = "scrypt";
    uint32_t kdf_iterations = 100'000;
    unsigned salt_bytes = 16;
    bool insecure_test = false;
};

int run_enroll(const EnrollArgs& args) {
    if (args.bits < kProductionMinModulusBits && !args.insecure_test) {
        std::cerr << "enroll: refusing modulus below "
                  << kProductionMinModulusBits
                  << " bits without --insecure-test\n";
        return kExitUsage;
    }
    if (args.bits < 16 || args.bits > kMaxModulusBits) {
        std::cerr << "enroll: modulus bits must be in [16, " << kMaxModulusBits
                  << "]\n";
        return kExitUsage;
    }
    if (args.rounds < 1 || args.rounds > 0xFFFF) {
        std::cerr << "enroll: rounds must be in [1, 65535]\n";
        return kExitUsage;
    }
    if (args.salt_bytes < Salt::kMinLength ||
        args.salt_bytes > Salt::kMaxLength) {
        std::cerr << "enroll: salt length must be in [4, 255]\n";
        return kExitUsage;
    }
    std::string kdf_error;
    const auto kdf = make_kdf(args.kdf_name, args.kdf_iterations, kdf_error);
    if (!kdf) {
        std::cerr << "enroll: " << kdf_error << "\n";
        return kExitUsage;
    }

    Registry registry;
    if (std::filesystem::exists(args.registry_path)) {
        try {
            registry = Registry::load(args.registry_path);
        } catch (const RegistryError& e) {
            std::cerr << "enroll: " << e.what() << "\n";
            return kExitUsage;
        }
    }
    if (registry.find(args.identity) != nullptr) {
        std::cerr << "enroll: identity '" << args.identity
                  << "' already enrolled\n";
        return kExitUsage;
    }

    const auto password = read_password(args.password_file, "password: ");
    if (!password || password->empty()) {
        std::cerr << "enroll: no password provided\n";
        return kExitUsage;
    }

    EnrollmentConfig config;
    config.kdf = *kdf;
    config.modulus_bits = args.bits;
    config.rounds = static_cast<uint16_t>(args.rounds);
    config.salt_length = args.salt_bytes;

    RandomSource rng = RandomSource::system();
    try {
        const CredentialRecord record =
            enroll(args.identity, *password, config, rng);
        registry.add(record);
        registry.store(args.registry_path);
        std::cout << "enrolled identity=" << record.identity
                  << " modulus_bits=" << bit_length(record.n.value())
                  << " salt_octets=" << record.salt.size()
                  << " rounds=" << record.rounds << "\n";
    } catch (const std::exception& e) {
        std::cerr << "enroll: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitSuccess;
}

// ---------------------------------------------------------------------------
// serve

struct ServeArgs {
    std::string registry_path;
    std::string listen_address = "127.0.0.1";
    uint16_t port = 7784;
    unsigned rounds = 20;   // decoy profile
    unsigned bits = kProductionMinModulusBits;
    unsigned timeout_ms = 3000;
    unsigned budget = 3;
    unsigned max_sessions = 0;  // 0 = unlimited
    bool insecure_test = false;
};

std::mutex g_log_mutex;

void log_line(const std::string& line) {
    std::lock_guard lock(g_log_mutex);
    std::cout << line << std::endl;
}

void serve_session(int fd, const AuthenticatorSession::Config& config,
                   unsigned timeout_ms) {
    const auto started = std::chrono::steady_clock::now();
    auto carrier = TcpCarrier::from_fd(fd);
    AuthenticatorSession session(config, RandomSource::system());

    auto send = [&](const std::vector<uint8_t>& frame) {
        return carrier->send_frame(frame) == SendStatus::Ok;
    };
    bool transport_ok = send(session.start());

    // Runs to completion even during shutdown: every receive is bounded by
    // the timeout and the retransmit budget bounds the receives.
    while (transport_ok &&
           session.status() == AuthenticatorSession::Status::InProgress) {
        const RecvResult incoming =
            carrier->recv_frame(std::chrono::milliseconds(timeout_ms));
        if (incoming.status == RecvStatus::Frame) {
            if (const auto out = session.on_frame(incoming.frame)) {
                transport_ok = send(*out);
            }
        } else if (incoming.status == RecvStatus::Timeout) {
            if (const auto again = session.on_timeout()) {
                transport_ok = send(*again);
            }
        } else {
            transport_ok = false;
        }
    }

    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - started);
    const char* outcome =
        session.status() == AuthenticatorSession::Status::Accepted
            ? "accept"
            : (session.status() == AuthenticatorSession::Status::Rejected
                   ? "reject"
                   : "abandoned");
    log_line("session identity=" +
             (session.peer_identity().empty() ? "-" : session.peer_identity()) +
             " rounds=" + std::to_string(session.rounds_completed()) +
             " outcome=" + outcome +
             " duration_ms=" + std::to_string(elapsed.count()));
    carrier->close();
}

int run_serve(const ServeArgs& args) {
    if (args.bits < kProductionMinModulusBits && !args.insecure_test) {
        std::cerr << "serve: refusing decoy modulus below "
                  << kProductionMinModulusBits
                  << " bits without --insecure-test\n";
        return kExitUsage;
    }

    std::shared_ptr<const Registry> registry;
    try {
        auto loaded = std::make_shared<Registry>();
        if (std::filesystem::exists(args.registry_path)) {
            *loaded = Registry::load(args.registry_path);
        }
        registry = loaded;
    } catch (const RegistryError& e) {
        std::cerr << "serve: " << e.what() << "\n";
        return kExitUsage;
    }

    AuthenticatorSession::Config session_config;
    session_config.registry = registry;
    session_config.default_rounds = static_cast<uint16_t>(args.rounds);
    session_config.decoy_modulus_bits = args.bits;
    session_config.retransmit_budget = args.budget;
    session_config.decoy_key = RandomSource::system().bytes(32);

    const int listen_fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd < 0) {
        std::cerr << "serve: socket: " << std::strerror(errno) << "\n";
        return kExitTransport;
    }
    const int one = 1;
    ::setsockopt(listen_fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(args.port);
    if (::inet_pton(AF_INET, args.listen_address.c_str(), &addr.sin_addr) != 1) {
        std::cerr << "serve: bad listen address " << args.listen_address << "\n";
        ::close(listen_fd);
        return kExitUsage;
    }
    if (::bind(listen_fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) !=
            0 ||
        ::listen(listen_fd, 16) != 0) {
        std::cerr << "serve: bind/listen: " << std::strerror(errno) << "\n";
        ::close(listen_fd);
        return kExitTransport;
    }
    socklen_t addr_len = sizeof(addr);
    ::getsockname(listen_fd, reinterpret_cast<sockaddr*>(&addr), &addr_len);
    log_line("listening address=" + args.listen_address +
             " port=" + std::to_string(ntohs(addr.sin_port)) +
             " identities=" + std::to_string(registry->size()));

    struct sigaction action{};
    action.sa_handler = handle_stop_signal;
    ::sigaction(SIGINT, &action, nullptr);
    ::sigaction(SIGTERM, &action, nullptr);

    std::vector<std::thread> sessions;
    unsigned accepted = 0;
    while (!g_stop.load()) {
        pollfd pfd{listen_fd, POLLIN, 0};
        const int pr = ::poll(&pfd, 1, 200);
        if (pr < 0 && errno != EINTR) {
            break;
        }
        if (pr <= 0 || (pfd.revents & POLLIN) == 0) {
            continue;
        }
        const int fd = ::accept(listen_fd, nullptr, nullptr);
        if (fd < 0) {
            continue;
        }
        sessions.emplace_back(serve_session, fd, session_config,
                              args.timeout_ms);
        ++accepted;
        if (args.max_sessions != 0 && accepted >= args.max_sessions) {
            break;
        }
    }

    // Drain in-flight sessions; each is bounded by timeout * budget.
    ::close(listen_fd);
    for (auto& session : sessions) {
        session.join();
    }
    log_line("shutdown sessions=" + std::to_string(accepted));
    return kExitSuccess;
}

// ---------------------------------------------------------------------------
// login

struct LoginArgs {
    std::string server = "127.0.0.1";
    uint16_t port = 7784;
    std::string identity;
    std::string password_file;
    std::string kdf_name = "scrypt";
    uint32_t kdf_iterations = 100'000;
    unsigned min_bits = kProductionMinModulusBits;
    unsigned timeout_ms = 10'000;
    unsigned max_rounds = 64;
    std::string transcript_path;
    bool insecure_test = false;
};

int run_login(const LoginArgs& args) {
    if (args.min_bits < kProductionMinModulusBits && !args.insecure_test) {
        std::cerr << "login: refusing modulus floor below "
                  << kProductionMinModulusBits
                  << " bits without --insecure-test\n";
        return kExitUsage;
    }
    std::string kdf_error;
    const auto kdf = make_kdf(args.kdf_name, args.kdf_iterations, kdf_error);
    if (!kdf) {
        std::cerr << "login: " << kdf_error << "\n";
        return kExitUsage;
    }
    const auto password = read_password(args.password_file, "password: ");
    if (!password || password->empty()) {
        std::cerr << "login: no password provided\n";
        return kExitUsage;
    }

    auto carrier = TcpCarrier::connect(args.server, args.port);
    if (carrier == nullptr) {
        std::cerr << "login: cannot connect to " << args.server << ":"
                  << args.port << "\n";
        return kExitTransport;
    }

    PeerSession::Config config;
    config.identity = args.identity;
    config.password = *password;
    config.kdf = *kdf;
    config.min_modulus_bits = args.min_bits;
    config.max_rounds = args.max_rounds;
    PeerSession session(config, RandomSource::system());

    std::ofstream transcript;
    if (!args.transcript_path.empty()) {
        transcript.open(args.transcript_path, std::ios::trunc);
    }
    auto record = [&transcript](char direction,
                                std::span<const uint8_t> frame) {
        if (transcript.is_open()) {
            transcript << direction << " " << hex_dump(frame) << "\n";
        }
    };

    while (session.status() == PeerSession::Status::InProgress) {
        const RecvResult incoming =
            carrier->recv_frame(std::chrono::milliseconds(args.timeout_ms));
        if (incoming.status != RecvStatus::Frame) {
            std::cerr << "login: transport "
                      << (incoming.status == RecvStatus::Timeout ? "timeout"
                                                                 : "closed")
                      << "\n";
            return kExitTransport;
        }
        record('<', incoming.frame);
        if (const auto response = session.on_frame(incoming.frame)) {
            if (carrier->send_frame(*response) != SendStatus::Ok) {
                std::cerr << "login: send failed\n";
                return kExitTransport;
            }
            record('>', *response);
        }
        if (session.status() == PeerSession::Status::ProtocolError) {
            std::cerr << "login: protocol error (parameters out of policy)\n";
            return kExitTransport;
        }
    }

    if (session.status() == PeerSession::Status::Accepted) {
        std::cout << "authentication: success\n";
        return kExitSuccess;
    }
    std::cout << "authentication: failure\n";
    return kExitAuthFailure;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
    std::string scenario = "honest";
    uint64_t seed = 0;
    unsigned rounds = 20;
    unsigned trials = 100;
    unsigned bits = kProductionMinModulusBits;
    bool json = false;
    bool insecure_test = false;
};

int run_simulate(const SimulateArgs& args) {
    if (args.bits < kProductionMinModulusBits && !args.insecure_test) {
        std::cerr << "simulate: refusing modulus below "
                  << kProductionMinModulusBits
                  << " bits without --insecure-test\n";
        return kExitUsage;
    }
    if (args.rounds < 1 || args.trials < 1) {
        std::cerr << "simulate: rounds and trials must be >= 1\n";
        return kExitUsage;
    }

    ScenarioConfig scenario;
    scenario.rounds = static_cast<uint16_t>(args.rounds);
    scenario.modulus_bits = args.bits;
    scenario.seed = args.seed;

    double expected_rate = std::nan("");
    if (args.scenario == "honest") {
        scenario.kind = ScenarioConfig::Kind::Honest;
        expected_rate = 1.0;
    } else if (args.scenario == "wrong-password") {
        scenario.kind = ScenarioConfig::Kind::WrongPassword;
        expected_rate = std::pow(2.0, -static_cast<double>(args.rounds));
    } else if (args.scenario == "cheater") {
        scenario.kind = ScenarioConfig::Kind::Cheater;
        expected_rate = std::pow(2.0, -static_cast<double>(args.rounds));
    } else {
        std::string error;
        const auto plan = parse_fault_scenario(args.scenario, args.rounds, error);
        if (!plan) {
            std::cerr << "simulate: " << error << "\n";
            return kExitUsage;
        }
        scenario.kind = ScenarioConfig::Kind::Honest;
        scenario.faults = *plan;
    }

    const SimulationHarness harness(scenario);
    unsigned accepts = 0;
    unsigned hung = 0;
    std::map<std::size_t, unsigned> frame_histogram;
    for (unsigned trial = 0; trial < args.trials; ++trial) {
        const HandshakeReport report = harness.run_trial(trial);
        if (report.hung) {
            ++hung;
        }
        if (report.authenticator == AuthenticatorSession::Status::Accepted) {
            ++accepts;
        }
        frame_histogram[report.transcript.size()]++;
    }
    const unsigned rejects = args.trials - accepts;
    const double rate = static_cast<double>(accepts) / args.trials;

    double z_score = std::nan("");
    if (!std::isnan(expected_rate) && expected_rate > 0 &&
        expected_rate < 1) {
        const double sigma = std::sqrt(args.trials * expected_rate *
                                       (1 - expected_rate));
        z_score = (accepts - args.trials * expected_rate) / sigma;
    }

    if (args.json) {
        nlohmann::json out{
            {"scenario", args.scenario}, {"seed", args.seed},
            {"m", args.rounds},          {"trials", args.trials},
            {"accepts", accepts},        {"rejects", rejects},
            {"hung", hung},              {"acceptance_rate", rate},
        };
        if (!std::isnan(expected_rate)) {
            out["expected_rate"] = expected_rate;
        }
        if (!std::isnan(z_score)) {
            out["z_score"] = z_score;
        }
        nlohmann::json histogram = nlohmann::json::object();
        for (const auto& [frames, count] : frame_histogram) {
            histogram[std::to_string(frames)] = count;
        }
        out["frame_count_histogram"] = histogram;
        std::cout << out.dump() << "\n";
    } else {
        std::cout << "scenario=" << args.scenario << " seed=" << args.seed
                  << " m=" << args.rounds << " trials=" << args.trials
                  << " accepts=" << accepts << " rejects=" << rejects
                  << " acceptance_rate=" << rate;
        if (!std::isnan(expected_rate)) {
            std::cout << " expected_rate=" << expected_rate;
        }
        if (!std::isnan(z_score)) {
            std::cout << " z=" << z_score;
        }
        std::cout << " hung=" << hung << "\n";
        for (const auto& [frames, count] : frame_histogram) {
            std::cout << "frame_count_" << frames << "=" << count << "\n";
        }
    }
    return hung == 0 ? kExitSuccess : kExitTransport;
}

}  // namespace
}  // namespace zkpeap::cli

int main(int argc, char** argv) {
    using namespace zkpeap::cli;

    CLI::App app{"Zero-knowledge password authentication over EAP (type 84)"};
    app.require_subcommand(1);
    app.fallthrough();  // lets --config appear after the subcommand name
    app.set_config("--config", "", "Configuration file (key=value lines; "
                                   "[section] per subcommand)");

    EnrollArgs enroll_args;
    auto* enroll_cmd =
        app.add_subcommand("enroll", "Create a credential in the registry");
    enroll_cmd->add_option("identity", enroll_args.identity, "Identity to enroll")
        ->required();
    enroll_cmd->add_option("--registry", enroll_args.registry_path, "Registry file")
        ->envname("ZKP_EAP_REGISTRY")
        ->required();
    enroll_cmd->add_option("--password-file", enroll_args.password_file,
                           "Read the password from this file instead of "
                           "prompting");
    enroll_cmd->add_option("--bits", enroll_args.bits, "Modulus size in bits");
    enroll_cmd->add_option("--rounds,-m", enroll_args.rounds,
                           "Verification rounds demanded for this identity");
    enroll_cmd->add_option("--kdf", enroll_args.kdf_name,
                           "Key-stretching profile: scrypt or iterated-hash");
    enroll_cmd->add_option("--kdf-iterations", enroll_args.kdf_iterations,
                           "Iterations for the iterated-hash profile");
    enroll_cmd->add_option("--salt-bytes", enroll_args.salt_bytes,
                           "Salt length in octets");
    enroll_cmd->add_flag("--insecure-test", enroll_args.insecure_test,
                         "Allow sub-512-bit moduli (tests only)");

    ServeArgs serve_args;
    auto* serve_cmd =
        app.add_subcommand("serve", "Run the authenticator daemon");
    serve_cmd->add_option("--registry", serve_args.registry_path, "Registry file")
        ->envname("ZKP_EAP_REGISTRY")
        ->required();
    serve_cmd->add_option("--listen", serve_args.listen_address,
                          "Listen address");
    serve_cmd->add_option("--port", serve_args.port,
                          "TCP port (0 picks an ephemeral port)");
    serve_cmd->add_option("--rounds,-m", serve_args.rounds,
                          "Rounds for decoy credentials");
    serve_cmd->add_option("--bits", serve_args.bits,
                          "Modulus size for decoy credentials");
    serve_cmd->add_option("--timeout-ms", serve_args.timeout_ms,
                          "Per-request retransmit timeout");
    serve_cmd->add_option("--budget", serve_args.budget,
                          "Retransmissions per request before giving up");
    serve_cmd->add_option("--max-sessions", serve_args.max_sessions,
                          "Exit after this many sessions (0 = run forever)");
    serve_cmd->add_flag("--insecure-test", serve_args.insecure_test,
                        "Allow sub-512-bit decoy moduli (tests only)");

    LoginArgs login_args;
    auto* login_cmd = app.add_subcommand("login", "Authenticate to a server");
    login_cmd->add_option("identity", login_args.identity, "Identity to claim")
        ->required();
    login_cmd->add_option("--server", login_args.server, "Server host");
    login_cmd->add_option("--port", login_args.port, "Server TCP port");
    login_cmd->add_option("--password-file", login_args.password_file,
                          "Read the password from this file instead of "
                          "prompting");
    login_cmd->add_option("--kdf", login_args.kdf_name,
                          "Key-stretching profile agreed with the server");
    login_cmd->add_option("--kdf-iterations", login_args.kdf_iterations,
                          "Iterations for the iterated-hash profile");
    login_cmd->add_option("--min-bits", login_args.min_bits,
                          "Smallest acceptable modulus");
    login_cmd->add_option("--timeout-ms", login_args.timeout_ms,
                          "Receive timeout");
    login_cmd->add_option("--max-rounds", login_args.max_rounds,
                          "Refuse to answer more rounds than this");
    login_cmd->add_option("--transcript", login_args.transcript_path,
                          "Dump exchanged frames as hex to this file");
    login_cmd->add_flag("--insecure-test", login_args.insecure_test,
                        "Allow sub-512-bit moduli (tests only)");

    SimulateArgs simulate_args;
    auto* simulate_cmd = app.add_subcommand(
        "simulate", "Run seeded in-memory protocol simulations");
    simulate_cmd->add_option(
        "--scenario", simulate_args.scenario,
        "honest | wrong-password | cheater | fault:<action>@<frame>[:<offset>]"
        " | fault:<action>-<position>");
    simulate_cmd->add_option("--seed", simulate_args.seed, "Simulation seed");
    simulate_cmd->add_option("--rounds,-m", simulate_args.rounds,
                             "Verification rounds");
    simulate_cmd->add_option("--trials", simulate_args.trials, "Trial count");
    simulate_cmd->add_option("--bits", simulate_args.bits,
                             "Modulus size in bits");
    simulate_cmd->add_flag("--json", simulate_args.json,
                           "Emit a JSON report instead of key=value lines");
    simulate_cmd->add_flag("--insecure-test", simulate_args.insecure_test,
                           "Allow sub-512-bit moduli (tests only)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitSuccess : kExitUsage;
    }

    try {
        if (enroll_cmd->parsed()) {
            return run_enroll(enroll_args);
        }
        if (serve_cmd->parsed()) {
            return run_serve(serve_args);
        }
        if (login_cmd->parsed()) {
            return run_login(login_args);
        }
        if (simulate_cmd->parsed()) {
            return run_simulate(simulate_args);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
