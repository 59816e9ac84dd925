#include "cli_support.hpp"

#include <termios.h>
#include <unistd.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>

namespace zkpeap::cli {
namespace {

std::optional<std::string> prompt_no_echo(const std::string& prompt) {
    std::fprintf(stderr, "%s", prompt.c_str());
    std::fflush(stderr);

    termios saved{};
    if (tcgetattr(STDIN_FILENO, &saved) != 0) {
        return std::nullopt;
    }
    termios quiet = saved;
    quiet.c_lflag &= ~static_cast<tcflag_t>(ECHO);
    tcsetattr(STDIN_FILENO, TCSAFLUSH, &quiet);

    std::string line;
    const bool ok = static_cast<bool>(std::getline(std::cin, line));
    tcsetattr(STDIN_FILENO, TCSAFLUSH, &saved);
    std::fprintf(stderr, "\n");
    if (!ok) {
        return std::nullopt;
    }
    return line;
}

bool parse_size(std::string_view text, std::size_t& out) {
    const auto* begin = text.data();
    const auto* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end;
}

}  // namespace

std::optional<std::string> read_password(const std::string& password_file,
                                         const std::string& prompt) {
    if (!password_file.empty()) {
        std::ifstream in(password_file, std::ios::binary);
        if (!in) {
            return std::nullopt;
        }
        std::string line;
        if (!std::getline(in, line)) {
            return std::nullopt;
        }
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        return line;
    }
    if (isatty(STDIN_FILENO)) {
        return prompt_no_echo(prompt);
    }
    std::string line;
    if (!std::getline(std::cin, line)) {
        return std::nullopt;
    }
    return line;
}

std::optional<KdfConfig> make_kdf(const std::string& name,
                                  uint32_t iterations, std::string& error) {
    if (name == "scrypt") {
        return KdfConfig::scrypt_default();
    }
    if (name == "iterated-hash") {
        KdfConfig config = KdfConfig::iterated_hash(iterations);
        try {
            config.validate();
        } catch (const KdfError& e) {
            error = e.what();
            return std::nullopt;
        }
        return config;
    }
    error = "unknown KDF '" + name + "' (expected scrypt or iterated-hash)";
    return std::nullopt;
}

std::optional<FaultPlan> parse_fault_scenario(const std::string& scenario,
                                              unsigned rounds,
                                              std::string& error) {
    constexpr std::string_view kPrefix = "fault:";
    if (!scenario.starts_with(kPrefix)) {
        error = "fault scenario must start with 'fault:'";
        return std::nullopt;
    }
    std::string_view rest{scenario};
    rest.remove_prefix(kPrefix.size());

    FaultAction action;
    if (rest.starts_with("drop")) {
        action = FaultAction::Drop;
        rest.remove_prefix(4);
    } else if (rest.starts_with("duplicate")) {
        action = FaultAction::Duplicate;
        rest.remove_prefix(9);
    } else if (rest.starts_with("dup")) {
        action = FaultAction::Duplicate;
        rest.remove_prefix(3);
    } else if (rest.starts_with("corrupt")) {
        action = FaultAction::Corrupt;
        rest.remove_prefix(7);
    } else if (rest.starts_with("truncate")) {
        action = FaultAction::Truncate;
        rest.remove_prefix(8);
    } else {
        error = "unknown fault action in '" + scenario + "'";
        return std::nullopt;
    }

    FaultSpec spec{0, action, SIZE_MAX};
    if (rest.starts_with("@")) {
        rest.remove_prefix(1);
        std::string_view index_part = rest;
        std::string_view offset_part;
        if (const auto colon = rest.find(':'); colon != std::string_view::npos) {
            index_part = rest.substr(0, colon);
            offset_part = rest.substr(colon + 1);
        }
        if (!parse_size(index_part, spec.frame_index)) {
            error = "bad frame index in '" + scenario + "'";
            return std::nullopt;
        }
        if (!offset_part.empty() && !parse_size(offset_part, spec.offset)) {
            error = "bad byte offset in '" + scenario + "'";
            return std::nullopt;
        }
    } else if (rest.starts_with("-")) {
        rest.remove_prefix(1);
        const std::string name{rest};
        const auto verify_round_index = [&](std::string_view prefix,
                                            std::size_t base) -> bool {
            if (!rest.starts_with(prefix)) {
                return false;
            }
            std::size_t n = 0;
            if (!parse_size(rest.substr(prefix.size()), n) || n < 1 ||
                n > rounds) {
                return false;
            }
            spec.frame_index = base + 2 * (n - 1);
            return true;
        };
        if (name == "identity-request") {
            spec.frame_index = 0;
        } else if (name == "identity-response") {
            spec.frame_index = 1;
        } else if (name == "setup-request") {
            spec.frame_index = 2;
        } else if (name == "setup-response") {
            spec.frame_index = 3;
        } else if (name == "success") {
            spec.frame_index = 2 * std::size_t{rounds} + 4;
        } else if (verify_round_index("verify-request-", 4) ||
                   verify_round_index("verify-response-", 5)) {
            // index set by the helper
        } else {
            error = "unknown frame position '" + name + "'";
            return std::nullopt;
        }
    } else {
        error = "expected '@index' or '-position' in '" + scenario + "'";
        return std::nullopt;
    }

    FaultPlan plan;
    plan.faults.push_back(spec);
    return plan;
}

std::string hex_dump(std::span<const uint8_t> bytes) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 3);
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        if (i > 0) {
            out.push_back(' ');
        }
        out.push_back(kDigits[bytes[i] >> 4]);
        out.push_back(kDigits[bytes[i] & 0xF]);
    }
    return out;
}

}  // namespace zkpeap::cli
