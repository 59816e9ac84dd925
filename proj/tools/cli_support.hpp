#pragma once

#include "zkpeap/handshake.hpp"

#include <optional>
#include <string>

namespace zkpeap::cli {

// Stable exit codes shared by all subcommands.
inline constexpr int kExitSuccess = 0;
inline constexpr int kExitAuthFailure = 1;   // login: Failure frame received
inline constexpr int kExitUsage = 2;         // bad config, duplicate identity
inline constexpr int kExitTransport = 3;     // connect/timeout/carrier errors

// Wire-format ceiling: a proof must fit its one-octet length field.
inline constexpr unsigned kMaxModulusBits = 2040;
inline constexpr unsigned kProductionMinModulusBits = 512;

/// Reads a password without echoing when stdin is a terminal; from the
/// given file otherwise (first line, trailing newline stripped). Passwords
/// never travel through argv.
std::optional<std::string> read_password(const std::string& password_file,
                                         const std::string& prompt);

/// Builds a KdfConfig from CLI flags.
std::optional<KdfConfig> make_kdf(const std::string& name,
                                  uint32_t iterations, std::string& error);

/// Parses a fault scenario: "fault:ACTION@INDEX[:OFFSET]" with the frame
/// index counted from 0 in transcript order, or "fault:ACTION-NAME" with a
/// symbolic position (identity-request, identity-response, setup-request,
/// setup-response, verify-request-N, verify-response-N, success). Needs m
/// to resolve the symbolic names.
std::optional<FaultPlan> parse_fault_scenario(const std::string& scenario,
                                              unsigned rounds,
                                              std::string& error);

std::string hex_dump(std::span<const uint8_t> bytes);

}  // namespace zkpeap::cli
