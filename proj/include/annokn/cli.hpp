#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

namespace annokn {

inline constexpr const char* kToolVersion = "0.1.0";

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitUsage = 2 };

/// Entry point of the `annokn` tool (subcommands simulate, fit, fit-ss,
/// knockoff-gen, report). Never throws; errors become exit codes with a
/// message on `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Hex SHA-256 of the raw bytes of a file.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace annokn
