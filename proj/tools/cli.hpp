#pragma once

#include <string>
#include <vector>

namespace easic::cli {

/// Exit codes of the command-line tool.
enum Exit : int { ok = 0, parse_error = 2, config_error = 3, internal_error = 4, counterexample = 5 };

/// Runs one command line (args[0] is the program name) and returns its exit code.
int run(const std::vector<std::string>& args);

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

} // namespace easic::cli
