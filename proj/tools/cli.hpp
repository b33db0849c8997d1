#pragma once
// rabi_spectra command-line front end.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rabi/solver.hpp"

namespace rabi::cli {

constexpr int kExitOk = 0;
constexpr int kExitNumeric = 2;
constexpr int kExitUsage = 64;

/// key=value lines overriding ScanConfig fields; '#' starts a comment.
/// Throws std::invalid_argument on unknown keys or malformed values.
ScanConfig read_config(const std::filesystem::path& path, ScanConfig base = {});

/// "lo:hi" with lo < hi.
Window parse_range(const std::string& text);

/// "l0:l1xm0:m1".
std::pair<Window, Window> parse_window(const std::string& text);

/// Runs one command (args exclude the program name) and returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rabi::cli
