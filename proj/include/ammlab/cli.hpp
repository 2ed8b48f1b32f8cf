#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ammlab/config.hpp"
#include "ammlab/output.hpp"

namespace ammlab::cli {

inline constexpr std::string_view kToolName = "amm_lab";
inline constexpr std::string_view kVersion = "1.0.0";

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kConfigError = 2,
    kResourceError = 3,
    kNumericalError = 4,
};

// One resolved command: what to run and with which settings. The thread
// count affects speed only, never the output.
struct Invocation {
    std::string command;     // simulate, analytic, sweep
    std::string subcommand;  // analytic kind or sweep axis; empty for simulate
    config::Settings settings;
    unsigned threads{0};
};

// Runs the command and returns its files. Throws the library's exceptions.
output::Bundle execute(const Invocation& inv);

// Rebuilds the invocation recorded in a manifest.json document.
Invocation invocation_from_manifest(std::string_view manifest_text);

// Column layout of every emitted table, one line per file.
std::string schema_text();

// Entry point of the command-line tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ammlab::cli
