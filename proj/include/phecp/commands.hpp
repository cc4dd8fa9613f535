// commands.hpp
// Subcommand implementations behind the phecp executable. Each one turns a
// RunConfig into a report file (JSON or CSV), prints a one-line summary and
// returns the process exit code.

#pragma once

#include <exception>
#include <iosfwd>
#include <string>

#include "phecp/config.hpp"
#include "phecp/serialize.hpp"

namespace phecp {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_herald_failed = 3;
inline constexpr int exit_io = 4;

struct CommandOutput {
    Json json;
    std::string csv;
    std::string summary;
    int exit_code = exit_ok;

    std::string artifact(Format format) const { return format == Format::json ? dump(json) : csv; }
};

// Runs the computation without touching the file system.
CommandOutput execute(const RunConfig& config);

// Maps an exception to its exit code (1 for anything unexpected).
int exit_code_for(const std::exception& e);

// Executes, writes config.output_path() and prints the summary to `out`,
// diagnostics to `err`. With path "-" the artifact goes to `out` and the
// summary to `err`.
int run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

int cmd_bell(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_ghz(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_generate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_papd(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_montecarlo(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace phecp
