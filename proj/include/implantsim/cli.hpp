// Command-line surface: sweep-depth, sweep-backscatter, simulate, linkbudget.
// Exit codes: 0 success, 2 validation error (all violations listed on stderr),
// 3 I/O or runtime failure.

#pragma once

#include <iosfwd>
#include <string>

#include "implantsim/config.hpp"

namespace implantsim {

// Per-command entry points; `out_dir` receives the CSV/trace files.
void cmd_sweep_depth(const AppConfig& app, const std::string& out_dir, int threads);
void cmd_sweep_backscatter(const AppConfig& app, const std::string& out_dir);
void cmd_simulate(const AppConfig& app, const std::string& out_dir);
void cmd_linkbudget(const AppConfig& app, std::ostream& out);

// Full argv-level entry point used by the binary and the CLI tests.
int run_cli(int argc, const char* const* argv);

}  // namespace implantsim
