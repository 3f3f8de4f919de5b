#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "pnsguard/app/scenario.hpp"

namespace pnsguard::app {

inline constexpr std::string_view kVersion = "1.0.0";

/// Exit codes shared by every entry point.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumerical = 2;

/// Runs the scenario and writes its CSV (metadata block, header, rows) to
/// `out`. Numerical failures propagate as pnsguard::NumericalError.
void execute(const Scenario& s, std::ostream& out);

/// Loads, validates and executes a config file. Output goes to the file named
/// in the config, else to `out`. Returns one of the kExit* codes.
int run_scenario(const std::filesystem::path& config, std::ostream& out, std::ostream& err);

/// Command-line entry point: subcommands attack-sweep, keyrate, convergence,
/// waiting-time, hbt, detect, validate and run.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pnsguard::app
