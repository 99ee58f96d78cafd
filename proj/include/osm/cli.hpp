#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "osm/config.hpp"

namespace osm {

enum ExitCode : int { exit_ok = 0, exit_failure = 1, exit_config = 2, exit_local_solvability = 3 };

/// Each command writes its files under `out` and a short summary to `log`,
/// and returns an ExitCode. Exceptions are left to run_command.
int cmd_solve(const RunConfig& cfg, std::uint64_t seed, const std::filesystem::path& out, std::ostream& log);
int cmd_verify(const RunConfig& cfg, std::uint64_t seed, const std::filesystem::path& out, std::ostream& log);
int cmd_spectrum(const RunConfig& cfg, std::uint64_t seed, const std::filesystem::path& out, std::ostream& log);
int cmd_sweep(const RunConfig& cfg, std::uint64_t seed, const std::filesystem::path& out, std::ostream& log);

/// Relative L2 error of a nodal P1 field against the manufactured solution.
double manufactured_l2_error(const RunConfig& cfg, const Mesh& mesh, const Vec& u);

/// Parses the config, dispatches, and maps errors onto exit codes.
/// An empty `out` means the config's output entry.
int run_command(const std::string& command, const std::string& config_path, std::uint64_t seed,
                const std::string& out, std::ostream& log, std::ostream& err);

}  // namespace osm
