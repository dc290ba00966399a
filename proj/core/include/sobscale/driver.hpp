#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sobscale {

/// Invocation of one subcommand against one self-describing config file.
struct RunOptions {
  std::string subcommand;
  std::string config_path;
  std::string out_dir = ".";
  int jobs = 1;
  std::optional<std::uint64_t> seed;  ///< overrides the config seed everywhere
  /// Named tolerance overrides (e.g. {"plateau_tol", 0.1}); keys must match
  /// the config's `tolerances` section.
  std::vector<std::pair<std::string, double>> tolerances;
};

/// Names accepted as subcommands, in display order.
const std::vector<std::string>& subcommand_names();

/// Runs the subcommand: parses the config strictly (unknown fields are
/// errors), executes each configured experiment (in parallel when jobs > 1),
/// writes one JSON report plus one CSV of observations per experiment into
/// out_dir (atomically), and prints a one-line summary per report.
/// Returns the process exit status: 0 when everything passed, 2 when any
/// check failed, 3 when nothing failed but something was inconclusive, and
/// 1 on usage or config errors.
int run(const RunOptions& options);

}  // namespace sobscale
