#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cdme/analysis.hpp"
#include "cdme/config.hpp"

namespace cdme {

/// Everything a command persisted, for manifests and determinism checks.
struct CommandResult {
  std::filesystem::path out_dir;
  std::vector<std::string> files;  // relative names, sorted, manifest.json last
};

/// Output directory for a run: CDME_OUTPUT_DIR when set, else the config's.
std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg);

CommandResult cmd_solve_hierarchy(const ExperimentConfig& cfg);
CommandResult cmd_simulate_mc(const ExperimentConfig& cfg);
CommandResult cmd_solve_cme(const ExperimentConfig& cfg);
CommandResult cmd_transfer_check(const ExperimentConfig& cfg);

struct CompareOptions {
  /// Named tolerance overrides (route_equivalence, mass_conservation, ...).
  std::map<std::string, double> tolerance_overrides;
  /// Fault-injection hook: adds delta to one entry of the recursion-route
  /// matrix before the equivalence check.
  struct Perturbation {
    std::size_t row = 0;
    std::size_t col = 0;
    double delta = 0.0;
  };
  std::optional<Perturbation> perturb;
};

/// Runs the cross-route comparison battery and writes report.json.
/// Returns 0 when every check passes, 2 otherwise.
int cmd_compare(const ExperimentConfig& cfg, const CompareOptions& opts,
                nlohmann::json* report_out = nullptr);

/// The individual battery checks, exposed for tests.
std::vector<ComparisonReport> run_compare_battery(const ExperimentConfig& cfg,
                                                  const CompareOptions& opts);

}  // namespace cdme
