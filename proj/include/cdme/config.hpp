#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cdme/basis.hpp"
#include "cdme/generator.hpp"
#include "cdme/mcsim.hpp"

namespace cdme {

/// Validation failure with the offending JSON pointer (or file position)
/// in the message.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct RateSpec {
  enum class Kind { constant, cosine, table };
  Kind kind = Kind::constant;
  double gamma = 1.0;            // constant rate
  std::vector<double> coeffs;    // cosine-series coefficients, mode k at [k-1]
  std::string table_file;        // path to "x,value" rows
};

/// One experiment: model, truncation, time grid, integrator, Monte Carlo
/// settings, output options. Everything a run needs, so a config file plus
/// a seed reproduces it bit for bit.
struct ExperimentConfig {
  RateSpec lambda_c;
  double lambda_d = 1.0;

  int num_modes = 3;
  int max_degree = 14;
  int quadrature_points = 0;  // 0 = 64 * num_modes

  std::vector<double> times = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};

  std::string method = "auto";  // auto | expm | rk4
  double dt = 1e-3;

  std::uint64_t replicas = 100000;
  std::uint64_t master_seed = 20240811;
  int histogram_bins = 20;
  int threads = 0;
  bool dump_counts = false;

  std::string output_dir = "out";
  bool kernel_slices = false;
  int kernel_grid_points = 21;
  int intensity_points = 101;
  bool export_generator = false;

  int effective_quad_points() const {
    return quadrature_points > 0 ? quadrature_points : 64 * num_modes;
  }
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Reads and validates a config file; parse errors carry the byte
/// position reported by the JSON parser.
ExperimentConfig load_config(const std::filesystem::path& path);

std::string config_hash(const ExperimentConfig& cfg);

/// Builds the creation rate the config describes over an N-mode basis.
CreationRate make_creation_rate(const ExperimentConfig& cfg, const ModeBasis& basis);

SimConfig make_sim_config(const ExperimentConfig& cfg, const CreationRate& rate);

/// Resolves "auto" to expm for dims <= 2000 and to rk4 with
/// dt = 1e-3 / max|diag L| otherwise.
IntegratorConfig make_integrator_config(const ExperimentConfig& cfg, const GeneratorMatrix& L);

}  // namespace cdme
