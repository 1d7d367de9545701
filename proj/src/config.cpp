#include "cdme/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "cdme/io.hpp"

namespace cdme {

namespace {

void fail(const std::string& pointer, const std::string& msg) {
  throw ConfigError(pointer + ": " + msg);
}

double get_number(const nlohmann::json& j, const std::string& pointer, double min_value,
                  double fallback, bool required = false) {
  const nlohmann::json::json_pointer p(pointer);
  if (!j.contains(p)) {
    if (required) fail(pointer, "missing required value");
    return fallback;
  }
  if (!j.at(p).is_number()) fail(pointer, "must be a number");
  const double v = j.at(p).get<double>();
  if (v < min_value) fail(pointer, "must be >= " + format_double(min_value));
  return v;
}

std::int64_t get_integer(const nlohmann::json& j, const std::string& pointer,
                         std::int64_t min_value, std::int64_t fallback) {
  const nlohmann::json::json_pointer p(pointer);
  if (!j.contains(p)) return fallback;
  if (!j.at(p).is_number_integer()) fail(pointer, "must be an integer");
  const auto v = j.at(p).get<std::int64_t>();
  if (v < min_value) fail(pointer, "must be >= " + std::to_string(min_value));
  return v;
}

bool get_bool(const nlohmann::json& j, const std::string& pointer, bool fallback) {
  const nlohmann::json::json_pointer p(pointer);
  if (!j.contains(p)) return fallback;
  if (!j.at(p).is_boolean()) fail(pointer, "must be a boolean");
  return j.at(p).get<bool>();
}

std::string get_string(const nlohmann::json& j, const std::string& pointer,
                       const std::string& fallback) {
  const nlohmann::json::json_pointer p(pointer);
  if (!j.contains(p)) return fallback;
  if (!j.at(p).is_string()) fail(pointer, "must be a string");
  return j.at(p).get<std::string>();
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;

  if (j.contains("/model/lambda_c"_json_pointer)) {
    const auto& rate = j.at("/model/lambda_c"_json_pointer);
    const std::string type = get_string(j, "/model/lambda_c/type", "constant");
    if (type == "constant") {
      cfg.lambda_c.kind = RateSpec::Kind::constant;
      cfg.lambda_c.gamma = get_number(j, "/model/lambda_c/gamma", 0.0, 1.0, true);
    } else if (type == "cosine") {
      cfg.lambda_c.kind = RateSpec::Kind::cosine;
      if (!rate.contains("coeffs") || !rate.at("coeffs").is_array() || rate.at("coeffs").empty()) {
        fail("/model/lambda_c/coeffs", "must be a non-empty array of numbers");
      }
      cfg.lambda_c.coeffs = rate.at("coeffs").get<std::vector<double>>();
      if (cfg.lambda_c.coeffs[0] < 0.0) {
        fail("/model/lambda_c/coeffs", "constant coefficient must be >= 0");
      }
      cfg.lambda_c.gamma = cfg.lambda_c.coeffs[0];
    } else if (type == "table") {
      cfg.lambda_c.kind = RateSpec::Kind::table;
      cfg.lambda_c.table_file = get_string(j, "/model/lambda_c/file", "");
      if (cfg.lambda_c.table_file.empty()) {
        fail("/model/lambda_c/file", "missing table path");
      }
      cfg.lambda_c.gamma = 0.0;  // determined by projection
    } else {
      fail("/model/lambda_c/type", "must be one of constant|cosine|table");
    }
  }
  cfg.lambda_d = get_number(j, "/model/lambda_d", 0.0, cfg.lambda_d);

  cfg.num_modes = static_cast<int>(get_integer(j, "/truncation/num_modes", 1, cfg.num_modes));
  cfg.max_degree = static_cast<int>(get_integer(j, "/truncation/max_degree", 0, cfg.max_degree));
  cfg.quadrature_points =
      static_cast<int>(get_integer(j, "/truncation/quadrature_points", 0, cfg.quadrature_points));

  if (j.contains("times")) {
    if (!j.at("times").is_array() || j.at("times").empty()) {
      fail("/times", "must be a non-empty array");
    }
    cfg.times = j.at("times").get<std::vector<double>>();
    double prev = -1.0;
    for (double t : cfg.times) {
      if (t < 0.0) fail("/times", "times must be non-negative");
      if (t <= prev) fail("/times", "times must be strictly increasing");
      prev = t;
    }
  }

  cfg.method = get_string(j, "/integrator/method", cfg.method);
  if (cfg.method != "auto" && cfg.method != "expm" && cfg.method != "rk4") {
    fail("/integrator/method", "must be one of auto|expm|rk4");
  }
  cfg.dt = get_number(j, "/integrator/dt", 0.0, cfg.dt);
  if (cfg.dt <= 0.0) fail("/integrator/dt", "must be > 0");

  cfg.replicas = static_cast<std::uint64_t>(
      get_integer(j, "/mc/replicas", 2, static_cast<std::int64_t>(cfg.replicas)));
  cfg.master_seed = static_cast<std::uint64_t>(
      get_integer(j, "/mc/master_seed", 0, static_cast<std::int64_t>(cfg.master_seed)));
  cfg.histogram_bins =
      static_cast<int>(get_integer(j, "/mc/histogram_bins", 1, cfg.histogram_bins));
  cfg.threads = static_cast<int>(get_integer(j, "/mc/threads", 0, cfg.threads));
  cfg.dump_counts = get_bool(j, "/mc/dump_counts", cfg.dump_counts);

  cfg.output_dir = get_string(j, "/output/directory", cfg.output_dir);
  cfg.kernel_slices = get_bool(j, "/output/kernel_slices", cfg.kernel_slices);
  cfg.kernel_grid_points =
      static_cast<int>(get_integer(j, "/output/kernel_grid_points", 2, cfg.kernel_grid_points));
  cfg.intensity_points =
      static_cast<int>(get_integer(j, "/output/intensity_points", 2, cfg.intensity_points));
  cfg.export_generator = get_bool(j, "/output/export_generator", cfg.export_generator);
  return cfg;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json rate;
  switch (cfg.lambda_c.kind) {
    case RateSpec::Kind::constant:
      rate = {{"type", "constant"}, {"gamma", cfg.lambda_c.gamma}};
      break;
    case RateSpec::Kind::cosine:
      rate = {{"type", "cosine"}, {"coeffs", cfg.lambda_c.coeffs}};
      break;
    case RateSpec::Kind::table:
      rate = {{"type", "table"}, {"file", cfg.lambda_c.table_file}};
      break;
  }
  return {
      {"model", {{"lambda_c", rate}, {"lambda_d", cfg.lambda_d}}},
      {"truncation",
       {{"num_modes", cfg.num_modes},
        {"max_degree", cfg.max_degree},
        {"quadrature_points", cfg.quadrature_points}}},
      {"times", cfg.times},
      {"integrator", {{"method", cfg.method}, {"dt", cfg.dt}}},
      {"mc",
       {{"replicas", cfg.replicas},
        {"master_seed", cfg.master_seed},
        {"histogram_bins", cfg.histogram_bins},
        {"threads", cfg.threads},
        {"dump_counts", cfg.dump_counts}}},
      {"output",
       {{"directory", cfg.output_dir},
        {"kernel_slices", cfg.kernel_slices},
        {"kernel_grid_points", cfg.kernel_grid_points},
        {"intensity_points", cfg.intensity_points},
        {"export_generator", cfg.export_generator}}},
  };
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file " + path.string());
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

std::string config_hash(const ExperimentConfig& cfg) {
  // The hash identifies the experiment, not its storage location, so the
  // output directory is excluded; re-runs into different directories stay
  // byte-identical.
  nlohmann::json j = config_to_json(cfg);
  j["output"].erase("directory");
  return sha256_hex(j.dump());
}

namespace {

std::pair<std::vector<double>, std::vector<double>> load_rate_table(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open rate table " + path);
  }
  std::vector<double> xs, vals;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double x, v;
    if (!(ss >> x >> v)) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected 'x,value'");
    }
    xs.push_back(x);
    vals.push_back(v);
  }
  return {std::move(xs), std::move(vals)};
}

}  // namespace

CreationRate make_creation_rate(const ExperimentConfig& cfg, const ModeBasis& basis) {
  const int quad = cfg.effective_quad_points();
  switch (cfg.lambda_c.kind) {
    case RateSpec::Kind::constant:
      return constant_creation_rate(basis, cfg.lambda_c.gamma);
    case RateSpec::Kind::cosine:
      return cosine_creation_rate(basis, cfg.lambda_c.coeffs, quad);
    case RateSpec::Kind::table: {
      auto [xs, vals] = load_rate_table(cfg.lambda_c.table_file);
      return tabulated_creation_rate(basis, xs, vals, quad);
    }
  }
  throw ConfigError("unreachable rate kind");
}

SimConfig make_sim_config(const ExperimentConfig& cfg, const CreationRate& rate) {
  SimConfig sim;
  sim.creation_total = rate.total_rate;
  sim.creation_density = rate.density;
  sim.creation_density_sup = rate.density_sup;
  sim.creation_uniform = rate.uniform;
  sim.annihilation_rate = cfg.lambda_d;
  sim.horizon = cfg.times.back();
  sim.replicas = cfg.replicas;
  sim.master_seed = cfg.master_seed;
  sim.histogram_bins = cfg.histogram_bins;
  sim.threads = cfg.threads;
  return sim;
}

IntegratorConfig make_integrator_config(const ExperimentConfig& cfg, const GeneratorMatrix& L) {
  IntegratorConfig ic;
  ic.output_times = cfg.times;
  ic.dt = cfg.dt;
  if (cfg.method == "expm") {
    ic.method = IntegratorConfig::Method::expm;
  } else if (cfg.method == "rk4") {
    ic.method = IntegratorConfig::Method::rk4;
  } else {  // auto: exact where affordable, stabilized steps elsewhere
    if (L.dim() <= 2000) {
      ic.method = IntegratorConfig::Method::expm;
    } else {
      ic.method = IntegratorConfig::Method::rk4;
      const double diag = L.max_abs_diagonal();
      if (diag > 0.0) ic.dt = 1e-3 / diag;
    }
  }
  return ic;
}

}  // namespace cdme
