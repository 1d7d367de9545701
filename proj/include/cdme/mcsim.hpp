#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cdme/rng.hpp"

namespace cdme {

/// Positions of the currently alive particles.
struct ParticleEnsemble {
  std::vector<double> positions;
  double time = 0.0;
};

struct SimConfig {
  double creation_total = 0.0;  // total birth rate
  std::function<double(double)> creation_density = [](double) { return 1.0; };
  double creation_density_sup = 1.0;
  bool creation_uniform = true;
  double annihilation_rate = 0.0;  // constant pairwise rate
  double horizon = 1.0;
  std::uint64_t replicas = 1;
  std::uint64_t master_seed = 0;
  int histogram_bins = 20;
  int threads = 0;  // 0 = hardware concurrency
  std::uint64_t max_events_per_replica = 10'000'000;
};

struct McEstimate {
  std::vector<double> number_law;         // empirical P(n), n = 0..len-1
  std::vector<double> number_law_stderr;  // binomial standard errors
  std::vector<double> bin_centers;
  std::vector<double> intensity;          // particles per unit length per replica
  std::vector<double> intensity_stderr;   // replica-mean standard errors
  std::uint64_t replicas_used = 0;
  std::vector<std::uint32_t> replica_counts;  // raw dump, filled on request
};

/// Reflects a real line position into [0,1] by the folding (tent) map;
/// distribution-exact for endpoints of reflected Brownian motion.
double fold_unit(double y);

/// Advances every particle by an independent Gaussian increment of
/// variance 2*dt, reflected into [0,1].
void diffuse(std::vector<double>& positions, double dt, CounterRng& rng);

enum class EventKind { creation, annihilation };

struct NextEvent {
  double waiting_time;  // +infinity when no reaction can fire
  EventKind kind;
};

/// Draws the next reaction time and type for a population of n particles.
/// Total rate is gamma + lambda_d * n(n-1)/2; the waiting time is
/// exponential and the type creation with probability gamma/total.
NextEvent next_event(std::size_t n, double creation_total, double annihilation_rate,
                     CounterRng& rng);

/// Appends one particle sampled from the birth density by rejection under
/// density_sup (direct draw when uniform). Throws std::runtime_error if a
/// density evaluation exceeds the declared bound.
void apply_creation(std::vector<double>& positions,
                    const std::function<double(double)>& density, double density_sup,
                    bool uniform, CounterRng& rng);

/// Removes a uniformly chosen unordered pair. Throws std::logic_error
/// with fewer than two particles.
void apply_annihilation(std::vector<double>& positions, CounterRng& rng);

/// One exact trajectory from the empty ensemble to the horizon; fully
/// determined by (master_seed, replica_id).
ParticleEnsemble run_replica(const SimConfig& cfg, std::uint64_t replica_id);

/// Runs cfg.replicas independent replicas (parallelized over threads; the
/// result is bit-identical for any worker count) and aggregates the number
/// law and the position histogram with standard errors.
McEstimate estimate(const SimConfig& cfg, bool keep_replica_counts = false);

}  // namespace cdme
