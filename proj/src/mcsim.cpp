#include "cdme/mcsim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace cdme {

double fold_unit(double y) {
  double r = std::fmod(y, 2.0);
  if (r < 0.0) r += 2.0;
  return r <= 1.0 ? r : 2.0 - r;
}

void diffuse(std::vector<double>& positions, double dt, CounterRng& rng) {
  if (dt < 0.0) {
    throw std::invalid_argument("diffuse: dt must be >= 0");
  }
  if (dt == 0.0) return;
  const double sd = std::sqrt(2.0 * dt);
  for (double& x : positions) {
    x = fold_unit(x + sd * rng.normal());
  }
}

NextEvent next_event(std::size_t n, double creation_total, double annihilation_rate,
                     CounterRng& rng) {
  const double pair_rate = annihilation_rate * 0.5 * static_cast<double>(n) *
                           static_cast<double>(n > 0 ? n - 1 : 0);
  const double total = creation_total + pair_rate;
  NextEvent ev{rng.exponential(total), EventKind::creation};
  // The type draw happens unconditionally so a replica's draw sequence
  // does not depend on whether the horizon interrupts the event.
  const double u = rng.uniform01();
  if (total > 0.0 && u * total >= creation_total) ev.kind = EventKind::annihilation;
  return ev;
}

void apply_creation(std::vector<double>& positions,
                    const std::function<double(double)>& density, double density_sup,
                    bool uniform, CounterRng& rng) {
  if (uniform) {
    positions.push_back(rng.uniform01());
    return;
  }
  if (density_sup <= 0.0) {
    throw std::runtime_error("apply_creation: rejection bound must be positive");
  }
  constexpr int kMaxTries = 100000;
  for (int tries = 0; tries < kMaxTries; ++tries) {
    const double x = rng.uniform01();
    const double u = rng.uniform01();
    const double d = density(x);
    if (d > density_sup) {
      throw std::runtime_error("apply_creation: density exceeds its declared sup at x=" +
                               std::to_string(x));
    }
    if (u * density_sup < d) {
      positions.push_back(x);
      return;
    }
  }
  throw std::runtime_error("apply_creation: rejection sampling failed to accept");
}

void apply_annihilation(std::vector<double>& positions, CounterRng& rng) {
  const std::size_t n = positions.size();
  if (n < 2) {
    throw std::logic_error("apply_annihilation: needs at least two particles");
  }
  const auto i = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(n));
  auto j = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(n - 1));
  if (j >= i) ++j;
  const auto hi = std::max(i, j);
  const auto lo = std::min(i, j);
  positions.erase(positions.begin() + static_cast<std::ptrdiff_t>(hi));
  positions.erase(positions.begin() + static_cast<std::ptrdiff_t>(lo));
}

ParticleEnsemble run_replica(const SimConfig& cfg, std::uint64_t replica_id) {
  CounterRng rng(cfg.master_seed, replica_id);
  ParticleEnsemble ens;
  double t = 0.0;
  std::uint64_t events = 0;
  while (true) {
    const NextEvent ev = next_event(ens.positions.size(), cfg.creation_total,
                                    cfg.annihilation_rate, rng);
    const double remaining = cfg.horizon - t;
    if (!(ev.waiting_time < remaining)) {
      diffuse(ens.positions, remaining, rng);
      break;
    }
    diffuse(ens.positions, ev.waiting_time, rng);
    t += ev.waiting_time;
    if (ev.kind == EventKind::creation) {
      apply_creation(ens.positions, cfg.creation_density, cfg.creation_density_sup,
                     cfg.creation_uniform, rng);
    } else {
      apply_annihilation(ens.positions, rng);
    }
    if (++events > cfg.max_events_per_replica) {
      throw std::runtime_error("run_replica: event cap exceeded; parameters look runaway");
    }
  }
  ens.time = cfg.horizon;
  return ens;
}

namespace {

struct Partial {
  std::vector<std::uint64_t> count_hist;
  std::vector<std::uint64_t> bin_sum;
  std::vector<std::uint64_t> bin_sumsq;
};

}  // namespace

McEstimate estimate(const SimConfig& cfg, bool keep_replica_counts) {
  if (cfg.replicas < 2) {
    throw std::invalid_argument("estimate: needs at least 2 replicas");
  }
  if (cfg.histogram_bins < 1) {
    throw std::invalid_argument("estimate: needs at least 1 histogram bin");
  }
  const std::uint64_t R = cfg.replicas;
  const int bins = cfg.histogram_bins;

  unsigned n_threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                       : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<std::uint64_t>(n_threads, R));

  std::vector<Partial> partials(n_threads);
  std::vector<std::uint32_t> raw_counts;
  if (keep_replica_counts) raw_counts.assign(R, 0);

  auto worker = [&](unsigned tid) {
    Partial& p = partials[tid];
    p.bin_sum.assign(bins, 0);
    p.bin_sumsq.assign(bins, 0);
    std::vector<std::uint32_t> bin_count(bins);
    const std::uint64_t chunk = (R + n_threads - 1) / n_threads;
    const std::uint64_t begin = tid * chunk;
    const std::uint64_t end = std::min(R, begin + chunk);
    for (std::uint64_t r = begin; r < end; ++r) {
      const ParticleEnsemble ens = run_replica(cfg, r);
      const std::size_t n = ens.positions.size();
      if (p.count_hist.size() <= n) p.count_hist.resize(n + 1, 0);
      ++p.count_hist[n];
      if (keep_replica_counts) raw_counts[r] = static_cast<std::uint32_t>(n);
      std::fill(bin_count.begin(), bin_count.end(), 0);
      for (double x : ens.positions) {
        auto b = static_cast<int>(x * bins);
        if (b == bins) b = bins - 1;  // x == 1.0 lands in the last bin
        ++bin_count[b];
      }
      for (int b = 0; b < bins; ++b) {
        p.bin_sum[b] += bin_count[b];
        p.bin_sumsq[b] += static_cast<std::uint64_t>(bin_count[b]) * bin_count[b];
      }
    }
  };

  if (n_threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) threads.emplace_back(worker, t);
    for (auto& t : threads) t.join();
  }

  // Integer merges are exact, so the result does not depend on the worker
  // count or on merge order.
  std::vector<std::uint64_t> count_hist;
  std::vector<std::uint64_t> bin_sum(bins, 0);
  std::vector<std::uint64_t> bin_sumsq(bins, 0);
  for (const Partial& p : partials) {
    if (p.count_hist.size() > count_hist.size()) count_hist.resize(p.count_hist.size(), 0);
    for (std::size_t n = 0; n < p.count_hist.size(); ++n) count_hist[n] += p.count_hist[n];
    for (int b = 0; b < bins; ++b) {
      bin_sum[b] += p.bin_sum[b];
      bin_sumsq[b] += p.bin_sumsq[b];
    }
  }
  if (count_hist.empty()) count_hist.push_back(R);

  McEstimate est;
  est.replicas_used = R;
  const auto dR = static_cast<double>(R);
  est.number_law.resize(count_hist.size());
  est.number_law_stderr.resize(count_hist.size());
  for (std::size_t n = 0; n < count_hist.size(); ++n) {
    const double p = static_cast<double>(count_hist[n]) / dR;
    est.number_law[n] = p;
    est.number_law_stderr[n] = std::sqrt(p * (1.0 - p) / dR);
  }
  const double width = 1.0 / bins;
  est.bin_centers.resize(bins);
  est.intensity.resize(bins);
  est.intensity_stderr.resize(bins);
  for (int b = 0; b < bins; ++b) {
    est.bin_centers[b] = (b + 0.5) * width;
    const double sum = static_cast<double>(bin_sum[b]);
    const double sumsq = static_cast<double>(bin_sumsq[b]);
    const double mean = sum / dR;
    const double var = (sumsq - sum * mean) / (dR - 1.0);
    est.intensity[b] = mean / width;
    est.intensity_stderr[b] = std::sqrt(std::max(0.0, var) / dR) / width;
  }
  if (keep_replica_counts) est.replica_counts = std::move(raw_counts);
  return est;
}

}  // namespace cdme
