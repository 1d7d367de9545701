#include "cdme/generator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

#include "cdme/io.hpp"
#include "cdme/quadrature.hpp"

namespace cdme {

GeneratorMatrix::GeneratorMatrix(SpacePtr space, GeneratorParams params,
                                 std::vector<Triplet> entries)
    : space_(std::move(space)), params_(std::move(params)) {
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  const std::size_t dim = space_->size();
  row_ptr_.assign(dim + 1, 0);
  cols_.reserve(entries.size());
  values_.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size();) {
    std::size_t j = i;
    double v = 0.0;
    while (j < entries.size() && entries[j].row == entries[i].row &&
           entries[j].col == entries[i].col) {
      v += entries[j].value;
      ++j;
    }
    if (v != 0.0) {
      cols_.push_back(entries[i].col);
      values_.push_back(v);
      ++row_ptr_[entries[i].row + 1];
    }
    i = j;
  }
  for (std::size_t r = 0; r < dim; ++r) row_ptr_[r + 1] += row_ptr_[r];
}

double GeneratorMatrix::entry(std::size_t row, std::size_t col) const {
  if (row >= dim() || col >= dim()) {
    throw std::out_of_range("GeneratorMatrix::entry: index out of range");
  }
  for (std::size_t p = row_ptr_[row]; p < row_ptr_[row + 1]; ++p) {
    if (cols_[p] == col) return values_[p];
  }
  return 0.0;
}

void GeneratorMatrix::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t dim = space_->size();
  if (x.size() != dim || y.size() != dim) {
    throw std::invalid_argument("GeneratorMatrix::apply: vector size mismatch");
  }
  for (std::size_t r = 0; r < dim; ++r) {
    double s = 0.0;
    for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
      s += values_[p] * x[cols_[p]];
    }
    y[r] = s;
  }
}

std::vector<double> GeneratorMatrix::apply(const std::vector<double>& x) const {
  std::vector<double> y(x.size());
  apply(x, y);
  return y;
}

double GeneratorMatrix::max_abs_diagonal() const {
  double best = 0.0;
  for (std::size_t r = 0; r + 1 < row_ptr_.size(); ++r) {
    for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
      if (cols_[p] == r) best = std::max(best, std::abs(values_[p]));
    }
  }
  return best;
}

DenseMatrix GeneratorMatrix::to_dense() const {
  DenseMatrix m(static_cast<int>(dim()), static_cast<int>(dim()));
  for_each_entry([&](std::size_t r, std::size_t c, double v) {
    m(static_cast<int>(r), static_cast<int>(c)) = v;
  });
  return m;
}

void GeneratorMatrix::write_coo(std::ostream& os) const {
  for_each_entry([&](std::size_t r, std::size_t c, double v) {
    os << r << ' ' << c << ' ' << format_double(v) << '\n';
  });
}

GeneratorMatrix assemble_from_genfun(SpacePtr space, const ModeBasis& basis,
                                     const CreationRate& creation,
                                     double annihilation_rate) {
  if (annihilation_rate < 0.0) {
    throw std::invalid_argument("assemble_from_genfun: annihilation rate must be >= 0");
  }
  if (creation.total_rate < 0.0) {
    throw std::invalid_argument("assemble_from_genfun: creation rate must be >= 0");
  }
  const MultiIndexSpace& sp = *space;
  const int N = sp.num_modes();
  const int M = sp.max_degree();
  if (basis.num_modes() != N || static_cast<int>(creation.mode_coeffs.size()) != N) {
    throw std::invalid_argument("assemble_from_genfun: basis/rate size does not match the space");
  }
  const double gamma = creation.total_rate;
  const double lam = annihilation_rate;

  GeneratorParams params{gamma, creation.mode_coeffs, lam, basis.eigenvalues()};
  std::vector<Triplet> trips;
  trips.reserve(sp.size() * (2 + N));

  MultiIndex work(N);
  for (std::size_t i = 0; i < sp.size(); ++i) {
    const MultiIndex& beta = sp.at(i);
    const int deg = degree(beta);
    const auto row = static_cast<std::uint32_t>(i);

    double diag = -gamma - 0.5 * lam * deg * (deg - 1);
    for (int k = 0; k < N; ++k) diag -= params.eigenvalues[k] * beta[k];
    trips.push_back({row, row, diag});

    if (lam != 0.0 && deg + 2 <= M) {
      work = beta;
      work[0] += 2;
      const auto col = sp.find(work);
      trips.push_back({row, static_cast<std::uint32_t>(col),
                       0.5 * lam * (beta[0] + 2) * (beta[0] + 1)});
    }

    for (int k = 0; k < N; ++k) {
      if (beta[k] == 0 || params.creation_coeffs[k] == 0.0) continue;
      work = beta;
      work[k] -= 1;
      const auto col = sp.find(work);
      trips.push_back({row, static_cast<std::uint32_t>(col), params.creation_coeffs[k]});
    }
  }
  return GeneratorMatrix(std::move(space), std::move(params), std::move(trips));
}

namespace {

// Distinct orderings of the sorted 0-based mode tuple of a multi-index.
std::vector<std::vector<int>> mode_tuples(const MultiIndex& alpha) {
  std::vector<int> sorted;
  for (int k = 0; k < static_cast<int>(alpha.size()); ++k) {
    sorted.insert(sorted.end(), alpha[k], k);
  }
  std::vector<std::vector<int>> out;
  if (sorted.empty()) {
    out.push_back({});
    return out;
  }
  do {
    out.push_back(sorted);
  } while (std::next_permutation(sorted.begin(), sorted.end()));
  return out;
}

std::vector<int> sorted_tuple(const MultiIndex& beta) {
  std::vector<int> t;
  for (int k = 0; k < static_cast<int>(beta.size()); ++k) {
    t.insert(t.end(), beta[k], k);
  }
  return t;
}

}  // namespace

GeneratorMatrix assemble_from_cdme(SpacePtr space, const ModeBasis& basis,
                                   const CreationRate& creation,
                                   double annihilation_rate, int quad_points) {
  if (annihilation_rate < 0.0) {
    throw std::invalid_argument("assemble_from_cdme: annihilation rate must be >= 0");
  }
  const MultiIndexSpace& sp = *space;
  const int N = sp.num_modes();
  const int M = sp.max_degree();
  if (basis.num_modes() != N || static_cast<int>(creation.mode_coeffs.size()) != N) {
    throw std::invalid_argument("assemble_from_cdme: basis/rate size does not match the space");
  }
  if (quad_points < 2 * N) {
    throw std::invalid_argument("assemble_from_cdme: quad_points must be >= 2*num_modes");
  }
  const double lam = annihilation_rate;

  // All 1-d building blocks are produced by quadrature here, independently
  // of the coefficients the recursion route uses.
  const QuadratureRule rule = gauss_legendre(quad_points);
  auto rate_at = [&](double x) {
    return creation.total_rate == 0.0 ? 0.0 : creation.total_rate * creation.density(x);
  };

  std::vector<std::vector<double>> gram(N, std::vector<double>(N, 0.0));
  std::vector<std::vector<double>> diff(N, std::vector<double>(N, 0.0));
  std::vector<double> mode_integral(N, 0.0);
  std::vector<double> rate_proj(N, 0.0);
  double gamma_quad = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double x = rule.nodes[q];
    const double w = rule.weights[q];
    const double r = rate_at(x);
    gamma_quad += w * r;
    std::vector<double> xi(N), xi2(N);
    for (int k = 1; k <= N; ++k) {
      xi[k - 1] = basis.eval(k, x);
      xi2[k - 1] = basis.eval_second_derivative(k, x);
    }
    for (int j = 0; j < N; ++j) {
      mode_integral[j] += w * xi[j];
      rate_proj[j] += w * r * xi[j];
      for (int k = 0; k < N; ++k) {
        gram[j][k] += w * xi[j] * xi[k];
        diff[j][k] += w * xi2[j] * xi[k];
      }
    }
  }

  GeneratorParams params{gamma_quad, rate_proj, lam, basis.eigenvalues()};
  std::vector<Triplet> trips;

  for (std::size_t a = 0; a < sp.size(); ++a) {
    const MultiIndex& alpha = sp.at(a);
    const int n = degree(alpha);
    const auto tuples = mode_tuples(alpha);
    const double col_norm = multi_factorial(alpha) / factorial(n);  // alpha!/n!
    const auto col = static_cast<std::uint32_t>(a);

    // Same level: diffusion plus the two loss terms.
    const double loss = 0.5 * lam * n * (n - 1) + gamma_quad;
    for (std::size_t r = sp.degree_begin(n); r < sp.degree_end(n); ++r) {
      const MultiIndex& beta = sp.at(r);
      const std::vector<int> k_tuple = sorted_tuple(beta);
      double s_diff = 0.0;
      double s_gram = 0.0;
      for (const auto& j_tuple : tuples) {
        double gp = 1.0;
        for (int l = 0; l < n; ++l) gp *= gram[j_tuple[l]][k_tuple[l]];
        s_gram += gp;
        for (int i = 0; i < n; ++i) {
          double p = diff[j_tuple[i]][k_tuple[i]];
          for (int l = 0; l < n; ++l) {
            if (l != i) p *= gram[j_tuple[l]][k_tuple[l]];
          }
          s_diff += p;
        }
      }
      const double b = col_norm * (s_diff - loss * s_gram);
      const double value = factorial(n) / multi_factorial(beta) * b;
      if (value != 0.0) trips.push_back({static_cast<std::uint32_t>(r), col, value});
    }

    // Two levels down: pair-annihilation gain, the removed pair integrated out.
    if (lam != 0.0 && n >= 2) {
      const int m = n - 2;
      const double gain = 0.5 * lam * (m + 2) * (m + 1);
      for (std::size_t r = sp.degree_begin(m); r < sp.degree_end(m); ++r) {
        const MultiIndex& beta = sp.at(r);
        const std::vector<int> k_tuple = sorted_tuple(beta);
        double s = 0.0;
        for (const auto& j_tuple : tuples) {
          double p = mode_integral[j_tuple[m]] * mode_integral[j_tuple[m + 1]];
          for (int l = 0; l < m; ++l) p *= gram[j_tuple[l]][k_tuple[l]];
          s += p;
        }
        const double value = factorial(m) / multi_factorial(beta) * gain * col_norm * s;
        if (value != 0.0) trips.push_back({static_cast<std::uint32_t>(r), col, value});
      }
    }

    // One level up: creation gain, rate attached to the inserted particle
    // slot and symmetrized over insertion positions.
    if (n + 1 <= M) {
      const int m = n + 1;
      for (std::size_t r = sp.degree_begin(m); r < sp.degree_end(m); ++r) {
        const MultiIndex& beta = sp.at(r);
        const std::vector<int> k_tuple = sorted_tuple(beta);
        double s = 0.0;
        for (int i = 0; i < m; ++i) {
          const double w_i = rate_proj[k_tuple[i]];
          if (w_i == 0.0) continue;
          for (const auto& j_tuple : tuples) {
            double p = w_i;
            for (int l = 0; l < n; ++l) {
              const int pos = l < i ? l : l + 1;
              p *= gram[j_tuple[l]][k_tuple[pos]];
            }
            s += p;
          }
        }
        const double value = factorial(m) / multi_factorial(beta) * col_norm / m * s;
        if (value != 0.0) trips.push_back({static_cast<std::uint32_t>(r), col, value});
      }
    }
  }
  return GeneratorMatrix(std::move(space), std::move(params), std::move(trips));
}

std::vector<double> rk4_step(std::span<const double> c, const GeneratorMatrix& L, double dt) {
  const std::size_t dim = c.size();
  std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim), out(dim);
  L.apply(c, k1);
  for (std::size_t i = 0; i < dim; ++i) tmp[i] = c[i] + 0.5 * dt * k1[i];
  L.apply(tmp, k2);
  for (std::size_t i = 0; i < dim; ++i) tmp[i] = c[i] + 0.5 * dt * k2[i];
  L.apply(tmp, k3);
  for (std::size_t i = 0; i < dim; ++i) tmp[i] = c[i] + dt * k3[i];
  L.apply(tmp, k4);
  for (std::size_t i = 0; i < dim; ++i) {
    out[i] = c[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

namespace {

double sup_norm(const std::vector<double>& v) {
  double best = 0.0;
  for (double x : v) best = std::max(best, std::abs(x));
  return best;
}

}  // namespace

std::vector<CoeffState> evolve(const CoeffState& state, const GeneratorMatrix& L,
                               const IntegratorConfig& cfg) {
  const MultiIndexSpace& sp = L.space();
  if (!state.space || state.space->num_modes() != sp.num_modes() ||
      state.space->max_degree() != sp.max_degree()) {
    throw std::invalid_argument("evolve: state and generator live on different spaces");
  }
  if (cfg.output_times.empty()) {
    throw std::invalid_argument("evolve: no output times");
  }
  double prev = state.time;
  for (double t : cfg.output_times) {
    if (t < prev) {
      throw std::invalid_argument("evolve: output times must be increasing and >= state.time");
    }
    prev = t;
  }
  if (cfg.method == IntegratorConfig::Method::rk4 && cfg.dt <= 0.0) {
    throw std::invalid_argument("evolve: rk4 requires dt > 0");
  }

  std::vector<CoeffState> out;
  out.reserve(cfg.output_times.size());
  std::vector<double> c = state.coeffs;
  double t_now = state.time;
  const double blowup = 1e10 * std::max(1.0, sup_norm(c));

  DenseMatrix dense;
  std::map<std::uint64_t, DenseMatrix> exp_cache;
  if (cfg.method == IntegratorConfig::Method::expm) dense = L.to_dense();

  for (double target : cfg.output_times) {
    const double gap = target - t_now;
    if (gap > 0.0) {
      if (cfg.method == IntegratorConfig::Method::expm) {
        const std::uint64_t key = std::bit_cast<std::uint64_t>(gap);
        auto it = exp_cache.find(key);
        if (it == exp_cache.end()) {
          DenseMatrix scaled = dense;
          scaled *= gap;
          it = exp_cache.emplace(key, expm(scaled)).first;
        }
        c = matvec(it->second, c);
      } else {
        const auto steps = static_cast<std::size_t>(std::ceil(gap / cfg.dt - 1e-12));
        const double h = gap / static_cast<double>(steps);
        for (std::size_t s = 0; s < steps; ++s) {
          c = rk4_step(c, L, h);
          if (sup_norm(c) > blowup) {
            const double diag = L.max_abs_diagonal();
            const double suggestion = diag > 0.0 ? 2.5 / diag : cfg.dt / 10.0;
            throw std::runtime_error("evolve: rk4 step unstable near t=" +
                                     std::to_string(t_now + (s + 1) * h) +
                                     "; retry with dt <= " + std::to_string(suggestion));
          }
        }
      }
      t_now = target;
    }
    CoeffState snap;
    snap.space = state.space;
    snap.coeffs = c;
    snap.time = target;
    out.push_back(std::move(snap));
  }
  return out;
}

EntryDifference max_entry_difference(const GeneratorMatrix& a, const GeneratorMatrix& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("max_entry_difference: dimension mismatch");
  }
  EntryDifference worst;
  auto consider = [&](std::size_t r, std::size_t c, double va, double vb) {
    const double rel = std::abs(va - vb) / std::max({1.0, std::abs(va), std::abs(vb)});
    if (rel > worst.rel_error) worst = {rel, r, c, va, vb};
  };
  a.for_each_entry([&](std::size_t r, std::size_t c, double v) {
    consider(r, c, v, b.entry(r, c));
  });
  // entries present only in b
  b.for_each_entry([&](std::size_t r, std::size_t c, double v) {
    if (a.entry(r, c) == 0.0) consider(r, c, 0.0, v);
  });
  return worst;
}

}  // namespace cdme
