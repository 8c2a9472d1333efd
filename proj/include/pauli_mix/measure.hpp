#pragma once

// Fraction of the mixing simplex whose output map is invertible
// (exponential family), by three independent routes:
//
//   closed form   [(d^2 (n-1) - n) / d]^d on the intermediate interval
//   quadrature    the iterated integral over x_1..x_d with per-level bounds
//                 [g, f(j) - X_j], f(j) = 1 - (d-j) g, X_j = x_1 + ... + x_j,
//                 divided by the simplex volume 1/d!
//   Monte Carlo   uniform simplex draws, fraction with min_i x_i >= g
//                 (binomial error with the Agresti-Coull adjustment)

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "pauli_mix/error.hpp"
#include "pauli_mix/finite_field.hpp"
#include "pauli_mix/invertibility.hpp"

namespace pauli_mix {

struct Threshold {
  int d;
  double n;
  double g;
};

inline Threshold g_threshold(int d, double n) {
  require(d >= 2, ErrorCode::InvalidArgument, "d must be >= 2");
  require(n >= 1.0, ErrorCode::InvalidArgument, "n must be >= 1");
  return {d, n, invertibility_threshold(d, n)};
}

enum class MeasureMethod { ClosedForm, Quadrature, MonteCarlo };

constexpr std::string_view to_string(MeasureMethod m) {
  switch (m) {
    case MeasureMethod::ClosedForm: return "closed_form";
    case MeasureMethod::Quadrature: return "quadrature";
    case MeasureMethod::MonteCarlo: return "monte_carlo";
  }
  return "unknown";
}

struct MeasureResult {
  int d = 2;
  double n = 1.0;
  double delta = 0.0;
  MeasureMethod method = MeasureMethod::ClosedForm;
  // Monte Carlo only.
  std::uint64_t samples = 0;
  std::uint64_t hits = 0;
  double std_error = 0.0;
  std::uint64_t seed = 0;
};

inline bool in_intermediate_interval(int d, double n) {
  return n >= intermediate_lower(d) && n <= intermediate_upper(d);
}

/// Returns 1 for n >= d/(d-1) and 0 for n <= d^2/(d^2-1).
inline MeasureResult delta_closed_form(int d, double n) {
  factor_prime_power(d);
  require(n >= 1.0, ErrorCode::InvalidArgument, "n must be >= 1");
  MeasureResult r{d, n, 0.0, MeasureMethod::ClosedForm};
  if (n >= intermediate_upper(d)) {
    r.delta = 1.0;
  } else if (n <= intermediate_lower(d)) {
    r.delta = 0.0;
  } else {
    const double dd = d;
    r.delta = std::pow((dd * dd * (n - 1.0) - n) / dd, d);
  }
  return r;
}

namespace detail {

// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int points) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(points, points);
  for (int k = 1; k < points; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  std::vector<double> nodes(points), weights(points);
  for (int k = 0; k < points; ++k) {
    nodes[k] = es.eigenvalues()(k);
    weights[k] = 2.0 * es.eigenvectors()(0, k) * es.eigenvectors()(0, k);
  }
  return {nodes, weights};
}

struct NestedSimplexIntegral {
  int d;
  double g;
  std::vector<double> nodes;
  std::vector<double> weights;

  // Volume of {x_{j+1}, ..., x_d >= g, x_{d+1} = 1 - X_d >= g} given X_j.
  double level(int j, double running) const {
    if (j == d) return 1.0;
    const double lo = g;
    const double hi = 1.0 - (d - j) * g - running;
    if (hi <= lo) return 0.0;
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    double acc = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) acc += weights[k] * level(j + 1, running + mid + half * nodes[k]);
    return half * acc;
  }
};

inline double factorial(int d) {
  double f = 1.0;
  for (int i = 2; i <= d; ++i) f *= i;
  return f;
}

}  // namespace detail

/// Largest d handled by the nested quadrature (cost grows as (d/2+1)^d).
constexpr int kMaxQuadratureDim = 10;

/// Iterated integral over the region x_i >= g with lower bound g at every
/// level. The integrands are polynomials of degree < d, so d/2 + 1
/// Gauss-Legendre points per level integrate them exactly.
inline double nested_simplex_volume(int d, double g) {
  require(d >= 1, ErrorCode::InvalidArgument, "d must be >= 1");
  require(d <= kMaxQuadratureDim, ErrorCode::UnsupportedDimension,
          "nested quadrature is limited to d <= " + std::to_string(kMaxQuadratureDim));
  auto [nodes, weights] = detail::gauss_legendre(d / 2 + 1);
  const detail::NestedSimplexIntegral integral{d, g, std::move(nodes), std::move(weights)};
  return integral.level(0, 0.0);
}

/// mu, the volume of the full simplex in x_1..x_d coordinates (equals 1/d!).
inline double normalization_check(int d) {
  require(d >= 2, ErrorCode::InvalidArgument, "d must be >= 2");
  return nested_simplex_volume(d, 0.0);
}

inline MeasureResult delta_quadrature(int d, double n) {
  factor_prime_power(d);
  require(in_intermediate_interval(d, n), ErrorCode::RegimeMismatch,
          "n = " + std::to_string(n) + " is outside the intermediate interval [" +
              std::to_string(intermediate_lower(d)) + ", " + std::to_string(intermediate_upper(d)) + "] for d = " +
              std::to_string(d));
  const double g = invertibility_threshold(d, n);
  const double volume = nested_simplex_volume(d, g);
  return {d, n, volume * detail::factorial(d), MeasureMethod::Quadrature};
}

struct MonteCarloOptions {
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 12345;
  /// 0 selects std::thread::hardware_concurrency().
  unsigned workers = 0;
};

/// Samples are split into fixed-size chunks, each with its own generator
/// seeded from (seed, chunk index), so the estimate does not depend on the
/// number of workers.
constexpr std::uint64_t kMonteCarloChunk = 1u << 16;

/// Counts draws, uniform on the (d+1)-simplex, that satisfy `accept`.
/// `accept` receives the weight vector and must be thread-safe.
template <class Accept>
std::uint64_t count_simplex_hits(int d, const MonteCarloOptions& opt, Accept&& accept) {
  const std::uint64_t chunks = (opt.samples + kMonteCarloChunk - 1) / kMonteCarloChunk;
  unsigned workers = opt.workers ? opt.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(chunks, 1)));
  std::vector<std::uint64_t> hits(chunks, 0);

  auto run_chunk = [&](std::uint64_t c) {
    std::seed_seq seq{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                      static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
    std::mt19937_64 rng(seq);
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> x(d + 1);
    const std::uint64_t begin = c * kMonteCarloChunk;
    const std::uint64_t end = std::min(opt.samples, begin + kMonteCarloChunk);
    std::uint64_t local = 0;
    for (std::uint64_t s = begin; s < end; ++s) {
      double sum = 0.0;
      for (auto& v : x) {
        v = expo(rng);
        sum += v;
      }
      for (auto& v : x) v /= sum;
      if (accept(std::span<const double>(x))) ++local;
    }
    hits[c] = local;
  };

  if (workers <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::uint64_t c = w; c < chunks; c += workers) run_chunk(c);
      });
  }
  return std::accumulate(hits.begin(), hits.end(), std::uint64_t{0});
}

template <class Accept>
MeasureResult delta_monte_carlo(int d, double n, const MonteCarloOptions& opt, Accept&& accept) {
  require(opt.samples >= 1, ErrorCode::InvalidArgument, "need at least one sample");
  const std::uint64_t hits = count_simplex_hits(d, opt, std::forward<Accept>(accept));
  MeasureResult r{d, n, 0.0, MeasureMethod::MonteCarlo};
  r.samples = opt.samples;
  r.hits = hits;
  r.seed = opt.seed;
  r.delta = static_cast<double>(hits) / static_cast<double>(opt.samples);
  // Agresti-Coull adjusted error: stays meaningful when hits is 0 or samples.
  const double n_adj = static_cast<double>(opt.samples) + 4.0;
  const double p_adj = (static_cast<double>(hits) + 2.0) / n_adj;
  r.std_error = std::sqrt(p_adj * (1.0 - p_adj) / n_adj);
  return r;
}

inline MeasureResult delta_monte_carlo(int d, double n, const MonteCarloOptions& opt = {}) {
  factor_prime_power(d);
  const double g = g_threshold(d, n).g;
  return delta_monte_carlo(d, n, opt, [g](std::span<const double> x) {
    return meets_threshold(*std::min_element(x.begin(), x.end()), g);
  });
}

inline std::vector<int> prime_powers_in(int lo, int hi) {
  require(lo >= 2 && lo <= hi, ErrorCode::InvalidArgument, "need 2 <= lo <= hi");
  std::vector<int> out;
  for (int d = lo; d <= hi; ++d)
    if (is_prime_power(d)) out.push_back(d);
  return out;
}

struct SweepRow {
  int d;
  double delta;
  double log10_delta;
};

/// Every dimension must hold n inside its closed intermediate interval;
/// otherwise RegimeMismatch lists the offenders.
inline std::vector<SweepRow> sweep(const std::vector<int>& dims, double n, MeasureMethod method,
                                   const MonteCarloOptions& mc = {}) {
  std::string offending;
  for (int d : dims) {
    factor_prime_power(d);
    if (!in_intermediate_interval(d, n)) offending += (offending.empty() ? "" : ", ") + std::to_string(d);
  }
  require(offending.empty(), ErrorCode::RegimeMismatch,
          "n = " + std::to_string(n) + " is outside the intermediate interval for d = " + offending);
  std::vector<SweepRow> rows;
  rows.reserve(dims.size());
  for (int d : dims) {
    MeasureResult r;
    switch (method) {
      case MeasureMethod::ClosedForm: r = delta_closed_form(d, n); break;
      case MeasureMethod::Quadrature: r = delta_quadrature(d, n); break;
      case MeasureMethod::MonteCarlo: r = delta_monte_carlo(d, n, mc); break;
    }
    rows.push_back({d, r.delta, r.delta > 0.0 ? std::log10(r.delta) : -std::numeric_limits<double>::infinity()});
  }
  return rows;
}

}  // namespace pauli_mix
