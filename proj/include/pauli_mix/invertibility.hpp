#pragma once

// Singular times of the output map, regime classification in (d, n), and
// CP-divisibility of the propagators between grid times.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "pauli_mix/decoherence.hpp"
#include "pauli_mix/dynmaps.hpp"
#include "pauli_mix/error.hpp"
#include "pauli_mix/finite_field.hpp"

namespace pauli_mix {

/// g(d, n) = 1 - n (d-1)/d: every weight must reach g for the output map of
/// the exponential family to stay invertible.
inline double invertibility_threshold(int d, double n) { return 1.0 - n * (d - 1.0) / d; }

/// n below which no mixture is invertible.
inline double intermediate_lower(int d) {
  const double dd = d;
  return dd * dd / (dd * dd - 1.0);
}

/// n at and above which each input map is already invertible.
inline double intermediate_upper(int d) {
  const double dd = d;
  return dd / (dd - 1.0);
}

enum class RegimeKind { InvertibleInputs, IntermediateNoninvertible, AlwaysNoninvertibleOutput };

constexpr std::string_view to_string(RegimeKind kind) {
  switch (kind) {
    case RegimeKind::InvertibleInputs: return "invertible-inputs";
    case RegimeKind::IntermediateNoninvertible: return "intermediate";
    case RegimeKind::AlwaysNoninvertibleOutput: return "always-noninvertible-output";
  }
  return "unknown";
}

struct Regime {
  RegimeKind kind;
  int d;
  double n;
  double lower;  // d^2/(d^2-1)
  double upper;  // d/(d-1)
};

/// n = d^2/(d^2-1) itself is intermediate (measure-zero invertible set).
inline Regime classify_regime(int d, double n) {
  factor_prime_power(d);
  require(n >= 1.0, ErrorCode::InvalidArgument, "decoherence parameter n must be >= 1");
  Regime r{RegimeKind::IntermediateNoninvertible, d, n, intermediate_lower(d), intermediate_upper(d)};
  if (n >= r.upper)
    r.kind = RegimeKind::InvertibleInputs;
  else if (n < r.lower)
    r.kind = RegimeKind::AlwaysNoninvertibleOutput;
  return r;
}

/// Absolute slack on x_i >= g, so that boundary points such as equal mixing
/// at the semigroup value are not lost to rounding in g.
constexpr double kThresholdSlack = 1e-12;

inline bool meets_threshold(double x, double g) { return x >= g - kThresholdSlack; }

/// Weights on the boundary x_i = g count as invertible: t* diverges there.
inline bool output_invertible(int d, double n, const std::vector<double>& weights) {
  require(static_cast<int>(weights.size()) == d + 1, ErrorCode::InvalidArgument,
          "expected d+1 = " + std::to_string(d + 1) + " weights");
  const double g = invertibility_threshold(d, n);
  return std::all_of(weights.begin(), weights.end(), [g](double x) { return meets_threshold(x, g); });
}

inline std::optional<double> singular_time_exponential(int d, double n, double c, double x) {
  require(d >= 2, ErrorCode::InvalidArgument, "d must be >= 2");
  require(n >= 1.0 && c > 0.0, ErrorCode::InvalidArgument, "exponential family needs n >= 1 and c > 0");
  require(x >= 0.0 && x < 1.0, ErrorCode::InvalidArgument, "weight must lie in [0, 1)");
  const double reach = d * (1.0 - x);  // d (1 - x_i)
  const double level = n * (d - 1.0);  // n (d - 1)
  if (reach - level <= 0.0) return std::nullopt;
  // (1/c) ln[reach / (reach - level)]
  return -std::log1p(-level / reach) / c;
}

/// Root of 1 - d/(d-1) (1-x) (1 - cos(omega t))/2; for d = 2 this is
/// arccos(x/(x-1)) / omega. Finite iff x <= 1/d.
inline std::optional<double> singular_time_cosine(double omega, double x, int d = 2) {
  require(omega > 0.0, ErrorCode::InvalidArgument, "omega must be positive");
  require(x >= 0.0 && x < 1.0, ErrorCode::InvalidArgument, "weight must lie in [0, 1)");
  require(d >= 2, ErrorCode::InvalidArgument, "d must be >= 2");
  const double arg = 1.0 - 2.0 * (d - 1.0) / (d * (1.0 - x));
  if (arg < -1.0) return std::nullopt;
  return std::acos(arg) / omega;
}

/// Qubit only: solves p(t*) = 1/(2(1-x)). The plateau never exceeds 1/2, so
/// a singular time exists only in the degenerate case x = 0.
inline std::optional<double> singular_time_plateau(int d, const Plateau& pf, double x) {
  require(d == 2, ErrorCode::NotQubit, "plateau singular time is derived for qubits only");
  require(pf.t_sharp > 0.0, ErrorCode::InvalidArgument, "t_sharp must be positive");
  require(x >= 0.0 && x < 1.0, ErrorCode::InvalidArgument, "weight must lie in [0, 1)");
  const double target = 1.0 / (2.0 * (1.0 - x));
  const DecoherenceFunction f = pf;
  if (target > p_eval(f, pf.t_sharp)) return std::nullopt;
  double lo = 0.0, hi = pf.t_sharp;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * pf.t_sharp; ++it) {
    const double mid = 0.5 * (lo + hi);
    (p_eval(f, mid) >= target ? hi : lo) = mid;
  }
  return hi;
}

enum class Classification { Invertible, NoninvertibleAt, SemigroupEqualMixPoint };

constexpr std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::Invertible: return "invertible";
    case Classification::NoninvertibleAt: return "noninvertible";
    case Classification::SemigroupEqualMixPoint: return "semigroup-equal-mix-point";
  }
  return "unknown";
}

enum class Method { Analytic, Numeric };

constexpr std::string_view to_string(Method m) { return m == Method::Analytic ? "analytic" : "numeric"; }

struct InvertibilityReport {
  std::vector<std::optional<double>> singular_times;
  Classification classification = Classification::Invertible;
  std::optional<double> t_star;  // smallest finite singular time
  Method method = Method::Analytic;
  bool grid_too_coarse = false;
};

/// Equal weights with n = d^2/(d^2-1) in the exponential family: every
/// lambda_i(t) = exp(-c t).
inline bool is_semigroup_point(const MixtureMap& m, double tol = 1e-12) {
  const auto* e = std::get_if<Exponential>(&m.decoherence());
  if (e == nullptr) return false;
  const double eq = 1.0 / (m.d() + 1.0);
  for (double x : m.weights())
    if (std::abs(x - eq) > tol) return false;
  return std::abs(e->n - intermediate_lower(m.d())) <= tol;
}

namespace detail {

inline void finish_report(InvertibilityReport& r, const MixtureMap& m) {
  for (const auto& ts : r.singular_times)
    if (ts && (!r.t_star || *ts < *r.t_star)) r.t_star = ts;
  if (r.t_star)
    r.classification = Classification::NoninvertibleAt;
  else
    r.classification = is_semigroup_point(m) ? Classification::SemigroupEqualMixPoint : Classification::Invertible;
}

}  // namespace detail

/// Closed-form singular times per index. Sine has no closed form here.
inline InvertibilityReport analytic_singularity_report(const MixtureMap& m) {
  InvertibilityReport r;
  r.method = Method::Analytic;
  const int d = m.d();
  for (double x : m.weights()) {
    r.singular_times.push_back(std::visit(
        overloaded{[&](const Exponential& e) { return singular_time_exponential(d, e.n, e.c, x); },
                   [&](const Cosine& f) { return singular_time_cosine(f.omega, x, d); },
                   [&](const Plateau& f) { return singular_time_plateau(d, f, x); },
                   [](const Sine&) -> std::optional<double> {
                     throw Error(ErrorCode::UnsupportedFamily, "no closed-form singular time for the sine family");
                   }},
        m.decoherence()));
  }
  detail::finish_report(r, m);
  return r;
}

struct ScanOptions {
  double t_max = 0.0;  // <= 0 selects default_scan_horizon
  int grid_points = 2001;
  double lambda_tol = 1e-12;
  double time_tol = 1e-12;
  /// Largest change of lambda between neighbouring grid points before the
  /// grid is flagged as too coarse to rule out missed double roots.
  double coarse_step = 0.25;
};

namespace detail {

template <class F>
double bisect_root(F&& f, double lo, double hi, double flo, double time_tol) {
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || hi - lo <= time_tol * std::max(1.0, std::abs(mid))) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Golden-section minimisation of f on [a, b].
template <class F>
std::pair<double, double> golden_min(F&& f, double a, double b, double time_tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), e = a + inv_phi * (b - a);
  double fc = f(c), fe = f(e);
  for (int it = 0; it < 300 && b - a > time_tol * std::max(1.0, std::abs(a)); ++it) {
    if (fc < fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + inv_phi * (b - a);
      fe = f(e);
    }
  }
  return fc < fe ? std::pair{c, fc} : std::pair{e, fe};
}

}  // namespace detail

/// Grid search for the first zero of each lambda_i(t) = 1 - kappa_i p(t),
/// with kappa_i read off from the operator action of the mixture. Sign
/// changes are refined by bisection; interior minima that touch zero are
/// refined by golden-section search.
inline InvertibilityReport numeric_singularity_scan(const MixtureMap& m, ScanOptions opt = {}) {
  require(opt.grid_points >= 2, ErrorCode::InvalidArgument, "scan grid needs at least 2 points");
  const double t_max = opt.t_max > 0.0 ? opt.t_max : default_scan_horizon(m.decoherence());
  InvertibilityReport r;
  r.method = Method::Numeric;
  const auto kappa = m.contraction_coefficients();
  const auto& pf = m.decoherence();

  std::vector<double> grid(opt.grid_points);
  std::vector<double> pvals(opt.grid_points);
  for (int k = 0; k < opt.grid_points; ++k) {
    grid[k] = t_max * k / (opt.grid_points - 1);
    pvals[k] = p_eval(pf, grid[k]);
  }

  for (double kap : kappa) {
    auto lambda = [&](double t) { return 1.0 - kap * p_eval(pf, t); };
    std::vector<double> vals(opt.grid_points);
    for (int k = 0; k < opt.grid_points; ++k) vals[k] = 1.0 - kap * pvals[k];
    // leaves_band[k]: lambda is clearly away from zero somewhere at or after k.
    // A sign change or touch followed only by values inside the tolerance band
    // is lambda creeping up on 0 as t -> infinity, not a root.
    std::vector<char> leaves_band(opt.grid_points + 1, 0);
    for (int k = opt.grid_points - 1; k >= 0; --k)
      leaves_band[k] = leaves_band[k + 1] || std::abs(vals[k]) > opt.lambda_tol;

    std::optional<double> root;
    if (std::abs(vals[0]) <= opt.lambda_tol && leaves_band[1]) root = grid[0];
    for (int k = 1; k < opt.grid_points && !root; ++k) {
      const double prev = vals[k - 1], cur = vals[k];
      if (std::abs(cur - prev) > opt.coarse_step) r.grid_too_coarse = true;
      if (!leaves_band[k]) break;
      if ((prev < 0.0) != (cur < 0.0)) {
        root = detail::bisect_root(lambda, grid[k - 1], grid[k], prev, opt.time_tol);
      } else if (k + 1 < opt.grid_points && cur >= 0.0 && cur < prev && cur <= vals[k + 1]) {
        auto [tm, fm] = detail::golden_min(lambda, grid[k - 1], grid[k + 1], opt.time_tol);
        if (fm <= opt.lambda_tol) root = tm;
      }
    }
    r.singular_times.push_back(root);
  }
  detail::finish_report(r, m);
  return r;
}

struct CpStep {
  double t_from;
  double t_to;
  double min_eigenvalue;
  bool completely_positive;
};

/// Propagators K(t_{k+1}, t_k) = Phi(t_{k+1}) Phi(t_k)^{-1} between
/// consecutive grid times and the CP verdict from their Choi matrices.
inline std::vector<CpStep> cp_divisibility_check(const MixtureMap& m, const std::vector<double>& times,
                                                 double tol = 1e-10) {
  require(times.size() >= 2, ErrorCode::InvalidArgument, "need at least two grid times");
  for (std::size_t k = 1; k < times.size(); ++k)
    require(times[k] >= times[k - 1], ErrorCode::InvalidArgument, "grid times must be nondecreasing");
  const auto kappa = m.contraction_coefficients();
  for (double t : times) {
    const double p = p_eval(m.decoherence(), t);
    for (double kap : kappa)
      require(std::abs(1.0 - kap * p) > 1e-12, ErrorCode::SingularAtGridPoint,
              "map is not invertible at grid time " + std::to_string(t));
  }
  std::vector<CpStep> steps;
  steps.reserve(times.size() - 1);
  Eigen::MatrixXcd prev = to_superoperator(m, times.front()).matrix;
  for (std::size_t k = 1; k < times.size(); ++k) {
    Eigen::MatrixXcd cur = to_superoperator(m, times[k]).matrix;
    // cur * prev^{-1}
    const Eigen::MatrixXcd prop = prev.transpose().partialPivLu().solve(cur.transpose()).transpose();
    const auto cp = is_cp(to_choi(Superoperator{prop}), tol);
    steps.push_back({times[k - 1], times[k], cp.min_eigenvalue, cp.completely_positive});
    prev = std::move(cur);
  }
  return steps;
}

}  // namespace pauli_mix
