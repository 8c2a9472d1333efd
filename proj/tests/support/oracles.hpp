#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library's numerics; they are deliberately naive.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;

inline Eigen::Matrix2cd pauli(int which) {
  Eigen::Matrix2cd s;
  switch (which) {
    case 0: s << 1, 0, 0, -1; break;                               // z
    case 1: s << 0, 1, 1, 0; break;                                // x
    default: s << 0, cplx(0, -1), cplx(0, 1), 0; break;            // y
  }
  return s;
}

// Qubit Pauli channel (1-p) rho + p s rho s.
inline Eigen::MatrixXcd pauli_channel(int which, double p, const Eigen::MatrixXcd& rho) {
  const Eigen::MatrixXcd s = pauli(which);
  return (1.0 - p) * rho + p * s * rho * s;
}

// Evaluate a polynomial (coefficients low to high) at v mod p.
inline int poly_at(const std::vector<int>& c, int v, int p) {
  long long acc = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = (acc * v + *it) % p;
  return static_cast<int>(acc);
}

inline bool has_root(const std::vector<int>& c, int p) {
  for (int v = 0; v < p; ++v)
    if (poly_at(c, v, p) == 0) return true;
  return false;
}

// Remainder of a (mod 2) by the polynomial x^2 + x + 1.
inline bool divisible_by_x2x1_mod2(std::vector<int> a) {
  for (int i = static_cast<int>(a.size()) - 1; i >= 2; --i) {
    if (a[i] % 2 == 0) continue;
    a[i] ^= 1;
    a[i - 1] ^= 1;
    a[i - 2] ^= 1;
  }
  return a[0] % 2 == 0 && (a.size() < 2 || a[1] % 2 == 0);
}

// Irreducibility for the degrees that occur with q <= 32: degree <= 3 has no
// root; degree 4 or 5 over GF(2) additionally avoids the only irreducible
// quadratic.
inline bool irreducible_small(const std::vector<int>& c, int p) {
  const int deg = static_cast<int>(c.size()) - 1;
  if (deg == 1) return true;
  if (has_root(c, p)) return false;
  if (deg <= 3) return true;
  return p == 2 && !divisible_by_x2x1_mod2(c);
}

// First zero of f on [a, b] from a fine scan followed by bisection.
inline std::optional<double> first_root(const std::function<double(double)>& f, double a, double b, int grid = 20000) {
  double prev = f(a);
  if (prev == 0.0) return a;
  double t_prev = a;
  for (int k = 1; k <= grid; ++k) {
    const double t = a + (b - a) * k / grid;
    const double cur = f(t);
    if (cur == 0.0) return t;
    if ((cur < 0.0) != (prev < 0.0)) {
      double lo = t_prev, hi = t, flo = prev;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
    prev = cur;
    t_prev = t;
  }
  return std::nullopt;
}

inline std::vector<double> random_simplex(std::mt19937_64& rng, int size) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> x(size);
  double s = 0.0;
  for (auto& v : x) s += (v = e(rng));
  for (auto& v : x) v /= s;
  return x;
}

inline Eigen::MatrixXcd random_gaussian(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = cplx(g(rng), g(rng));
  return m;
}

inline Eigen::MatrixXcd random_density(std::mt19937_64& rng, int d) {
  const Eigen::MatrixXcd a = random_gaussian(rng, d, d);
  const Eigen::MatrixXcd rho = a * a.adjoint();
  return rho / rho.trace().real();
}

// Kraus operators of a random channel: blocks of a random isometry.
inline std::vector<Eigen::MatrixXcd> random_kraus(std::mt19937_64& rng, int d, int count) {
  const Eigen::MatrixXcd g = random_gaussian(rng, d * count, d);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  const Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(d * count, d);
  std::vector<Eigen::MatrixXcd> out;
  for (int j = 0; j < count; ++j) out.push_back(q.block(j * d, 0, d, d));
  return out;
}

// Superoperator built entry by entry: S(a + b d, i + j d) = <a|Phi(|i><j|)|b>.
inline Eigen::MatrixXcd superop_by_action(int d, const std::function<Eigen::MatrixXcd(const Eigen::MatrixXcd&)>& phi) {
  Eigen::MatrixXcd s(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(d, d);
      e(i, j) = 1.0;
      const Eigen::MatrixXcd out = phi(e);
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) s(a + b * d, i + j * d) = out(a, b);
    }
  return s;
}

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Volume ratio of {x_i >= g} inside the probability simplex with d+1 entries.
inline double shrunk_simplex_ratio(int d, double g) { return std::pow(std::max(0.0, 1.0 - (d + 1) * g), d); }

inline std::vector<double> sorted_real_eigs(const Eigen::MatrixXcd& m, double* max_imag = nullptr) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, false);
  std::vector<double> out;
  double mi = 0.0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    out.push_back(es.eigenvalues()(k).real());
    mi = std::max(mi, std::abs(es.eigenvalues()(k).imag()));
  }
  if (max_imag) *max_imag = mi;
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace oracle
