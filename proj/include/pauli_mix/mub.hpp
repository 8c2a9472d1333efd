#pragma once

// Complete sets of d+1 mutually unbiased bases for prime-power d and the
// Weyl-type unitaries U_a = sum_j w^j |xi_j^(a)><xi_j^(a)| built from them.
//
// Basis 0 is the computational basis. Bases 1..d are labelled by field
// elements a in GF(q) (in index order); within each, vector j is labelled by
// the field element b with index j. Components are indexed by s in GF(q).
//
//   odd p:  xi_b^(a)(s) = q^{-1/2} exp(2 pi i tr(a s^2 + b s) / p)
//   p = 2:  xi_b^(a)(s) = q^{-1/2} i^{Q_a(s)} (-1)^{tr(b s)}
//
// where for p = 2 the Z4-valued form is Q_a(s) = s^T M_a s evaluated over the
// integers, s read as its coordinate bit vector and M_a[i][j] = tr(a e_i e_j)
// for the polynomial basis e_i = x^i. M_a - M_b = M_{a-b} is invertible mod 2
// for a != b, which makes the Gauss sums over cross-basis overlaps flat.

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pauli_mix/error.hpp"
#include "pauli_mix/finite_field.hpp"

namespace pauli_mix {

using cplx = std::complex<double>;

struct MubSet {
  PrimePowerDim dim;
  /// bases[a].col(j) is |xi_j^(a)>.
  std::vector<Eigen::MatrixXcd> bases;

  int d() const { return dim.q; }
};

struct WeylUnitaries {
  PrimePowerDim dim;
  cplx omega;
  std::vector<Eigen::MatrixXcd> unitaries;

  int d() const { return dim.q; }
};

struct MubVerification {
  double max_orthonormality_deviation = 0.0;
  double max_unbiasedness_deviation = 0.0;
  bool passed = false;
};

namespace detail {

// Rotate each column so its first component with magnitude above `eps` is
// real and positive.
inline void fix_column_phases(Eigen::MatrixXcd& basis, double eps = 1e-9) {
  for (Eigen::Index c = 0; c < basis.cols(); ++c) {
    for (Eigen::Index r = 0; r < basis.rows(); ++r) {
      const double mag = std::abs(basis(r, c));
      if (mag > eps) {
        basis.col(c) *= std::conj(basis(r, c)) / mag;
        basis(r, c) = mag;
        break;
      }
    }
  }
}

inline cplx z4_phase(int e) {
  switch (((e % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace detail

inline MubSet build_mub(const PrimePowerDim& dim) {
  require(dim.q >= 2 && is_prime(dim.p), ErrorCode::UnsupportedDimension,
          "MUB construction needs a prime-power dimension");
  const GaloisField field(dim);
  const int q = dim.q;
  const int p = dim.p;
  const double norm = 1.0 / std::sqrt(static_cast<double>(q));
  const auto elems = field.elements();

  // tr(u * v) for all element pairs.
  std::vector<std::vector<int>> trace_prod(q, std::vector<int>(q));
  for (int u = 0; u < q; ++u)
    for (int v = 0; v < q; ++v) trace_prod[u][v] = field.trace(field.mul(elems[u], elems[v]));

  MubSet set{dim, {}};
  set.bases.reserve(q + 1);
  set.bases.push_back(Eigen::MatrixXcd::Identity(q, q));

  // Index of each power-basis element e_i = x^i, used by the p = 2 branch.
  std::vector<int> basis_index(dim.k);
  for (int i = 0; i < dim.k; ++i) basis_index[i] = p == 2 ? (1 << i) : 0;

  for (int a = 0; a < q; ++a) {
    Eigen::MatrixXcd basis(q, q);
    if (p == 2) {
      std::vector<std::vector<int>> form(dim.k, std::vector<int>(dim.k));
      for (int i = 0; i < dim.k; ++i)
        for (int j = 0; j < dim.k; ++j)
          form[i][j] = field.trace(field.mul(elems[a], field.mul(elems[basis_index[i]], elems[basis_index[j]])));
      for (int s = 0; s < q; ++s) {
        int quad = 0;
        for (int i = 0; i < dim.k; ++i) {
          if (!((s >> i) & 1)) continue;
          quad += form[i][i];
          for (int j = i + 1; j < dim.k; ++j)
            if ((s >> j) & 1) quad += 2 * form[i][j];
        }
        const cplx quad_phase = detail::z4_phase(quad);
        for (int b = 0; b < q; ++b) {
          const double sign = trace_prod[b][s] ? -1.0 : 1.0;
          basis(s, b) = norm * sign * quad_phase;
        }
      }
    } else {
      for (int s = 0; s < q; ++s) {
        const int s2 = field.index_of(field.mul(elems[s], elems[s]));
        for (int b = 0; b < q; ++b) {
          const int e = (trace_prod[a][s2] + trace_prod[b][s]) % p;
          basis(s, b) = std::polar(norm, 2.0 * std::numbers::pi * e / p);
        }
      }
    }
    detail::fix_column_phases(basis);
    set.bases.push_back(std::move(basis));
  }
  return set;
}

inline MubSet build_mub(int d) {
  require(is_prime_power(d), ErrorCode::UnsupportedDimension,
          "no MUB construction for d = " + std::to_string(d) + " (not a prime power)");
  return build_mub(factor_prime_power(d));
}

/// Largest deviation of each basis Gram matrix from the identity, and of
/// every cross-basis |<xi|xi'>|^2 from 1/d.
inline MubVerification verify_mub(const MubSet& m, double tol = 1e-12) {
  MubVerification report;
  const double inv_d = 1.0 / static_cast<double>(m.d());
  for (const auto& basis : m.bases) {
    const Eigen::MatrixXcd gram = basis.adjoint() * basis;
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(gram.rows(), gram.cols());
    report.max_orthonormality_deviation =
        std::max(report.max_orthonormality_deviation, (gram - id).cwiseAbs().maxCoeff());
  }
  for (std::size_t a = 0; a < m.bases.size(); ++a) {
    for (std::size_t b = a + 1; b < m.bases.size(); ++b) {
      const Eigen::MatrixXcd overlaps = m.bases[a].adjoint() * m.bases[b];
      const double dev = (overlaps.cwiseAbs2().array() - inv_d).abs().maxCoeff();
      report.max_unbiasedness_deviation = std::max(report.max_unbiasedness_deviation, dev);
    }
  }
  report.passed = report.max_orthonormality_deviation <= tol && report.max_unbiasedness_deviation <= tol;
  return report;
}

inline WeylUnitaries build_unitaries(const MubSet& m) {
  const int d = m.d();
  WeylUnitaries w{m.dim, std::polar(1.0, 2.0 * std::numbers::pi / d), {}};
  w.unitaries.reserve(m.bases.size());
  Eigen::VectorXcd phases(d);
  for (int j = 0; j < d; ++j) phases(j) = std::polar(1.0, 2.0 * std::numbers::pi * j / d);
  for (const auto& basis : m.bases) w.unitaries.push_back(basis * phases.asDiagonal() * basis.adjoint());
  return w;
}

inline WeylUnitaries build_unitaries(int d) { return build_unitaries(build_mub(d)); }

}  // namespace pauli_mix
