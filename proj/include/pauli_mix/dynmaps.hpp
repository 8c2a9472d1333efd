#pragma once

// Generalized Pauli dynamical maps and their convex mixtures.
//
// Input map i (0-based here) acts as
//
//   Phi_i(t)[rho] = (1 - p) rho + p/(d-1) sum_{k=1}^{d-1} U_i^k rho U_i^{k dagger}
//
// The 1/(d-1) factor keeps the map trace preserving for every d and gives the
// output-map eigenvalue lambda_i = 1 - d/(d-1) (1 - x_i) p on each U_i^k.
//
// Superoperators act on column-stacked operators: vec(X)[r + c d] = X(r, c),
// so X -> A X B has matrix kron(B^T, A). The Choi matrix is
// C = sum_{ij} |i><j| (x) Phi(|i><j|), i.e. C(i d + a, j d + b) = S(a + b d, i + j d).

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pauli_mix/decoherence.hpp"
#include "pauli_mix/error.hpp"
#include "pauli_mix/mub.hpp"

namespace pauli_mix {

struct DensityCheck {
  double hermiticity_deviation = 0.0;
  double trace_deviation = 0.0;
  double min_eigenvalue = 0.0;

  bool valid(double tol) const {
    return hermiticity_deviation <= tol && trace_deviation <= tol && min_eigenvalue >= -tol;
  }
};

inline DensityCheck check_density(const Eigen::MatrixXcd& rho) {
  DensityCheck out;
  out.hermiticity_deviation = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  out.trace_deviation = std::abs(rho.trace() - cplx(1.0, 0.0));
  const Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
  out.min_eigenvalue = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(herm, Eigen::EigenvaluesOnly).eigenvalues()(0);
  return out;
}

class DensityMatrix {
 public:
  /// Throws InvalidArgument unless rho is Hermitian, unit-trace and PSD to tol.
  static DensityMatrix validated(Eigen::MatrixXcd rho, double tol = 1e-10) {
    require(rho.rows() == rho.cols() && rho.rows() >= 1, ErrorCode::InvalidArgument,
            "density matrix must be square");
    const auto chk = check_density(rho);
    require(chk.valid(tol), ErrorCode::InvalidArgument,
            "not a density matrix (hermiticity " + std::to_string(chk.hermiticity_deviation) + ", trace " +
                std::to_string(chk.trace_deviation) + ", min eigenvalue " + std::to_string(chk.min_eigenvalue) + ")");
    return DensityMatrix(std::move(rho));
  }

  static DensityMatrix maximally_mixed(int d) {
    return DensityMatrix(Eigen::MatrixXcd::Identity(d, d) / static_cast<double>(d));
  }

  static DensityMatrix pure(const Eigen::VectorXcd& psi) {
    const Eigen::VectorXcd v = psi / psi.norm();
    return DensityMatrix(v * v.adjoint());
  }

  /// Wraps outputs of maps already known to preserve density matrices.
  static DensityMatrix trusted(Eigen::MatrixXcd rho) { return DensityMatrix(std::move(rho)); }

  const Eigen::MatrixXcd& matrix() const { return rho_; }
  int dim() const { return static_cast<int>(rho_.rows()); }

 private:
  explicit DensityMatrix(Eigen::MatrixXcd rho) : rho_(std::move(rho)) {}

  Eigen::MatrixXcd rho_;
};

struct Superoperator {
  Eigen::MatrixXcd matrix;
};

struct ChoiMatrix {
  Eigen::MatrixXcd matrix;
};

using KrausSet = std::vector<Eigen::MatrixXcd>;

inline Eigen::VectorXcd vec(const Eigen::MatrixXcd& x) {
  return Eigen::Map<const Eigen::VectorXcd>(x.data(), x.size());
}

inline Eigen::MatrixXcd unvec(const Eigen::VectorXcd& v, Eigen::Index d) {
  return Eigen::Map<const Eigen::MatrixXcd>(v.data(), d, d);
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Superoperator of X -> A X A^dagger.
inline Eigen::MatrixXcd conjugation_superop(const Eigen::MatrixXcd& a) { return kron(a.conjugate(), a); }

inline Eigen::MatrixXcd apply(const Superoperator& s, const Eigen::MatrixXcd& x) {
  return unvec(s.matrix * vec(x), x.rows());
}

namespace detail {

inline void check_index(const WeylUnitaries& w, int i) {
  require(i >= 0 && i < static_cast<int>(w.unitaries.size()), ErrorCode::InvalidArgument,
          "input-map index " + std::to_string(i) + " out of range [0, " + std::to_string(w.unitaries.size()) + ")");
}

// (1/(d-1)) sum_{k=1}^{d-1} U^k x U^{-k}
inline Eigen::MatrixXcd twirl_powers(const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& x) {
  const Eigen::Index d = u.rows();
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(d, d);
  Eigen::MatrixXcd uk = Eigen::MatrixXcd::Identity(d, d);
  for (Eigen::Index k = 1; k < d; ++k) {
    uk = uk * u;
    acc += uk * x * uk.adjoint();
  }
  return acc / static_cast<double>(d - 1);
}

inline Eigen::MatrixXcd twirl_superop(const Eigen::MatrixXcd& u) {
  const Eigen::Index d = u.rows();
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(d * d, d * d);
  Eigen::MatrixXcd uk = Eigen::MatrixXcd::Identity(d, d);
  for (Eigen::Index k = 1; k < d; ++k) {
    uk = uk * u;
    acc += conjugation_superop(uk);
  }
  return acc / static_cast<double>(d - 1);
}

}  // namespace detail

inline DensityMatrix apply_input_map(const WeylUnitaries& w, int i, const DecoherenceFunction& pf, double t,
                                     const DensityMatrix& rho) {
  detail::check_index(w, i);
  require(rho.dim() == w.d(), ErrorCode::InvalidArgument, "state dimension does not match the maps");
  const double p = p_eval(pf, t);
  return DensityMatrix::trusted((1.0 - p) * rho.matrix() + p * detail::twirl_powers(w.unitaries[i], rho.matrix()));
}

inline Superoperator input_map_superoperator(const WeylUnitaries& w, int i, const DecoherenceFunction& pf, double t) {
  detail::check_index(w, i);
  const double p = p_eval(pf, t);
  const int d2 = w.d() * w.d();
  return {(1.0 - p) * Eigen::MatrixXcd::Identity(d2, d2) + p * detail::twirl_superop(w.unitaries[i])};
}

/// Convex mixture sum_i x_i Phi_i(t) of the d+1 input maps sharing one p(t).
class MixtureMap {
 public:
  static constexpr double kWeightSumTolerance = 1e-12;

  MixtureMap(std::shared_ptr<const WeylUnitaries> unitaries, std::vector<double> weights, DecoherenceFunction pf)
      : unitaries_(std::move(unitaries)), weights_(std::move(weights)), pf_(std::move(pf)) {
    require(unitaries_ != nullptr, ErrorCode::InvalidArgument, "missing unitaries");
    validate(pf_);
    const auto expected = unitaries_->unitaries.size();
    require(weights_.size() == expected, ErrorCode::InvalidArgument,
            "expected " + std::to_string(expected) + " weights, got " + std::to_string(weights_.size()));
    double sum = 0.0;
    for (double x : weights_) {
      require(x > 0.0, ErrorCode::InvalidArgument, "mixing weights must be strictly positive");
      sum += x;
    }
    require(std::abs(sum - 1.0) <= kWeightSumTolerance, ErrorCode::InvalidArgument,
            "mixing weights must sum to 1 (sum = " + std::to_string(sum) + ")");
  }

  MixtureMap(int d, std::vector<double> weights, DecoherenceFunction pf)
      : MixtureMap(std::make_shared<const WeylUnitaries>(build_unitaries(d)), std::move(weights), std::move(pf)) {}

  int d() const { return unitaries_->d(); }
  const PrimePowerDim& dim() const { return unitaries_->dim; }
  const std::vector<double>& weights() const { return weights_; }
  const DecoherenceFunction& decoherence() const { return pf_; }
  const WeylUnitaries& unitaries() const { return *unitaries_; }
  std::shared_ptr<const WeylUnitaries> shared_unitaries() const { return unitaries_; }

  /// t-independent part D of the mixture: Phi(t) = (1 - p) id + p D.
  Eigen::MatrixXcd dephasing_part(const Eigen::MatrixXcd& x) const {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(x.rows(), x.cols());
    for (std::size_t a = 0; a < weights_.size(); ++a)
      acc += weights_[a] * detail::twirl_powers(unitaries_->unitaries[a], x);
    return acc;
  }

  /// kappa_i with lambda_i(t) = 1 - kappa_i p(t), read off numerically from
  /// the action of the mixture on U_i.
  std::vector<double> contraction_coefficients() const {
    std::vector<double> kappa;
    kappa.reserve(weights_.size());
    for (const auto& u : unitaries_->unitaries) {
      const cplx overlap = (u.adjoint() * dephasing_part(u)).trace() / static_cast<double>(d());
      kappa.push_back(1.0 - overlap.real());
    }
    return kappa;
  }

 private:
  std::shared_ptr<const WeylUnitaries> unitaries_;
  std::vector<double> weights_;
  DecoherenceFunction pf_;
};

inline DensityMatrix apply_mixture(const MixtureMap& m, double t, const DensityMatrix& rho) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(m.d(), m.d());
  for (std::size_t i = 0; i < m.weights().size(); ++i)
    out += m.weights()[i] * apply_input_map(m.unitaries(), static_cast<int>(i), m.decoherence(), t, rho).matrix();
  return DensityMatrix::trusted(std::move(out));
}

/// lambda_i(t) = 1 - d/(d-1) (1 - x_i) p(t).
inline double eigenvalue_profile(const MixtureMap& m, int i, double t) {
  detail::check_index(m.unitaries(), i);
  const double d = m.d();
  return 1.0 - d / (d - 1.0) * (1.0 - m.weights()[i]) * p_eval(m.decoherence(), t);
}

inline Superoperator to_superoperator(const MixtureMap& m, double t) {
  const double p = p_eval(m.decoherence(), t);
  const int d2 = m.d() * m.d();
  Eigen::MatrixXcd acc = (1.0 - p) * Eigen::MatrixXcd::Identity(d2, d2);
  for (std::size_t a = 0; a < m.weights().size(); ++a)
    acc += p * m.weights()[a] * detail::twirl_superop(m.unitaries().unitaries[a]);
  return {std::move(acc)};
}

inline ChoiMatrix to_choi(const Superoperator& s) {
  const Eigen::Index d2 = s.matrix.rows();
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(d2))));
  require(d * d == d2 && s.matrix.cols() == d2, ErrorCode::InvalidArgument, "superoperator must be d^2 x d^2");
  Eigen::MatrixXcd c(d2, d2);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) c(i * d + a, j * d + b) = s.matrix(a + b * d, i + j * d);
  return {std::move(c)};
}

struct CpCheck {
  bool completely_positive = false;
  double min_eigenvalue = 0.0;
};

inline CpCheck is_cp(const ChoiMatrix& c, double tol = 1e-10) {
  const double scale = std::max(1.0, c.matrix.cwiseAbs().maxCoeff());
  require((c.matrix - c.matrix.adjoint()).cwiseAbs().maxCoeff() <= 1e-9 * scale, ErrorCode::NonHermitian,
          "Choi matrix is not Hermitian");
  const Eigen::MatrixXcd herm = 0.5 * (c.matrix + c.matrix.adjoint());
  const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(herm, Eigen::EigenvaluesOnly).eigenvalues()(0);
  return {lmin >= -tol, lmin};
}

inline Superoperator superoperator_of(const KrausSet& kraus) {
  require(!kraus.empty(), ErrorCode::InvalidArgument, "empty Kraus set");
  const Eigen::Index d = kraus.front().rows();
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(d * d, d * d);
  for (const auto& k : kraus) acc += conjugation_superop(k);
  return {std::move(acc)};
}

inline double completeness_deviation(const KrausSet& kraus) {
  const Eigen::Index d = kraus.front().rows();
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(d, d);
  for (const auto& k : kraus) sum += k.adjoint() * k;
  return (sum - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff();
}

inline double unitality_deviation(const KrausSet& kraus) {
  const Eigen::Index d = kraus.front().rows();
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(d, d);
  for (const auto& k : kraus) sum += k * k.adjoint();
  return (sum - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff();
}

struct KrausDual {
  KrausSet dual;
  bool original_trace_preserving = false;
  /// The dual is trace preserving exactly when the original is unital.
  bool dual_trace_preserving = false;
};

/// rho -> sum_j K_j^dagger rho K_j, the effective map of teleporting through
/// a resource state prepared with the original noise.
inline KrausDual kraus_dagger_dual(const KrausSet& kraus, double tol = 1e-10) {
  require(!kraus.empty(), ErrorCode::InvalidArgument, "empty Kraus set");
  KrausDual out;
  out.dual.reserve(kraus.size());
  for (const auto& k : kraus) out.dual.push_back(k.adjoint());
  out.original_trace_preserving = completeness_deviation(kraus) <= tol;
  out.dual_trace_preserving = completeness_deviation(out.dual) <= tol;
  return out;
}

/// Central-difference estimate of L(t) = (dPhi/dt) Phi(t)^{-1}. For t < h a
/// second-order one-sided stencil keeps the evaluation inside t >= 0.
template <class SuperopAt>
Superoperator numeric_generator(SuperopAt&& superop_at, double t, double h) {
  require(h > 0.0, ErrorCode::InvalidArgument, "finite-difference step must be positive");
  const Eigen::MatrixXcd phi = superop_at(t).matrix;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(phi);
  require(lu.rcond() > 1e-13, ErrorCode::SingularAtT, "map is not invertible at t = " + std::to_string(t));
  Eigen::MatrixXcd deriv;
  if (t >= h) {
    deriv = (superop_at(t + h).matrix - superop_at(t - h).matrix) / (2.0 * h);
  } else {
    deriv = (-3.0 * phi + 4.0 * superop_at(t + h).matrix - superop_at(t + 2.0 * h).matrix) / (2.0 * h);
  }
  // deriv * phi^{-1} = (phi^{-T} deriv^T)^T
  const Eigen::MatrixXcd gen = phi.transpose().partialPivLu().solve(deriv.transpose()).transpose();
  return {gen};
}

inline Superoperator numeric_generator(const MixtureMap& m, double t, double h) {
  for (std::size_t i = 0; i < m.weights().size(); ++i)
    require(std::abs(eigenvalue_profile(m, static_cast<int>(i), t)) > 1e-12, ErrorCode::SingularAtT,
            "map is not invertible at t = " + std::to_string(t));
  return numeric_generator([&m](double s) { return to_superoperator(m, s); }, t, h);
}

/// Rate of the generator on each eigenoperator U_i: tr(U_i^dagger L[U_i]) / d.
inline std::vector<double> generator_rates(const Superoperator& gen, const WeylUnitaries& w) {
  std::vector<double> rates;
  rates.reserve(w.unitaries.size());
  for (const auto& u : w.unitaries)
    rates.push_back(((u.adjoint() * apply(gen, u)).trace() / static_cast<double>(w.d())).real());
  return rates;
}

/// Decay rate gamma of a single input map recovered from the generator rate r
/// on a direction it contracts: r = -gamma d/(d-1).
inline double decay_rate_from_generator_rate(double rate, int d) { return -rate * (d - 1.0) / d; }

}  // namespace pauli_mix
