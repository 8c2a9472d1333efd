#include <catch2/catch_amalgamated.hpp>

#include "pauli_mix/dynmaps.hpp"
#include "support/oracles.hpp"

using namespace pauli_mix;

namespace {

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

std::vector<double> equal(int d) { return std::vector<double>(d + 1, 1.0 / (d + 1)); }

Eigen::Vector3d bloch(const Eigen::MatrixXcd& rho) {
  Eigen::Vector3d r;
  for (int a = 0; a < 3; ++a) r(a) = (rho * Eigen::MatrixXcd(oracle::pauli(a))).trace().real();
  return r;
}

DecoherenceFunction random_family(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  switch (rng() % 3) {
    case 0: return Exponential{1.0 + 3.0 * u(rng), 0.2 + 2.0 * u(rng)};
    case 1: return Cosine{0.2 + 3.0 * u(rng)};
    default: return Plateau{0.2 + 2.0 * u(rng), {}};
  }
}

}  // namespace

TEST_CASE("p_eval examples and family invariants") {
  CHECK(p_eval(Exponential{2, 1}, 0.0) == 0.0);
  CHECK(std::abs(p_eval(Exponential{2, 1}, 60.0) - 0.5) < 1e-15);
  CHECK(std::abs(p_eval(Cosine{std::numbers::pi}, 1.0) - 1.0) < 1e-15);
  CHECK(p_eval(Plateau{2.0, {}}, 1.0) == 0.25);
  CHECK(p_eval(Plateau{2.0, {}}, 7.0) == 0.5);
  CHECK(p_eval(Plateau{1.0, [](double t) { return t * t / 2.0; }}, 0.5) == 0.125);
  try {
    p_eval(Cosine{1.0}, -0.1);
    FAIL("negative time accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NegativeTime);
  }
  double prev = -1.0;
  for (int k = 0; k <= 200; ++k) {
    const double p = p_eval(Exponential{1.7, 0.9}, 0.1 * k);
    CHECK(p > prev);
    CHECK(p <= 1.0 / 1.7);
    prev = p;
  }
  CHECK_THROWS_AS(MixtureMap(2, equal(2), Exponential{0.5, 1.0}), Error);
}

TEST_CASE("p_derivative matches finite differences") {
  const std::vector<DecoherenceFunction> fams{Exponential{1.5, 2.0}, Cosine{1.3}, Plateau{2.0, {}}, Sine{0.7}};
  for (const auto& pf : fams)
    for (double t : {0.3, 0.9, 1.7}) {
      const double h = 1e-6;
      const double fd = (p_eval(pf, t + h) - p_eval(pf, t - h)) / (2 * h);
      CHECK(std::abs(fd - p_derivative(pf, t)) < 1e-7);
    }
}

TEST_CASE("input map examples") {
  const auto w2 = build_unitaries(2);
  std::mt19937_64 rng(7);
  const auto rho = DensityMatrix::validated(oracle::random_density(rng, 2));
  CHECK(max_abs(apply_input_map(w2, 1, Exponential{2, 1}, 0.0, rho).matrix() - rho.matrix()) == 0.0);
  // Qubit reduction, entrywise.
  for (int i = 0; i < 3; ++i)
    for (double t : {0.2, 1.0, 2.5}) {
      const DecoherenceFunction pf = Exponential{1.2, 0.8};
      const auto out = apply_input_map(w2, i, pf, t, rho).matrix();
      CHECK(max_abs(out - oracle::pauli_channel(i, p_eval(pf, t), rho.matrix())) < 1e-12);
    }
  // Basis-i projectors are fixed points, even at p = 1.
  const auto m3 = build_mub(3);
  const auto w3 = build_unitaries(m3);
  for (int i = 0; i < 4; ++i) {
    const auto proj = DensityMatrix::pure(m3.bases[i].col(0));
    const auto out = apply_input_map(w3, i, Cosine{std::numbers::pi}, 1.0, proj);
    CHECK(max_abs(out.matrix() - proj.matrix()) < 1e-12);
  }
  CHECK_THROWS_AS(apply_input_map(w3, 4, Cosine{1.0}, 1.0, DensityMatrix::maximally_mixed(3)), Error);
}

TEST_CASE("density matrix validation") {
  Eigen::MatrixXcd bad(2, 2);
  bad << 1.2, 0, 0, -0.2;
  CHECK_THROWS_AS(DensityMatrix::validated(bad), Error);
  Eigen::MatrixXcd nonherm(2, 2);
  nonherm << 0.5, 0.1, 0.0, 0.5;
  CHECK_THROWS_AS(DensityMatrix::validated(nonherm), Error);
  CHECK_NOTHROW(DensityMatrix::validated(Eigen::MatrixXcd::Identity(3, 3) / 3.0));
}

TEST_CASE("mixture examples") {
  std::mt19937_64 rng(11);
  const MixtureMap m(3, {0.1, 0.2, 0.3, 0.4}, Exponential{1.1, 1.0});
  const auto rho = DensityMatrix::validated(oracle::random_density(rng, 3));
  CHECK(max_abs(apply_mixture(m, 0.0, rho).matrix() - rho.matrix()) < 1e-15);
  const auto mixed = DensityMatrix::maximally_mixed(3);
  for (double t : {0.5, 2.0, 9.0}) CHECK(max_abs(apply_mixture(m, t, mixed).matrix() - mixed.matrix()) < 1e-15);

  // Semigroup point for the qubit: Bloch vector shrinks by exp(-t).
  const MixtureMap semi(2, equal(2), Exponential{4.0 / 3.0, 1.0});
  const auto q = DensityMatrix::validated(oracle::random_density(rng, 2));
  const Eigen::Vector3d r0 = bloch(q.matrix());
  for (double t : {0.1, 0.7, 2.0, 4.0}) {
    const Eigen::Vector3d rt = bloch(apply_mixture(semi, t, q).matrix());
    CHECK((rt - std::exp(-t) * r0).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("mixture weights are validated") {
  CHECK_THROWS_AS(MixtureMap(2, {0.5, 0.5, 0.0}, Cosine{1.0}), Error);
  CHECK_THROWS_AS(MixtureMap(2, {0.5, 0.5}, Cosine{1.0}), Error);
  CHECK_THROWS_AS(MixtureMap(2, {0.5, 0.3, 0.3}, Cosine{1.0}), Error);
}

TEST_CASE("eigenvalue profile examples") {
  const MixtureMap m(2, {1.0 / 3.0, 0.5, 1.0 / 6.0}, Cosine{std::numbers::pi / 2.0});
  CHECK(eigenvalue_profile(m, 0, 0.0) == 1.0);
  CHECK(std::abs(eigenvalue_profile(m, 0, 1.0) - 1.0 / 3.0) < 1e-15);
  for (int d : {2, 3, 5}) {
    const double n = d * d / (d * d - 1.0);
    const MixtureMap semi(d, equal(d), Exponential{n, 1.0});
    for (double t : {0.1, 1.0, 3.0})
      for (int i = 0; i <= d; ++i) CHECK(std::abs(eigenvalue_profile(semi, i, t) - std::exp(-t)) < 1e-14);
  }
}

TEST_CASE("numeric contraction coefficients match the analytic eigenvalues") {
  std::mt19937_64 rng(5);
  for (int d : {2, 3, 4, 5, 7}) {
    const MixtureMap m(d, oracle::random_simplex(rng, d + 1), Exponential{1.0, 1.0});
    const auto kappa = m.contraction_coefficients();
    for (int i = 0; i <= d; ++i) CHECK(std::abs(kappa[i] - d / (d - 1.0) * (1.0 - m.weights()[i])) < 1e-12);
  }
}

TEST_CASE("superoperator conventions") {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXcd a = oracle::random_gaussian(rng, 3, 3);
  const Eigen::MatrixXcd x = oracle::random_gaussian(rng, 3, 3);
  CHECK(max_abs(unvec(conjugation_superop(a) * vec(x), 3) - a * x * a.adjoint()) < 1e-12);
  const auto s = oracle::superop_by_action(3, [&](const Eigen::MatrixXcd& y) -> Eigen::MatrixXcd {
    return a * y * a.adjoint();
  });
  CHECK(max_abs(s - conjugation_superop(a)) < 1e-12);
}

TEST_CASE("superoperator of the mixture") {
  const MixtureMap m(3, {0.1, 0.2, 0.3, 0.4}, Exponential{1.1, 1.0});
  CHECK(max_abs(to_superoperator(m, 0.0).matrix - Eigen::MatrixXcd::Identity(9, 9)) < 1e-15);
  // Matches the action, entry by entry.
  const auto by_action = oracle::superop_by_action(3, [&](const Eigen::MatrixXcd& y) -> Eigen::MatrixXcd {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(3, 3);
    const double p = p_eval(m.decoherence(), 1.3);
    for (int i = 0; i < 4; ++i) {
      Eigen::MatrixXcd twirl = Eigen::MatrixXcd::Zero(3, 3);
      Eigen::MatrixXcd uk = Eigen::MatrixXcd::Identity(3, 3);
      for (int k = 1; k < 3; ++k) {
        uk = uk * m.unitaries().unitaries[i];
        twirl += uk * y * uk.adjoint();
      }
      acc += m.weights()[i] * ((1 - p) * y + p / 2.0 * twirl);
    }
    return acc;
  });
  CHECK(max_abs(by_action - to_superoperator(m, 1.3).matrix) < 1e-12);
}

TEST_CASE("spectrum, determinant and trace preservation for d <= 9") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int d : {2, 3, 4, 5, 7, 8, 9}) {
    auto w = std::make_shared<const WeylUnitaries>(build_unitaries(d));
    for (int draw = 0; draw < 20; ++draw) {
      const MixtureMap m(w, oracle::random_simplex(rng, d + 1), Exponential{1.0 + u(rng), 0.5 + u(rng)});
      const double t = 3.0 * u(rng);
      const auto s = to_superoperator(m, t);
      std::vector<double> expect{1.0};
      double det = 1.0;
      for (int i = 0; i <= d; ++i) {
        const double l = eigenvalue_profile(m, i, t);
        for (int k = 0; k < d - 1; ++k) expect.push_back(l);
        det *= std::pow(l, d - 1);
      }
      std::sort(expect.begin(), expect.end());
      double max_imag = 0.0;
      const auto got = oracle::sorted_real_eigs(s.matrix, &max_imag);
      double worst = max_imag;
      for (std::size_t k = 0; k < got.size(); ++k) worst = std::max(worst, std::abs(got[k] - expect[k]));
      INFO("d = " << d << " draw " << draw);
      CHECK(worst < 1e-10);
      const cplx got_det = s.matrix.partialPivLu().determinant();
      CHECK(std::abs(got_det - det) <= 1e-8 * std::max(std::abs(det), 1e-300));
      const Eigen::RowVectorXcd vid = vec(Eigen::MatrixXcd::Identity(d, d)).transpose();
      CHECK((vid * s.matrix - vid).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("states stay valid under random maps") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int d : {2, 3, 4, 5}) {
    for (int draw = 0; draw < 20; ++draw) {
      const MixtureMap m(d, oracle::random_simplex(rng, d + 1), random_family(rng));
      const auto rho = DensityMatrix::validated(oracle::random_density(rng, d));
      const auto out = apply_mixture(m, 5.0 * u(rng), rho);
      const auto chk = check_density(out.matrix());
      CHECK(chk.trace_deviation < 1e-12);
      CHECK(chk.hermiticity_deviation < 1e-12);
      CHECK(chk.min_eigenvalue > -1e-10);
    }
  }
}

TEST_CASE("Choi examples") {
  const auto id = to_choi(Superoperator{Eigen::MatrixXcd::Identity(4, 4)});
  Eigen::VectorXcd phi = Eigen::VectorXcd::Zero(4);
  phi(0) = phi(3) = 1.0;
  CHECK(max_abs(id.matrix - phi * phi.adjoint()) < 1e-15);
  CHECK(std::abs(id.matrix.trace() - 2.0) < 1e-15);
  CHECK(is_cp(id).completely_positive);

  const Eigen::VectorXcd vid = vec(Eigen::MatrixXcd::Identity(2, 2));
  const auto depol = to_choi(Superoperator{vid * vid.adjoint() / 2.0});
  const auto ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(depol.matrix).eigenvalues();
  for (int k = 0; k < 4; ++k) CHECK(std::abs(ev(k) - 0.5) < 1e-15);

  const auto transpose = oracle::superop_by_action(2, [](const Eigen::MatrixXcd& y) -> Eigen::MatrixXcd {
    return y.transpose();
  });
  const auto tr = is_cp(to_choi(Superoperator{transpose}));
  CHECK_FALSE(tr.completely_positive);
  CHECK(std::abs(tr.min_eigenvalue + 1.0) < 1e-12);

  Eigen::MatrixXcd skew = Eigen::MatrixXcd::Zero(4, 4);
  skew(0, 1) = 1.0;
  try {
    is_cp(ChoiMatrix{skew});
    FAIL("non-Hermitian accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonHermitian);
  }

  const MixtureMap m(3, {0.4, 0.3, 0.2, 0.1}, Cosine{1.0});
  for (double t : {0.0, 0.8, 2.0, 3.1}) {
    const auto c = to_choi(to_superoperator(m, t));
    CHECK(max_abs(c.matrix - c.matrix.adjoint()) < 1e-14);
    CHECK(std::abs(c.matrix.trace() - 3.0) < 1e-12);
    CHECK(is_cp(c).completely_positive);
  }
}

TEST_CASE("Kraus dagger dual") {
  const double p = 0.3;
  const KrausSet pauli_x{std::sqrt(1 - p) * Eigen::MatrixXcd::Identity(2, 2),
                         std::sqrt(p) * Eigen::MatrixXcd(oracle::pauli(1))};
  const auto dual = kraus_dagger_dual(pauli_x);
  for (std::size_t j = 0; j < 2; ++j) CHECK(max_abs(dual.dual[j] - pauli_x[j]) < 1e-15);
  CHECK(dual.original_trace_preserving);
  CHECK(dual.dual_trace_preserving);

  const double g = 0.4;
  Eigen::MatrixXcd k0(2, 2), k1(2, 2);
  k0 << 1, 0, 0, std::sqrt(1 - g);
  k1 << 0, std::sqrt(g), 0, 0;
  const auto ad = kraus_dagger_dual({k0, k1});
  CHECK(ad.original_trace_preserving);
  CHECK_FALSE(ad.dual_trace_preserving);
  CHECK(std::abs(completeness_deviation(ad.dual) - g) < 1e-12);
  CHECK(unitality_deviation({k0, k1}) > 0.1);

  std::mt19937_64 rng(17);
  for (int d : {2, 3})
    for (int draw = 0; draw < 10; ++draw) {
      const auto k = oracle::random_kraus(rng, d, 1 + static_cast<int>(rng() % 4));
      CHECK(completeness_deviation(k) < 1e-12);
      const auto s = superoperator_of(k).matrix;
      const auto sd = superoperator_of(kraus_dagger_dual(k).dual).matrix;
      CHECK(max_abs(sd - s.adjoint()) < 1e-12);
      CHECK(std::abs(sd.determinant() - std::conj(s.determinant())) < 1e-10);
    }
}

TEST_CASE("decay rate examples") {
  CHECK(std::abs(decay_rate(Exponential{2, 1}, 0.0) - 0.5) < 1e-15);
  CHECK(decay_rate(Exponential{3, 2}, 30.0) > 0.0);
  CHECK(decay_rate(Exponential{3, 2}, 30.0) < 1e-20);
  CHECK(std::abs(decay_rate(Cosine{1.0}, std::numbers::pi / 4) - 0.5) < 1e-15);
  const double ts = std::log(2.0 / (2.0 - 1.5)) / 1.0;
  try {
    decay_rate(Exponential{1.5, 1.0}, ts);
    FAIL("singular rate returned");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RateSingular);
  }
  CHECK_THROWS_AS(decay_rate(Cosine{2.0}, std::numbers::pi / 4), Error);
  CHECK_THROWS_AS(decay_rate(Plateau{1.0, {}}, 0.5), Error);
}

TEST_CASE("numeric generator") {
  // Single qubit map: rate on the contracted directions is -2 gamma.
  const auto w = build_unitaries(2);
  for (double n : {2.0, 3.0}) {
    const DecoherenceFunction pf = Exponential{n, 1.0};
    for (double t : {0.0, 0.5, 2.0}) {
      const auto gen = numeric_generator([&](double s) { return input_map_superoperator(w, 0, pf, s); }, t, 1e-5);
      const auto rates = generator_rates(gen, w);
      CHECK(std::abs(rates[0]) < 1e-9);
      const double gamma = decay_rate_from_generator_rate(rates[1], 2);
      CHECK(std::abs(gamma - decay_rate(pf, t)) <= 1e-6 * decay_rate(pf, t));
      CHECK(std::abs(rates[2] - rates[1]) < 1e-9);
    }
  }
  // t = 0 rates from the derivative of the eigenvalues.
  std::mt19937_64 rng(8);
  for (int d : {2, 3, 5}) {
    const MixtureMap m(d, oracle::random_simplex(rng, d + 1), Cosine{1.3});
    const auto rates = generator_rates(numeric_generator(m, 0.0, 1e-4), m.unitaries());
    const double pdot = p_derivative(m.decoherence(), 0.0);
    for (int i = 0; i <= d; ++i) CHECK(std::abs(rates[i] + d / (d - 1.0) * (1 - m.weights()[i]) * pdot) < 1e-7);
    const MixtureMap e(d, oracle::random_simplex(rng, d + 1), Exponential{1.0, 2.0});
    const auto r0 = generator_rates(numeric_generator(e, 0.0, 1e-5), e.unitaries());
    for (int i = 0; i <= d; ++i) {
      const double expect = -d / (d - 1.0) * (1 - e.weights()[i]) * 2.0;
      CHECK(std::abs(r0[i] - expect) < 1e-6 * std::abs(expect));
    }
  }
  // Semigroup point: every rate is -c.
  for (int d : {2, 3}) {
    const MixtureMap semi(d, equal(d), Exponential{d * d / (d * d - 1.0), 0.7});
    for (double t : {0.3, 1.5})
      for (double r : generator_rates(numeric_generator(semi, t, 1e-5), semi.unitaries()))
        CHECK(std::abs(r + 0.7) < 1e-7);
  }
  // Singular map.
  const MixtureMap sing(2, {0.98, 0.01, 0.01}, Cosine{1.0});
  const auto ts = oracle::first_root([&](double t) { return eigenvalue_profile(sing, 1, t); }, 0.0, 4.0);
  REQUIRE(ts);
  try {
    numeric_generator(sing, *ts, 1e-5);
    FAIL("singular point accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularAtT);
  }
}
