// Command-line front end for the generalized Pauli mixture analyses.
//
// Exit codes: 0 success, 1 computation-level error, 2 usage/validation error.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "pauli_mix/json_io.hpp"
#include "pauli_mix/pauli_mix.hpp"

namespace pm = pauli_mix;
using pm::json;

namespace {

constexpr int kExitComputation = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code_for(pm::ErrorCode code) {
  switch (code) {
    case pm::ErrorCode::InvalidArgument:
    case pm::ErrorCode::NotPrimePower:
    case pm::ErrorCode::NotQubit:
    case pm::ErrorCode::NegativeTime:
    case pm::ErrorCode::UnsupportedFamily:
      return kExitUsage;
    default:
      return kExitComputation;
  }
}

struct FamilyFlags {
  std::string family = "exponential";
  double n = 2.0;
  double c = 1.0;
  double omega = 1.0;
  double t_sharp = 1.0;

  void add_to(CLI::App* app) {
    app->add_option("--family", family, "Decoherence family")
        ->check(CLI::IsMember({"exponential", "cosine", "plateau", "sine"}))
        ->capture_default_str();
    app->add_option("--n", n, "Decoherence parameter n (exponential)")->capture_default_str();
    app->add_option("--c", c, "Decay factor c (exponential)")->capture_default_str();
    app->add_option("--omega", omega, "Angular frequency (cosine, sine)")->capture_default_str();
    app->add_option("--t-sharp", t_sharp, "Plateau onset time")->capture_default_str();
  }

  pm::DecoherenceFunction build() const {
    pm::DecoherenceFunction pf;
    if (family == "exponential")
      pf = pm::Exponential{n, c};
    else if (family == "cosine")
      pf = pm::Cosine{omega};
    else if (family == "plateau")
      pf = pm::Plateau{t_sharp, {}};
    else
      pf = pm::Sine{omega};
    pm::validate(pf);
    return pf;
  }
};

std::vector<double> parse_reals(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("cannot parse " + what + " entry '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError(what + " list is empty");
  return out;
}

/// Strictly positive weights summing to 1 within 1e-9 are accepted; within
/// 1e-6 they are renormalized with a warning.
std::vector<double> parse_weights(const std::string& text, int d) {
  auto w = parse_reals(text, "weight");
  if (static_cast<int>(w.size()) != d + 1)
    throw UsageError("expected d+1 = " + std::to_string(d + 1) + " weights, got " + std::to_string(w.size()));
  double sum = 0.0;
  for (double x : w) {
    if (!(x > 0.0))
      throw UsageError("weights must be strictly positive; replace zeros by a small epsilon such as 5e-4");
    sum += x;
  }
  const double dev = std::abs(sum - 1.0);
  if (dev > 1e-6) throw UsageError("weights must sum to 1 (sum = " + pm::format_double(sum) + ")");
  if (dev > 1e-9) std::cerr << "warning: weights sum to " << pm::format_double(sum) << "; renormalizing\n";
  for (auto& x : w) x /= sum;
  return w;
}

std::vector<double> equal_weights(int d) { return std::vector<double>(d + 1, 1.0 / (d + 1)); }

void emit(const std::string& text, const std::string& output) {
  if (output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(output);
  if (!out) throw UsageError("cannot open output file " + output);
  out << text;
}

void emit_json(const json& j, const std::string& output) { emit(j.dump(2) + "\n", output); }

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("invalid JSON in " + path + ": " + e.what());
  }
}

std::vector<double> time_grid(double t_max, int steps) {
  if (!(t_max > 0.0) || steps < 1) throw UsageError("need --t-max > 0 and --steps >= 1");
  std::vector<double> ts(steps + 1);
  for (int k = 0; k <= steps; ++k) ts[k] = t_max * k / steps;
  return ts;
}

pm::DensityMatrix preset_state(const std::string& preset, const pm::MixtureMap& m) {
  const int d = m.d();
  if (preset == "maximally-mixed") return pm::DensityMatrix::maximally_mixed(d);
  if (preset.rfind("mub:", 0) == 0) {
    int alpha = 0, j = 0;
    if (std::sscanf(preset.c_str(), "mub:%d:%d", &alpha, &j) != 2 || alpha < 1 || alpha > d + 1 || j < 0 || j >= d)
      throw UsageError("preset mub:<basis 1..d+1>:<vector 0..d-1> expected");
    const auto mub = pm::build_mub(d);
    return pm::DensityMatrix::pure(mub.bases[alpha - 1].col(j));
  }
  if (preset.rfind("random:", 0) == 0) {
    const auto seed = std::stoull(preset.substr(7));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    Eigen::VectorXcd psi(d);
    for (int i = 0; i < d; ++i) psi(i) = {gauss(rng), gauss(rng)};
    return pm::DensityMatrix::pure(psi);
  }
  throw UsageError("unknown preset '" + preset + "' (maximally-mixed, mub:A:J, random:SEED)");
}

json bloch_like_norm(const pm::DensityMatrix& rho) {
  // Hilbert-Schmidt distance from the maximally mixed state.
  const int d = rho.dim();
  const Eigen::MatrixXcd dev = rho.matrix() - Eigen::MatrixXcd::Identity(d, d) / static_cast<double>(d);
  return std::sqrt(std::max(0.0, (dev.adjoint() * dev).trace().real()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized Pauli dynamical maps: mixtures, singular points and invertible fractions"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string output;
  app.add_option("--output", output, "Write the result to this file instead of stdout");

  // regime
  int regime_d = 2;
  double regime_n = 2.0;
  auto* regime = app.add_subcommand("regime", "Classify (d, n) relative to the intermediate interval");
  regime->add_option("--d", regime_d, "Dimension (prime power)")->required();
  regime->add_option("--n", regime_n, "Decoherence parameter")->required();

  // singular-time
  int st_d = 2;
  std::string st_weights;
  FamilyFlags st_family;
  double st_tmax = 0.0;
  int st_grid = 2001;
  auto* singular = app.add_subcommand("singular-time", "Per-index singular times, analytic and numeric");
  singular->add_option("--d", st_d, "Dimension (prime power)")->capture_default_str();
  singular->add_option("--weights", st_weights, "Comma-separated mixing weights (d+1 entries)")->required();
  st_family.add_to(singular);
  singular->add_option("--t-max", st_tmax, "Scan horizon (default depends on the family)");
  singular->add_option("--grid", st_grid, "Scan grid points")->capture_default_str();

  // measure
  int me_d = 2;
  double me_n = 1.5;
  std::string me_method = "closed";
  std::uint64_t me_samples = 1'000'000, me_seed = 12345;
  unsigned me_workers = 0;
  auto* measure = app.add_subcommand("measure", "Invertible fraction of the mixing simplex");
  measure->add_option("--d", me_d, "Dimension (prime power)")->required();
  measure->add_option("--n", me_n, "Decoherence parameter")->required();
  measure->add_option("--method", me_method, "closed, quadrature, mc or all")
      ->check(CLI::IsMember({"closed", "quadrature", "mc", "all"}))
      ->capture_default_str();
  measure->add_option("--samples", me_samples, "Monte Carlo samples")->capture_default_str();
  measure->add_option("--seed", me_seed, "Monte Carlo seed")->capture_default_str();
  measure->add_option("--workers", me_workers, "Monte Carlo worker threads (0 = hardware)");

  // sweep
  int sw_lo = 7, sw_hi = 32;
  double sw_n = 1.03;
  std::string sw_method = "closed", sw_format = "csv";
  auto* sweep = app.add_subcommand("sweep", "Invertible fraction over the prime powers in [lo, hi]");
  sweep->add_option("--lo", sw_lo, "Smallest dimension")->capture_default_str();
  sweep->add_option("--hi", sw_hi, "Largest dimension")->capture_default_str();
  sweep->add_option("--n", sw_n, "Decoherence parameter")->required();
  sweep->add_option("--method", sw_method, "closed, quadrature or mc")
      ->check(CLI::IsMember({"closed", "quadrature", "mc"}))
      ->capture_default_str();
  sweep->add_option("--format", sw_format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  sweep->add_option("--samples", me_samples, "Monte Carlo samples")->capture_default_str();
  sweep->add_option("--seed", me_seed, "Monte Carlo seed")->capture_default_str();

  // evolve
  int ev_d = 2;
  std::string ev_weights, ev_state, ev_preset = "maximally-mixed", ev_times;
  FamilyFlags ev_family;
  double ev_tmax = 3.0;
  int ev_steps = 10;
  auto* evolve = app.add_subcommand("evolve", "Trajectory of a state under the output map");
  evolve->add_option("--d", ev_d, "Dimension (prime power)")->capture_default_str();
  evolve->add_option("--weights", ev_weights, "Mixing weights (default: equal)");
  ev_family.add_to(evolve);
  evolve->add_option("--state", ev_state, "Input density matrix JSON file");
  evolve->add_option("--preset", ev_preset, "maximally-mixed, mub:A:J or random:SEED")->capture_default_str();
  evolve->add_option("--times", ev_times, "Comma-separated times (overrides --t-max/--steps)");
  evolve->add_option("--t-max", ev_tmax, "Final time")->capture_default_str();
  evolve->add_option("--steps", ev_steps, "Number of time steps")->capture_default_str();

  // mub verify
  auto* mub = app.add_subcommand("mub", "Mutually unbiased bases");
  mub->require_subcommand(1);
  int mv_d = 0;
  double mv_tol = 1e-12;
  std::string mv_input, mv_export;
  auto* mub_verify = mub->add_subcommand("verify", "Build (or load) a MUB set and verify it");
  mub_verify->add_option("--d", mv_d, "Dimension (prime power)");
  mub_verify->add_option("--input", mv_input, "Verify the set stored in this JSON file instead");
  mub_verify->add_option("--tol", mv_tol, "Tolerance")->capture_default_str();
  mub_verify->add_option("--export", mv_export, "Also write the bases as JSON to this file");

  // cp-check
  int cp_d = 2;
  std::string cp_weights;
  FamilyFlags cp_family;
  double cp_tmax = 3.0, cp_tol = 1e-10;
  int cp_steps = 30;
  auto* cpcheck = app.add_subcommand("cp-check", "CP-divisibility of the output map on a time grid");
  cpcheck->add_option("--d", cp_d, "Dimension (prime power)")->capture_default_str();
  cpcheck->add_option("--weights", cp_weights, "Mixing weights (default: equal)");
  cp_family.add_to(cpcheck);
  cpcheck->add_option("--t-max", cp_tmax, "Final time")->capture_default_str();
  cpcheck->add_option("--steps", cp_steps, "Number of propagator steps")->capture_default_str();
  cpcheck->add_option("--tol", cp_tol, "Tolerance on the Choi minimum eigenvalue")->capture_default_str();

  // generator
  int gen_d = 2, gen_index = 1;
  std::string gen_weights;
  FamilyFlags gen_family;
  double gen_t = 0.5, gen_h = 0.0;
  auto* generator = app.add_subcommand("generator", "Numeric time-local generator vs analytic decay rates");
  generator->add_option("--d", gen_d, "Dimension (prime power)")->capture_default_str();
  generator->add_option("--weights", gen_weights, "Mixing weights; omit to examine a single input map");
  generator->add_option("--index", gen_index, "Input map index 1..d+1 when --weights is omitted")->capture_default_str();
  gen_family.add_to(generator);
  generator->add_option("--t", gen_t, "Time")->capture_default_str();
  generator->add_option("--step", gen_h, "Finite-difference step h (default 1e-5/c)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (regime->parsed()) {
      emit_json(pm::to_json(pm::classify_regime(regime_d, regime_n)), output);
    } else if (singular->parsed()) {
      const auto pf = st_family.build();
      const pm::MixtureMap m(st_d, parse_weights(st_weights, st_d), pf);
      json out = {{"family", std::string(pm::family_name(pf))}, {"d", st_d}, {"weights", m.weights()}};
      if (std::holds_alternative<pm::Sine>(pf))
        out["analytic"] = nullptr;
      else
        out["analytic"] = pm::to_json(pm::analytic_singularity_report(m));
      pm::ScanOptions opt;
      opt.t_max = st_tmax;
      opt.grid_points = st_grid;
      out["numeric"] = pm::to_json(pm::numeric_singularity_scan(m, opt));
      emit_json(out, output);
    } else if (measure->parsed()) {
      const pm::MonteCarloOptions mc{me_samples, me_seed, me_workers};
      if (me_method == "all") {
        json out = {{"d", me_d}, {"n", me_n}};
        const auto closed = pm::delta_closed_form(me_d, me_n);
        out["closed_form"] = pm::to_json(closed);
        out["quadrature"] = pm::to_json(pm::delta_quadrature(me_d, me_n));
        const auto mcr = pm::delta_monte_carlo(me_d, me_n, mc);
        out["monte_carlo"] = pm::to_json(mcr);
        out["mc_deviation_sigmas"] =
            mcr.std_error > 0 ? json(std::abs(mcr.delta - closed.delta) / mcr.std_error) : json(nullptr);
        emit_json(out, output);
      } else if (me_method == "closed") {
        emit_json(pm::to_json(pm::delta_closed_form(me_d, me_n)), output);
      } else if (me_method == "quadrature") {
        emit_json(pm::to_json(pm::delta_quadrature(me_d, me_n)), output);
      } else {
        emit_json(pm::to_json(pm::delta_monte_carlo(me_d, me_n, mc)), output);
      }
    } else if (sweep->parsed()) {
      const auto method = sw_method == "closed"       ? pm::MeasureMethod::ClosedForm
                          : sw_method == "quadrature" ? pm::MeasureMethod::Quadrature
                                                      : pm::MeasureMethod::MonteCarlo;
      const auto rows = pm::sweep(pm::prime_powers_in(sw_lo, sw_hi), sw_n, method,
                                  pm::MonteCarloOptions{me_samples, me_seed, 0});
      if (sw_format == "csv")
        emit(pm::sweep_to_csv(rows), output);
      else
        emit_json({{"n", sw_n}, {"method", std::string(pm::to_string(method))}, {"rows", pm::to_json(rows)}}, output);
    } else if (evolve->parsed()) {
      const pm::MixtureMap m(ev_d, ev_weights.empty() ? equal_weights(ev_d) : parse_weights(ev_weights, ev_d),
                             ev_family.build());
      const auto rho0 = ev_state.empty() ? preset_state(ev_preset, m)
                                         : pm::DensityMatrix::validated(pm::matrix_from_json(read_json_file(ev_state)));
      if (rho0.dim() != ev_d) throw UsageError("state dimension does not match --d");
      const auto times = ev_times.empty() ? time_grid(ev_tmax, ev_steps) : parse_reals(ev_times, "time");
      json traj = json::array();
      for (double t : times) {
        const auto rho = pm::apply_mixture(m, t, rho0);
        json lambdas = json::array();
        for (int i = 0; i <= ev_d; ++i) lambdas.push_back(pm::eigenvalue_profile(m, i, t));
        traj.push_back({{"t", t},
                        {"rho", pm::matrix_to_json(rho.matrix())},
                        {"lambdas", std::move(lambdas)},
                        {"distance_from_mixed", bloch_like_norm(rho)}});
      }
      emit_json({{"d", ev_d},
                 {"family", std::string(pm::family_name(m.decoherence()))},
                 {"weights", m.weights()},
                 {"trajectory", std::move(traj)}},
                output);
    } else if (mub_verify->parsed()) {
      if (mv_input.empty() == (mv_d == 0)) throw UsageError("give exactly one of --d or --input");
      const auto set = mv_input.empty() ? pm::build_mub(mv_d) : pm::mub_from_json(read_json_file(mv_input));
      const auto report = pm::verify_mub(set, mv_tol);
      if (!mv_export.empty()) emit_json(pm::mub_to_json(set), mv_export);
      json out = pm::to_json(report, mv_tol);
      out["d"] = set.d();
      out["bases"] = set.bases.size();
      emit_json(out, output);
      return report.passed ? 0 : kExitComputation;
    } else if (cpcheck->parsed()) {
      const pm::MixtureMap m(cp_d, cp_weights.empty() ? equal_weights(cp_d) : parse_weights(cp_weights, cp_d),
                             cp_family.build());
      const auto steps = pm::cp_divisibility_check(m, time_grid(cp_tmax, cp_steps), cp_tol);
      json arr = json::array();
      bool all_cp = true;
      for (const auto& s : steps) {
        all_cp = all_cp && s.completely_positive;
        arr.push_back({{"t_from", s.t_from}, {"t_to", s.t_to}, {"min_eigenvalue", s.min_eigenvalue},
                       {"cp", s.completely_positive}});
      }
      emit_json({{"d", cp_d}, {"weights", m.weights()}, {"cp_divisible", all_cp}, {"steps", std::move(arr)}}, output);
    } else if (generator->parsed()) {
      const auto pf = gen_family.build();
      const double c_scale = std::holds_alternative<pm::Exponential>(pf) ? gen_family.c : 1.0;
      const double h = gen_h > 0.0 ? gen_h : 1e-5 / c_scale;
      json out = {{"d", gen_d}, {"t", gen_t}, {"h", h}, {"family", std::string(pm::family_name(pf))}};
      if (gen_weights.empty()) {
        const auto w = pm::build_unitaries(gen_d);
        if (gen_index < 1 || gen_index > gen_d + 1) throw UsageError("--index must lie in 1..d+1");
        const int i = gen_index - 1;
        const auto gen = pm::numeric_generator(
            [&](double s) { return pm::input_map_superoperator(w, i, pf, s); }, gen_t, h);
        const auto rates = pm::generator_rates(gen, w);
        const int other = i == 0 ? 1 : 0;
        const double numeric_gamma = pm::decay_rate_from_generator_rate(rates[other], gen_d);
        const double analytic_gamma = pm::decay_rate(pf, gen_t);
        out["index"] = gen_index;
        out["rates"] = rates;
        out["numeric_gamma"] = numeric_gamma;
        out["analytic_gamma"] = analytic_gamma;
        out["relative_diff"] = std::abs(numeric_gamma - analytic_gamma) / std::abs(analytic_gamma);
      } else {
        const pm::MixtureMap m(gen_d, parse_weights(gen_weights, gen_d), pf);
        const auto rates = pm::generator_rates(pm::numeric_generator(m, gen_t, h), m.unitaries());
        json analytic = json::array();
        const double d = gen_d;
        for (std::size_t i = 0; i < rates.size(); ++i) {
          const double k = d / (d - 1.0) * (1.0 - m.weights()[i]);
          analytic.push_back(-k * pm::p_derivative(pf, gen_t) / pm::eigenvalue_profile(m, static_cast<int>(i), gen_t));
        }
        out["weights"] = m.weights();
        out["rates"] = rates;
        out["analytic_rates"] = std::move(analytic);
      }
      emit_json(out, output);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const pm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitComputation;
  }
  return 0;
}
