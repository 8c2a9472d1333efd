#pragma once

// JSON and CSV encodings shared by the CLI and the tests.
//
// Complex matrices are arrays of rows, each row an array of [re, im] pairs.
// A MubSet is {"d": q, "bases": [basis][vector j][component s] -> [re, im]}.

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pauli_mix/dynmaps.hpp"
#include "pauli_mix/error.hpp"
#include "pauli_mix/invertibility.hpp"
#include "pauli_mix/measure.hpp"
#include "pauli_mix/mub.hpp"

namespace pauli_mix {

using json = nlohmann::json;

inline json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json& j) {
  require(j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(), ErrorCode::InvalidArgument,
          "complex numbers are encoded as [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json matrix_to_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Eigen::MatrixXcd matrix_from_json(const json& j) {
  require(j.is_array() && !j.empty(), ErrorCode::InvalidArgument, "matrix must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    require(j[r].is_array() && static_cast<Eigen::Index>(j[r].size()) == cols, ErrorCode::InvalidArgument,
            "matrix rows must have equal length");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(j[r][c]);
  }
  return m;
}

inline json mub_to_json(const MubSet& m) {
  json bases = json::array();
  for (const auto& basis : m.bases) {
    json vectors = json::array();
    for (Eigen::Index j = 0; j < basis.cols(); ++j) {
      json comps = json::array();
      for (Eigen::Index s = 0; s < basis.rows(); ++s) comps.push_back(complex_to_json(basis(s, j)));
      vectors.push_back(std::move(comps));
    }
    bases.push_back(std::move(vectors));
  }
  return {{"d", m.d()}, {"bases", std::move(bases)}};
}

/// The dimension is read back as given; it need not be a prime power.
inline MubSet mub_from_json(const json& j) {
  require(j.contains("d") && j.contains("bases"), ErrorCode::InvalidArgument, "MUB JSON needs d and bases");
  const int d = j.at("d").get<int>();
  MubSet m;
  m.dim = {d, 1, d};
  for (const auto& basis : j.at("bases")) {
    require(static_cast<int>(basis.size()) == d, ErrorCode::InvalidArgument, "each basis needs d vectors");
    Eigen::MatrixXcd b(d, d);
    for (int v = 0; v < d; ++v) {
      require(static_cast<int>(basis[v].size()) == d, ErrorCode::InvalidArgument, "each vector needs d components");
      for (int s = 0; s < d; ++s) b(s, v) = complex_from_json(basis[v][s]);
    }
    m.bases.push_back(std::move(b));
  }
  return m;
}

inline json to_json(const MubVerification& v, double tol) {
  return {{"passed", v.passed},
          {"tolerance", tol},
          {"max_orthonormality_deviation", v.max_orthonormality_deviation},
          {"max_unbiasedness_deviation", v.max_unbiasedness_deviation}};
}

inline json to_json(const Regime& r) {
  return {{"d", r.d},
          {"n", r.n},
          {"regime", std::string(to_string(r.kind))},
          {"interval", json::array({r.lower, r.upper})},
          {"g", invertibility_threshold(r.d, r.n)}};
}

inline json optional_to_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline json to_json(const InvertibilityReport& r) {
  json times = json::array();
  for (std::size_t i = 0; i < r.singular_times.size(); ++i)
    times.push_back({{"i", i + 1}, {"t_star", optional_to_json(r.singular_times[i])}});
  json out = {{"classification", std::string(to_string(r.classification))},
              {"singular_times", std::move(times)},
              {"method", std::string(to_string(r.method))},
              {"t_star", optional_to_json(r.t_star)}};
  if (r.method == Method::Numeric) out["grid_too_coarse"] = r.grid_too_coarse;
  return out;
}

inline json to_json(const MeasureResult& r) {
  json out = {{"d", r.d}, {"n", r.n}, {"delta", r.delta}, {"method", std::string(to_string(r.method))}};
  if (r.method == MeasureMethod::MonteCarlo) {
    out["samples"] = r.samples;
    out["hits"] = r.hits;
    out["stderr"] = r.std_error;
    out["seed"] = r.seed;
  }
  return out;
}

inline json to_json(const std::vector<SweepRow>& rows) {
  json arr = json::array();
  for (const auto& row : rows)
    arr.push_back({{"d", row.d},
                   {"delta", row.delta},
                   {"log10_delta", std::isfinite(row.log10_delta) ? json(row.log10_delta) : json(nullptr)}});
  return arr;
}

/// Seventeen significant digits: enough to round-trip any double.
inline std::string format_double(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "d,delta,log10_delta\n";
  for (const auto& row : rows)
    os << row.d << ',' << format_double(row.delta) << ',' << format_double(row.log10_delta) << '\n';
  return os.str();
}

}  // namespace pauli_mix
