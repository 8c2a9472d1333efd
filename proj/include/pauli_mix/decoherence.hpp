#pragma once

// Decoherence functions p(t) that drive the generalized Pauli maps.

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <string_view>
#include <variant>

#include "pauli_mix/error.hpp"

namespace pauli_mix {

/// p(t) = (1 - exp(-c t)) / n, n >= 1, c > 0.
struct Exponential {
  double n = 2.0;
  double c = 1.0;
};

/// p(t) = (1 - cos(omega t)) / 2.
struct Cosine {
  double omega = 1.0;
};

/// Monotone ramp up to p(t_sharp) = 1/2, constant afterwards. An empty ramp
/// means the linear ramp t / (2 t_sharp).
struct Plateau {
  double t_sharp = 1.0;
  std::function<double(double)> ramp;
};

/// p(t) = sin(omega t). A decoherence function only on [0, pi/omega]; used
/// through the numeric scan only.
struct Sine {
  double omega = 1.0;
};

using DecoherenceFunction = std::variant<Exponential, Cosine, Plateau, Sine>;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline std::string_view family_name(const DecoherenceFunction& pf) {
  return std::visit(overloaded{[](const Exponential&) { return std::string_view("exponential"); },
                               [](const Cosine&) { return std::string_view("cosine"); },
                               [](const Plateau&) { return std::string_view("plateau"); },
                               [](const Sine&) { return std::string_view("sine"); }},
                    pf);
}

inline void validate(const DecoherenceFunction& pf) {
  std::visit(overloaded{[](const Exponential& e) {
                          require(e.n >= 1.0, ErrorCode::InvalidArgument, "exponential family needs n >= 1");
                          require(e.c > 0.0, ErrorCode::InvalidArgument, "exponential family needs c > 0");
                        },
                        [](const Cosine& f) {
                          require(f.omega > 0.0, ErrorCode::InvalidArgument, "cosine family needs omega > 0");
                        },
                        [](const Plateau& f) {
                          require(f.t_sharp > 0.0, ErrorCode::InvalidArgument, "plateau family needs t_sharp > 0");
                        },
                        [](const Sine& f) {
                          require(f.omega > 0.0, ErrorCode::InvalidArgument, "sine family needs omega > 0");
                        }},
             pf);
}

inline double p_eval(const DecoherenceFunction& pf, double t) {
  require(t >= 0.0, ErrorCode::NegativeTime, "p(t) is defined for t >= 0 only");
  return std::visit(overloaded{[t](const Exponential& e) { return -std::expm1(-e.c * t) / e.n; },
                               [t](const Cosine& f) { return (1.0 - std::cos(f.omega * t)) / 2.0; },
                               [t](const Plateau& f) {
                                 if (t >= f.t_sharp) return 0.5;
                                 return f.ramp ? f.ramp(t) : t / (2.0 * f.t_sharp);
                               },
                               [t](const Sine& f) { return std::sin(f.omega * t); }},
                    pf);
}

inline double p_derivative(const DecoherenceFunction& pf, double t) {
  require(t >= 0.0, ErrorCode::NegativeTime, "p'(t) is defined for t >= 0 only");
  return std::visit(overloaded{[t](const Exponential& e) { return e.c * std::exp(-e.c * t) / e.n; },
                               [t](const Cosine& f) { return f.omega * std::sin(f.omega * t) / 2.0; },
                               [t](const Plateau& f) -> double {
                                 require(!f.ramp, ErrorCode::UnsupportedFamily,
                                         "p'(t) is only known for the linear plateau ramp");
                                 return t < f.t_sharp ? 1.0 / (2.0 * f.t_sharp) : 0.0;
                               },
                               [t](const Sine& f) { return f.omega * std::cos(f.omega * t); }},
                    pf);
}

/// Decay rate gamma(t) of the time-local generator of a single input map.
inline double decay_rate(const DecoherenceFunction& pf, double t) {
  require(t >= 0.0, ErrorCode::NegativeTime, "decay rate is defined for t >= 0 only");
  return std::visit(
      overloaded{[t](const Exponential& e) {
                   const double denom = (e.n - 2.0) * std::exp(e.c * t) + 2.0;
                   require(std::abs(denom) > 1e-12 * std::max(1.0, std::abs(e.n - 2.0) * std::exp(e.c * t)),
                           ErrorCode::RateSingular, "exponential decay rate diverges at t = " + std::to_string(t));
                   return e.c / denom;
                 },
                 [t](const Cosine& f) {
                   const double cs = std::cos(f.omega * t);
                   require(std::abs(cs) > 1e-12, ErrorCode::RateSingular,
                           "cosine decay rate diverges at t = " + std::to_string(t));
                   return f.omega / 2.0 * std::sin(f.omega * t) / cs;
                 },
                 [](const Plateau&) -> double {
                   throw Error(ErrorCode::UnsupportedFamily, "decay rate is available for exponential and cosine only");
                 },
                 [](const Sine&) -> double {
                   throw Error(ErrorCode::UnsupportedFamily, "decay rate is available for exponential and cosine only");
                 }},
      pf);
}

/// Window in which the first singular time of a family is searched by default.
inline double default_scan_horizon(const DecoherenceFunction& pf) {
  return std::visit(overloaded{[](const Exponential& e) { return 50.0 / e.c; },
                               [](const Cosine& f) { return 2.0 * std::numbers::pi / f.omega; },
                               [](const Plateau& f) { return 100.0 * f.t_sharp; },
                               [](const Sine& f) { return std::numbers::pi / f.omega; }},
                    pf);
}

}  // namespace pauli_mix
