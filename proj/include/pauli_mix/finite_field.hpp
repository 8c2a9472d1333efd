#pragma once

// Arithmetic in GF(p^k) using a polynomial basis over GF(p).
//
// Elements are coefficient vectors c_0 + c_1 x + ... + c_{k-1} x^{k-1}. The
// modulus is the smallest monic irreducible polynomial of degree k, where
// polynomials are ordered by the integer sum c_i p^i. The same integer
// encoding gives every element a stable index in [0, q).

#include <cstdint>
#include <string>
#include <vector>

#include "pauli_mix/error.hpp"

namespace pauli_mix {

struct PrimePowerDim {
  int p = 2;
  int k = 1;
  int q = 2;

  friend bool operator==(const PrimePowerDim&, const PrimePowerDim&) = default;
};

inline bool is_prime(int n) {
  if (n < 2) return false;
  for (int f = 2; f * f <= n; ++f)
    if (n % f == 0) return false;
  return true;
}

inline PrimePowerDim factor_prime_power(int d) {
  require(d >= 2, ErrorCode::NotPrimePower, "dimension must be at least 2, got " + std::to_string(d));
  int p = 2;
  while (d % p != 0) ++p;
  int k = 0;
  int rest = d;
  while (rest % p == 0) {
    rest /= p;
    ++k;
  }
  require(rest == 1, ErrorCode::NotPrimePower, std::to_string(d) + " is not a prime power");
  return {p, k, d};
}

inline bool is_prime_power(int d) {
  if (d < 2) return false;
  try {
    factor_prime_power(d);
    return true;
  } catch (const Error&) {
    return false;
  }
}

/// Monic polynomial over GF(p), coefficients lowest degree first.
struct IrreduciblePoly {
  int p = 2;
  std::vector<int> coeffs;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  friend bool operator==(const IrreduciblePoly&, const IrreduciblePoly&) = default;
};

namespace detail {

using Poly = std::vector<int>;

inline int mod_p(long long v, int p) {
  long long r = v % p;
  return static_cast<int>(r < 0 ? r + p : r);
}

inline int inverse_mod_p(int a, int p) {
  // p is prime and small; Fermat.
  long long result = 1, base = mod_p(a, p);
  for (int e = p - 2; e > 0; e >>= 1) {
    if (e & 1) result = result * base % p;
    base = base * base % p;
  }
  return static_cast<int>(result);
}

inline void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

// Remainder of a modulo m (m nonzero), coefficients in GF(p).
inline Poly poly_rem(Poly a, const Poly& m, int p) {
  trim(a);
  Poly mm = m;
  trim(mm);
  const int dm = static_cast<int>(mm.size()) - 1;
  const int lead_inv = inverse_mod_p(mm.back(), p);
  while (static_cast<int>(a.size()) - 1 >= dm && !a.empty()) {
    const int shift = static_cast<int>(a.size()) - 1 - dm;
    const int factor = static_cast<int>(static_cast<long long>(a.back()) * lead_inv % p);
    for (int i = 0; i <= dm; ++i)
      a[i + shift] = mod_p(a[i + shift] - static_cast<long long>(factor) * mm[i], p);
    trim(a);
  }
  return a;
}

// Monic polynomial of the given degree whose lower coefficients are the
// base-p digits of `code`.
inline Poly monic_from_code(long long code, int degree, int p) {
  Poly poly(degree + 1, 0);
  for (int i = 0; i < degree; ++i) {
    poly[i] = static_cast<int>(code % p);
    code /= p;
  }
  poly[degree] = 1;
  return poly;
}

inline long long ipow(long long base, int exp) {
  long long r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

}  // namespace detail

/// True when the monic polynomial `poly` has no monic factor of degree
/// 1..deg/2. Exhaustive trial division; intended for the small degrees used
/// to realize MUB dimensions.
inline bool is_irreducible(const std::vector<int>& poly, int p) {
  const int deg = static_cast<int>(poly.size()) - 1;
  if (deg < 1) return false;
  for (int fd = 1; 2 * fd <= deg; ++fd) {
    const long long count = detail::ipow(p, fd);
    for (long long code = 0; code < count; ++code) {
      if (detail::poly_rem(poly, detail::monic_from_code(code, fd, p), p).empty()) return false;
    }
  }
  return true;
}

inline IrreduciblePoly find_irreducible(int p, int k) {
  require(is_prime(p), ErrorCode::InvalidArgument, std::to_string(p) + " is not prime");
  require(k >= 1, ErrorCode::InvalidArgument, "degree must be positive");
  const long long count = detail::ipow(p, k);
  for (long long code = 0; code < count; ++code) {
    auto poly = detail::monic_from_code(code, k, p);
    if (is_irreducible(poly, p)) return {p, std::move(poly)};
  }
  // Irreducible polynomials exist in every degree.
  throw Error(ErrorCode::InvalidArgument, "no irreducible polynomial found");
}

struct GfElement {
  int p = 2;
  std::vector<int> coeffs;

  friend bool operator==(const GfElement&, const GfElement&) = default;
};

class GaloisField {
 public:
  explicit GaloisField(PrimePowerDim dim) : dim_(dim), modulus_(find_irreducible(dim.p, dim.k)) {}
  explicit GaloisField(int q) : GaloisField(factor_prime_power(q)) {}

  const PrimePowerDim& dim() const { return dim_; }
  int characteristic() const { return dim_.p; }
  int degree() const { return dim_.k; }
  int order() const { return dim_.q; }
  const IrreduciblePoly& modulus() const { return modulus_; }

  GfElement zero() const { return {dim_.p, std::vector<int>(dim_.k, 0)}; }

  GfElement one() const {
    auto e = zero();
    e.coeffs[0] = 1;
    return e;
  }

  /// Element with the given index (base-p digits, lowest degree first).
  GfElement element(int index) const {
    require(index >= 0 && index < dim_.q, ErrorCode::InvalidArgument,
            "element index out of range: " + std::to_string(index));
    auto e = zero();
    for (int i = 0; i < dim_.k; ++i) {
      e.coeffs[i] = index % dim_.p;
      index /= dim_.p;
    }
    return e;
  }

  int index_of(const GfElement& a) const {
    check(a);
    int idx = 0;
    for (int i = dim_.k - 1; i >= 0; --i) idx = idx * dim_.p + a.coeffs[i];
    return idx;
  }

  std::vector<GfElement> elements() const {
    std::vector<GfElement> all;
    all.reserve(dim_.q);
    for (int i = 0; i < dim_.q; ++i) all.push_back(element(i));
    return all;
  }

  GfElement add(const GfElement& a, const GfElement& b) const {
    check(a);
    check(b);
    GfElement r = a;
    for (int i = 0; i < dim_.k; ++i) r.coeffs[i] = (a.coeffs[i] + b.coeffs[i]) % dim_.p;
    return r;
  }

  GfElement neg(const GfElement& a) const {
    check(a);
    GfElement r = a;
    for (auto& c : r.coeffs) c = (dim_.p - c) % dim_.p;
    return r;
  }

  GfElement sub(const GfElement& a, const GfElement& b) const { return add(a, neg(b)); }

  GfElement mul(const GfElement& a, const GfElement& b) const {
    check(a);
    check(b);
    detail::Poly prod(2 * dim_.k - 1, 0);
    for (int i = 0; i < dim_.k; ++i)
      for (int j = 0; j < dim_.k; ++j)
        prod[i + j] = (prod[i + j] + a.coeffs[i] * b.coeffs[j]) % dim_.p;
    auto rem = detail::poly_rem(std::move(prod), modulus_.coeffs, dim_.p);
    GfElement r = zero();
    for (std::size_t i = 0; i < rem.size(); ++i) r.coeffs[i] = rem[i];
    return r;
  }

  GfElement pow(GfElement base, long long exp) const {
    GfElement result = one();
    while (exp > 0) {
      if (exp & 1) result = mul(result, base);
      base = mul(base, base);
      exp >>= 1;
    }
    return result;
  }

  GfElement inverse(const GfElement& a) const {
    require(a != zero(), ErrorCode::InvalidArgument, "zero has no multiplicative inverse");
    return pow(a, dim_.q - 2);
  }

  /// Absolute trace a + a^p + ... + a^{p^{k-1}}, returned as an integer in [0, p).
  int trace(const GfElement& a) const {
    check(a);
    GfElement sum = zero();
    GfElement frob = a;
    for (int i = 0; i < dim_.k; ++i) {
      sum = add(sum, frob);
      frob = pow(frob, dim_.p);
    }
    // The trace lies in the prime subfield.
    for (int i = 1; i < dim_.k; ++i)
      if (sum.coeffs[i] != 0) throw Error(ErrorCode::InvalidArgument, "trace left the prime subfield");
    return sum.coeffs[0];
  }

 private:
  void check(const GfElement& a) const {
    require(a.p == dim_.p && static_cast<int>(a.coeffs.size()) == dim_.k, ErrorCode::FieldMismatch,
            "element does not belong to GF(" + std::to_string(dim_.q) + ")");
  }

  PrimePowerDim dim_;
  IrreduciblePoly modulus_;
};

}  // namespace pauli_mix
