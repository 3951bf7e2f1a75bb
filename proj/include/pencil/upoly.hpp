#pragma once

// Dense univariate polynomials over a Field. Coefficients are stored constant
// term first and kept trimmed, so the zero polynomial is the empty vector.

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "pencil/gf.hpp"

namespace pencil::gf {

using Poly = std::vector<Elem>;
using Rng = std::mt19937_64;

void trim(Poly& f);
inline int deg(const Poly& f) { return static_cast<int>(f.size()) - 1; }

Poly padd(const Field& F, const Poly& a, const Poly& b);
Poly psub(const Field& F, const Poly& a, const Poly& b);
Poly pmul(const Field& F, const Poly& a, const Poly& b);
Poly pscale(const Field& F, const Poly& a, Elem c);
/// a = q*b + r with deg r < deg b. Throws ZeroPolynomial when b = 0.
void pdivmod(const Field& F, const Poly& a, const Poly& b, Poly& q, Poly& r);
Poly pdiv(const Field& F, const Poly& a, const Poly& b);
Poly pmod(const Field& F, const Poly& a, const Poly& b);
Poly monic(const Field& F, const Poly& a);
/// Monic gcd; gcd(0, 0) = 0.
Poly pgcd(const Field& F, Poly a, Poly b);
Poly pderiv(const Field& F, const Poly& a);
Elem peval(const Field& F, const Poly& a, Elem x);
Poly pmulmod(const Field& F, const Poly& a, const Poly& b, const Poly& m);
Poly ppowmod(const Field& F, Poly base, std::uint64_t e, const Poly& m);
/// x^(Q^k) mod m by k applications of the Q-power map, Q = |F|.
Poly x_frobenius_mod(const Field& F, int k, const Poly& m);

/// Distinct roots in F, sorted by code. f must be nonzero.
std::vector<Elem> distinct_roots(const Field& F, const Poly& f, Rng& rng);
/// Roots with multiplicity, sorted by code.
std::vector<Elem> roots(const Field& F, const Poly& f, Rng& rng);
/// Monic irreducible factors with multiplicities, sorted by (degree, coefficients).
std::vector<std::pair<Poly, int>> factor(const Field& F, const Poly& f, Rng& rng);
bool is_irreducible(const Field& F, const Poly& f);

/// Univariate polynomial bound to its field.
struct UniPoly {
  FieldPtr field;
  Poly coeffs;

  int degree() const { return deg(coeffs); }
  bool is_zero() const { return coeffs.empty(); }
  bool operator==(const UniPoly& o) const { return *field == *o.field && coeffs == o.coeffs; }
};

/// All roots of f in K (coefficients embedded into K), with multiplicity.
std::vector<FieldElem> poly_roots(const UniPoly& f, const FieldPtr& K, std::uint64_t seed = 0);
std::vector<std::pair<UniPoly, int>> poly_factor(const UniPoly& f, std::uint64_t seed = 0);

}  // namespace pencil::gf
