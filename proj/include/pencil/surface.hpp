#pragma once

// Points of the surface X: f + t g = 0 over L(t), L a finite extension of the
// base field: secant third points, descent through quadratic towers, and
// bounded-degree search.

#include <array>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "pencil/gamma.hpp"

namespace pencil::surface {

using forms::Pencil;
using gf::Elem;
using gf::FieldPtr;
using gf::Poly;

/// Projective point with polynomial coordinates in t over `field`.
struct RatPoint {
  FieldPtr field;
  std::array<Poly, 4> coords;

  int max_degree() const;
  bool operator==(const RatPoint& o) const { return *field == *o.field && coords == o.coords; }
};

/// Primitive (coordinates coprime) and the first coordinate of maximal degree
/// has leading coefficient 1. Throws ZeroPolynomial for the zero tuple.
RatPoint normalize(RatPoint P);

RatPoint constant_point(const FieldPtr& field, std::span<const Elem> coords);

/// f(x) + t g(x) as a polynomial in t over the field of x.
Poly surface_value(const Pencil& P, const RatPoint& x);
bool on_surface(const Pencil& P, const RatPoint& x);

/// Coefficientwise image in a larger field, or back into a subfield.
RatPoint embed(const RatPoint& x, const FieldPtr& K);
std::optional<RatPoint> restrict(const RatPoint& x, const FieldPtr& L);
RatPoint conjugate(const RatPoint& x, const gf::Field& base);

struct LineKT {
  RatPoint A, B;
};

/// Coefficients of F_X(s A + u B) = sum_k c[k] s^{d-k} u^k.
std::vector<Poly> restrict_to_line(const Pencil& P, const LineKT& line);

struct ThirdPoint {
  RatPoint point;
};
struct LinePoint {
  RatPoint point;
};
using SecantResult = std::variant<ThirdPoint, LinePoint>;

/// P is a point of X over L'(t), L' = quadratic extension of L. The result is
/// over L(t). alpha (an element of L' outside L) defaults to the smallest code.
/// Throws PointIsRational, ConjugateEqualsPoint, NotCubic, InvalidInput.
SecantResult secant_third_point(const Pencil& X, const RatPoint& P, const FieldPtr& L,
                                std::optional<Elem> alpha = std::nullopt);

enum class StepKind { Start, SecantThirdPoint, LineInSurface, AlreadyRational };
const char* step_kind_name(StepKind k);

struct DescentStep {
  int field_degree;  // [L : base field], a power of 2
  StepKind kind;
  RatPoint point;
};

struct DescentTrace {
  std::vector<DescentStep> steps;
  const RatPoint& final_point() const { return steps.back().point; }
  int max_degree() const;
};

/// w is a point of Gamma with coordinates in F_{q^{2^a}}.
DescentTrace tower_descent(const Pencil& X, std::span<const Elem> w, int a);

struct Found {
  RatPoint point;
  std::uint64_t rank = 0;  // position in the enumeration order
};
struct NotFoundWithin {
  int degree_bound = 0;
  std::uint64_t budget = 0;
  std::uint64_t tried = 0;
  bool budget_exceeded = false;
};
using SearchResult = std::variant<Found, NotFoundWithin>;

struct SearchOptions {
  std::uint64_t budget = 50'000'000;
  int threads = 1;
};

/// Number of normalized tuples of maximal degree exactly D (primitive or not):
/// (q^{4(D+1)} - q^{4D}) / (q - 1).
long double tuples_of_degree(std::uint64_t q, int D);

/// Exhaustive search over normalized primitive tuples of degree <= N over the
/// base field, in degree-graded order.
SearchResult search_poly_points(const Pencil& X, int N, const SearchOptions& opt = {});

}  // namespace pencil::surface
