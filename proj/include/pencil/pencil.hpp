#pragma once

// The pencil f + t g of quaternary forms, validated and put into a position
// where Gamma = {f = g = 0} projects to a plane curve by a Sylvester resultant.

#include <cstdint>
#include <variant>

#include "pencil/forms.hpp"

namespace pencil::forms {

struct Position {
  // Field over which the position is defined. Equal to the base field unless
  // no base-field point avoids Gamma, in which case only the coprimality
  // check was possible and rational = false.
  FieldPtr field;
  bool rational = true;
  // Original coordinates are M times the new ones; the last new coordinate is
  // the eliminated one.
  Matrix4 M{};
  // Pencil basis used for elimination: fa = a0 f + a1 g, gb = b0 f + b1 g.
  std::array<Elem, 2> a{1, 0}, b{0, 1};
  MPoly fp, gp;            // fa o M, gb o M
  TernaryForm resultant;   // Res_{x3}(fp, gp), degree d^2
};

struct Pencil {
  MPoly f, g;
  int degree = 0;
  Position pos;

  const FieldPtr& field() const { return f.field; }
};

/// Throws Proportional, CommonFactor, DegreeCharClash, NoGoodPosition,
/// ZeroPolynomial, FieldMismatch or InvalidInput. allow_char_clash skips the
/// gcd(d, p) = 1 check; such pencils are only fit for the local layer.
Pencil pencil_validate(const MPoly& f, const MPoly& g, bool allow_char_clash = false);

struct GenericSmooth {
  FieldPtr field;
  Elem lambda = 0;  // f + lambda g is smooth over field
  Smooth verdict;
};
struct ProbablySingular {
  int trials = 0;
};
using GenericVerdict = std::variant<GenericSmooth, ProbablySingular>;

GenericVerdict is_smooth_generic_fiber(const Pencil& P, int trials = 32, int m = 4, std::uint64_t seed = 0,
                                       const SmoothOptions& opt = {});

}  // namespace pencil::forms
