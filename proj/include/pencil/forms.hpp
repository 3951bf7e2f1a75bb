#pragma once

// Sparse multivariate polynomials in up to four variables over a finite field,
// with the operations the pencil analysis needs: evaluation in extensions,
// partial derivatives, linear coordinate changes and Sylvester resultants.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pencil/gf.hpp"
#include "pencil/upoly.hpp"

namespace pencil::forms {

using gf::Elem;
using gf::Field;
using gf::FieldPtr;

using Exps = std::array<std::uint8_t, 4>;

/// Polynomial in nvars variables; terms keyed by exponent tuple in
/// lexicographic order, coefficients nonzero.
struct MPoly {
  FieldPtr field;
  int nvars = 4;
  std::map<Exps, Elem> terms;

  bool is_zero() const { return terms.empty(); }
  /// Maximal total degree, -1 for zero.
  int degree() const;
  bool is_homogeneous() const;
  /// Largest exponent of variable var.
  int degree_in(int var) const;
  bool involves(int var) const { return degree_in(var) > 0; }
  Elem coeff(const Exps& e) const;
  void add_term(const Exps& e, Elem c);

  bool operator==(const MPoly& o) const { return nvars == o.nvars && terms == o.terms && *field == *o.field; }
};

/// Quaternary form (nvars = 4) and ternary form (nvars = 3). Homogeneity is
/// checked where the forms enter the pencil layer.
using QForm = MPoly;
using TernaryForm = MPoly;

MPoly mp_add(const MPoly& a, const MPoly& b);
MPoly mp_sub(const MPoly& a, const MPoly& b);
MPoly mp_mul(const MPoly& a, const MPoly& b);
MPoly mp_scale(const MPoly& a, Elem c);
MPoly mp_constant(const FieldPtr& F, int nvars, Elem c);
MPoly mp_variable(const FieldPtr& F, int nvars, int var);
/// Same polynomial with coefficients mapped into a larger field.
MPoly mp_embed(const MPoly& a, const FieldPtr& K);
/// Inverse of mp_embed; throws FieldMismatch when a coefficient is not in K.
MPoly mp_restrict(const MPoly& a, const FieldPtr& K);
/// Coefficientwise Frobenius relative to the subfield base.
MPoly mp_frobenius(const MPoly& a, const Field& base);

/// Form compiled for repeated evaluation at points of K.
class EmbeddedForm {
 public:
  EmbeddedForm() = default;
  EmbeddedForm(const MPoly& F, const FieldPtr& K);
  Elem operator()(std::span<const Elem> point) const;
  const FieldPtr& field() const { return K_; }

 private:
  FieldPtr K_;
  int nvars_ = 0;
  int maxdeg_ = 0;
  std::vector<std::pair<Exps, Elem>> terms_;
};

/// Value of F at a point with coordinates in K (K must contain the field of F).
Elem eval_form(const MPoly& F, std::span<const Elem> point, const FieldPtr& K);

std::vector<MPoly> partials(const MPoly& F);

using Matrix4 = std::array<std::array<Elem, 4>, 4>;
Matrix4 identity4();
Matrix4 mat_mul(const Field& F, const Matrix4& a, const Matrix4& b);
/// Inverse; throws SingularMatrix.
Matrix4 mat_inverse(const Field& F, const Matrix4& a);
std::array<Elem, 4> mat_apply(const Field& K, const Matrix4& m, std::span<const Elem> v);

/// F o M, i.e. the form x -> F(M x). M is over the field of F.
MPoly linear_change(const MPoly& F, const Matrix4& M);
/// Generalization to n variables with an n x n matrix in row-major order.
MPoly linear_change_n(const MPoly& F, std::span<const Elem> M);

/// Coefficients of F as a polynomial in x_var: result[k] is the coefficient of
/// x_var^k, a polynomial in the remaining variables (renumbered in order).
std::vector<MPoly> coefficients_in(const MPoly& F, int var);

/// Resultant in x_var of a (formal degree degree_in(var), leading coefficient
/// a nonzero constant) and b (formal degree = total degree of b).
MPoly resultant_formal(const MPoly& a, const MPoly& b, int var);

/// Determinant of the Sylvester matrix of f, g in x_var. Both must have degree
/// exactly d in x_var with constant nonzero leading coefficient.
TernaryForm sylvester_resultant(const MPoly& f, const MPoly& g, int var);

// Smoothness over finite fields

struct Smooth {
  int bound = 0;        // extension degrees searched, or 0 when no singular point exists over any extension
  bool exact = false;   // elimination proved there is no singular point at all
};
struct SingularAt {
  FieldPtr field;  // field of definition used for the witness
  std::array<Elem, 4> point;
};
struct Undetermined {
  std::string reason;
};
using SmoothVerdict = std::variant<Smooth, SingularAt, Undetermined>;

struct SmoothOptions {
  int bound = 6;
  std::uint64_t field_cap = gf::kDefaultSizeCap;
  std::uint64_t brute_cap = 300000;  // projective points tried by the brute-force fallback
  int centers = 4;                   // elimination attempts with different projection centers
};

SmoothVerdict is_smooth_finite(const MPoly& F, const SmoothOptions& opt = {});

/// Exhaustive singular-point search over P^3(K_m), m <= bound. Test oracle and
/// fallback; practical only for tiny fields.
std::optional<SingularAt> brute_singular_point(const MPoly& F, int bound, std::uint64_t point_cap);

/// Calls fn on every normalized point of P^{n-1}(K) in enumeration order
/// until fn returns true. Returns whether it stopped early.
template <class Fn>
bool for_each_projective_point(int n, const Field& K, Fn&& fn) {
  std::vector<Elem> pt(n, 0);
  const Elem q = K.size();
  for (int lead = 0; lead < n; ++lead) {
    std::fill(pt.begin(), pt.end(), 0);
    pt[lead] = 1;
    const int free = n - lead - 1;
    // odometer over coordinates lead+1 .. n-1
    for (;;) {
      if (fn(std::span<const Elem>(pt))) return true;
      int i = n - 1;
      while (i > lead && ++pt[i] == q) pt[i--] = 0;
      if (i == lead || free == 0) break;
    }
  }
  return false;
}

/// Common zeros of homogeneous polynomials by successive Sylvester
/// elimination. All elimination happens over the field of the input; roots are
/// then extracted in whichever extension is asked for.
class ZeroSolver {
 public:
  /// seed = 0 takes the first usable projection center in enumeration order;
  /// other seeds draw centers at random. Spurious factors introduced by
  /// elimination depend on the centers, genuine zeros do not.
  ZeroSolver(std::vector<MPoly> polys, int nvars, const FieldPtr& base, std::uint64_t seed = 0);
  ~ZeroSolver();
  ZeroSolver(ZeroSolver&&) noexcept;
  ZeroSolver& operator=(ZeroSolver&&) noexcept;

  /// All common zeros in P^{n-1}(E), normalized and sorted. Throws
  /// Error(InvalidInput) when the zero set is not finite or the elimination
  /// degenerates.
  std::vector<std::vector<Elem>> all_zeros(const FieldPtr& E) const;
  /// True when elimination proves there is no common zero over any extension.
  bool provably_empty() const;
  bool degenerate() const;

 private:
  struct Node;
  std::unique_ptr<Node> root_;
};

}  // namespace pencil::forms
