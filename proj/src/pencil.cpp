#include "pencil/pencil.hpp"

#include <numeric>

namespace pencil::forms {

namespace {

bool proportional(const MPoly& f, const MPoly& g) {
  if (f.terms.size() != g.terms.size()) return false;
  const Field& K = *f.field;
  const Elem ratio = K.div(g.terms.begin()->second, f.terms.begin()->second);
  for (auto it = f.terms.begin(), jt = g.terms.begin(); it != f.terms.end(); ++it, ++jt) {
    if (it->first != jt->first || K.mul(it->second, ratio) != jt->second) return false;
  }
  return true;
}

MPoly combine(const MPoly& f, const MPoly& g, Elem x, Elem y) { return mp_add(mp_scale(f, x), mp_scale(g, y)); }

// Columns e_j (j != lead) then v; v is normalized so v[lead] = 1.
Matrix4 position_matrix(std::span<const Elem> v) {
  int lead = 0;
  while (v[lead] == 0) ++lead;
  Matrix4 M{};
  int col = 0;
  for (int j = 0; j < 4; ++j) {
    if (j == lead) continue;
    M[j][col++] = 1;
  }
  for (int i = 0; i < 4; ++i) M[i][3] = v[i];
  return M;
}

std::optional<Position> try_field(const MPoly& f, const MPoly& g, const FieldPtr& E, std::uint64_t point_cap) {
  EmbeddedForm fe(f, E), ge(g, E);
  std::optional<std::array<Elem, 4>> found;
  auto test = [&](std::span<const Elem> v) {
    if (fe(v) == 0 && ge(v) == 0) return false;
    found = std::array<Elem, 4>{v[0], v[1], v[2], v[3]};
    return true;
  };
  // coordinate points first, preferring x3 so that M is the identity
  for (int i = 3; i >= 0 && !found; --i) {
    std::array<Elem, 4> e{};
    e[i] = 1;
    test(e);
  }
  if (!found) {
    std::uint64_t tried = 0;
    for_each_projective_point(4, *E, [&](std::span<const Elem> v) { return test(v) || ++tried > point_cap; });
  }
  if (!found) return std::nullopt;

  Position pos;
  pos.field = E;
  pos.rational = *E == *f.field;
  const Elem fv = fe(*found), gv = ge(*found);
  if (fv == 0) pos.a = {1, 1};        // (f + g, g)
  else if (gv == 0) pos.b = {1, 1};   // (f, f + g)
  pos.M = position_matrix(*found);
  MPoly fE = mp_embed(f, E), gE = mp_embed(g, E);
  pos.fp = linear_change(combine(fE, gE, pos.a[0], pos.a[1]), pos.M);
  pos.gp = linear_change(combine(fE, gE, pos.b[0], pos.b[1]), pos.M);
  pos.resultant = sylvester_resultant(pos.fp, pos.gp, 3);
  return pos;
}

}  // namespace

Pencil pencil_validate(const MPoly& f, const MPoly& g, bool allow_char_clash) {
  if (!f.field || !g.field) throw Error(ErrorCode::InvalidInput, "form without a field");
  if (!(*f.field == *g.field)) throw Error(ErrorCode::FieldMismatch, "f and g are over different fields");
  if (f.nvars != 4 || g.nvars != 4) throw Error(ErrorCode::InvalidInput, "pencil forms must have 4 variables");
  if (f.is_zero() || g.is_zero()) throw Error(ErrorCode::ZeroPolynomial, "pencil member is zero");
  if (!f.is_homogeneous() || !g.is_homogeneous()) throw Error(ErrorCode::InvalidInput, "forms must be homogeneous");
  const int d = f.degree();
  if (g.degree() != d) throw Error(ErrorCode::InvalidInput, "f and g have different degrees");
  const std::uint64_t p = f.field->characteristic();
  if (!allow_char_clash && std::gcd(static_cast<std::uint64_t>(d), p) != 1)
    throw Error(ErrorCode::DegreeCharClash, "degree " + std::to_string(d) + " is divisible by the characteristic");
  if (proportional(f, g)) throw Error(ErrorCode::Proportional, "f and g are proportional");

  Pencil P{f, g, d, {}};
  const FieldPtr& K = f.field;
  for (int m = 1; m <= 3; ++m) {
    FieldPtr E;
    try {
      E = m == 1 ? K : gf::make_field(p, K->degree() * m);
    } catch (const Error&) {
      break;
    }
    auto pos = try_field(f, g, E, 2000000);
    if (!pos) continue;
    if (pos->resultant.is_zero()) throw Error(ErrorCode::CommonFactor, "f and g share a common factor");
    P.pos = std::move(*pos);
    return P;
  }
  throw Error(ErrorCode::NoGoodPosition, "no point off f = g = 0 over extensions of degree <= 3");
}

GenericVerdict is_smooth_generic_fiber(const Pencil& P, int trials, int m, std::uint64_t seed, const SmoothOptions& opt) {
  const FieldPtr& K = P.field();
  while (m > 1) {
    std::uint64_t size = 1;
    bool fits = true;
    for (int i = 0; i < m && fits; ++i) {
      if (size > opt.field_cap / K->size()) fits = false;
      size *= K->size();
    }
    if (fits) break;
    --m;
  }
  FieldPtr E = gf::make_field(K->characteristic(), K->degree() * m, opt.field_cap);
  MPoly fE = mp_embed(P.f, E), gE = mp_embed(P.g, E);
  gf::Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    const Elem lambda = rng() % E->size();
    MPoly member = mp_add(fE, mp_scale(gE, lambda));
    if (member.is_zero()) continue;
    auto v = is_smooth_finite(member, opt);
    if (auto* s = std::get_if<Smooth>(&v)) return GenericSmooth{E, lambda, *s};
  }
  return ProbablySingular{trials};
}

}  // namespace pencil::forms
