#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "pencil/pencil.hpp"
#include "test_util.hpp"

using namespace pencil;
using namespace pencil::forms;
using testutil::form;
using testutil::monomials;
using testutil::random_form;
using testutil::random_point;

namespace {

const Exps X3{3, 0, 0, 0}, Y3{0, 3, 0, 0}, Z3{0, 0, 3, 0}, W3{0, 0, 0, 3};

MPoly fermat(const FieldPtr& K) { return form(K, {{X3, 1}, {Y3, 1}, {Z3, 1}, {W3, 1}}); }

Matrix4 random_invertible(const Field& K, std::mt19937_64& rng) {
  for (;;) {
    Matrix4 M{};
    for (auto& row : M)
      for (auto& x : row) x = rng() % K.size();
    try {
      mat_inverse(K, M);
      return M;
    } catch (const Error&) {
    }
  }
}

// Oracle for the projected curve: P lies on Res_{x3}(f, g) iff f(P, z) and
// g(P, z) have a common root, i.e. a nonconstant gcd as univariate polynomials.
bool fibers_meet(const MPoly& f, const MPoly& g, std::span<const Elem> P, const FieldPtr& K) {
  auto restrict = [&](const MPoly& h) {
    gf::Poly u(h.degree() + 1, 0);
    for (const auto& [e, c] : h.terms) {
      Elem t = c;
      for (int i = 0; i < 3; ++i) t = K->mul(t, K->pow(P[i], e[i]));
      u[e[3]] = K->add(u[e[3]], t);
    }
    gf::trim(u);
    return u;
  };
  return gf::deg(gf::pgcd(*K, restrict(f), restrict(g))) > 0;
}

bool is_singular_point(const MPoly& F, const SingularAt& s) {
  if (eval_form(F, s.point, s.field) != 0) return false;
  for (const auto& d : partials(F))
    if (eval_form(d, s.point, s.field) != 0) return false;
  return true;
}

}  // namespace

TEST_CASE("eval_form examples") {
  auto F3 = gf::make_field(3, 1);
  std::array<Elem, 4> ones{1, 1, 1, 1}, zero{};
  CHECK(eval_form(fermat(F3), ones, F3) == 1);
  CHECK(eval_form(fermat(F3), zero, F3) == 0);

  auto F7 = gf::make_field(7, 1);
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    auto F = random_form(F7, 3, rng);
    auto P = random_point(*F7, 4, rng);
    std::vector<Elem> P2(4);
    for (int i = 0; i < 4; ++i) P2[i] = F7->mul(2, P[i]);
    CHECK(eval_form(F, P2, F7) == F7->mul(F7->pow(2, 3), eval_form(F, P, F7)));
  }
  auto F9 = gf::make_field(3, 2);
  CHECK_THROWS_AS(eval_form(fermat(F9), ones, F3), Error);
}

TEST_CASE("eval_form in an extension matches the embedded form") {
  auto K = gf::make_field(2, 1), E = gf::make_field(2, 6);
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    auto F = random_form(K, 3, rng);
    auto P = random_point(*E, 4, rng);
    CHECK(eval_form(F, P, E) == eval_form(mp_embed(F, E), P, E));
  }
}

TEST_CASE("partials") {
  auto F2 = gf::make_field(2, 1);
  auto d = partials(form(F2, {{X3, 1}}));
  CHECK(d[0] == form(F2, {{Exps{2, 0, 0, 0}, 1}}));
  for (int i = 1; i < 4; ++i) CHECK(d[i].is_zero());

  auto F5 = gf::make_field(5, 1);
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    auto F = random_form(F5, 3, rng);
    auto ps = partials(F);
    MPoly euler{F5, 4, {}};
    for (int i = 0; i < 4; ++i) euler = mp_add(euler, mp_mul(mp_variable(F5, 4, i), ps[i]));
    CHECK(euler == mp_scale(F, 3));
  }
}

TEST_CASE("resultants") {
  auto F5 = gf::make_field(5, 1);
  // variables x, y, z, w; eliminate z
  auto a = form(F5, {{Exps{0, 0, 1, 0}, 1}, {Exps{0, 1, 0, 0}, 4}});
  auto b = form(F5, {{Exps{0, 0, 2, 0}, 1}, {Exps{1, 0, 0, 1}, 4}});
  auto r = resultant_formal(a, b, 2);
  CHECK(r.nvars == 3);
  CHECK(r == form(F5, {{Exps{0, 2, 0, 0}, 1}, {Exps{1, 0, 1, 0}, 4}}, 3));

  std::mt19937_64 rng(4);
  auto f = random_form(F5, 3, rng);
  f.add_term(W3, 1);
  if (f.coeff(W3) == 0) f.add_term(W3, 1);
  CHECK(sylvester_resultant(f, mp_scale(f, 2), 3).is_zero());

  auto nolead = form(F5, {{X3, 1}, {Exps{0, 0, 2, 1}, 1}});
  CHECK_THROWS_AS(sylvester_resultant(nolead, f, 3), Error);
}

TEST_CASE("resultant vanishes exactly on the projection of f = g = 0") {
  for (std::uint64_t p : {2, 3}) {
    auto K = gf::make_field(p, 1);
    std::mt19937_64 rng(5 + p);
    for (int t = 0; t < 20; ++t) {
      auto f = random_form(K, 3, rng), g = random_form(K, 3, rng);
      if (f.coeff(W3) == 0) f.add_term(W3, 1);
      if (g.coeff(W3) == 0) g.add_term(W3, 1);
      auto R = sylvester_resultant(f, g, 3);
      CHECK((R.is_zero() || (R.is_homogeneous() && R.degree() == 9)));
      for_each_projective_point(3, *K, [&](std::span<const Elem> P) {
        CHECK((eval_form(R, P, K) == 0) == fibers_meet(f, g, P, K));
        return false;
      });
    }
  }
}

TEST_CASE("two generic cubics over F_2 give a nonzero degree 9 projection") {
  auto K = gf::make_field(2, 1), E = gf::make_field(2, 8);
  auto f = fermat(K);
  auto g = form(K, {{Exps{2, 1, 0, 0}, 1}, {Exps{0, 2, 1, 0}, 1}, {Exps{0, 0, 2, 1}, 1}, {Exps{1, 0, 0, 2}, 1}});
  g.add_term(W3, 1);
  auto R = sylvester_resultant(f, g, 3);
  REQUIRE(!R.is_zero());
  CHECK(R.degree() == 9);
  std::mt19937_64 rng(6);
  auto fE = mp_embed(f, E), gE = mp_embed(g, E);
  for (int t = 0; t < 200; ++t) {
    auto P = random_point(*E, 3, rng);
    CHECK((eval_form(R, P, E) == 0) == fibers_meet(fE, gE, P, E));
  }
}

TEST_CASE("linear_change") {
  auto K = gf::make_field(7, 1);
  std::mt19937_64 rng(7);
  auto F = random_form(K, 3, rng);
  CHECK(linear_change(F, identity4()) == F);

  Matrix4 swap{};
  swap[0][1] = swap[1][0] = swap[2][2] = swap[3][3] = 1;
  CHECK(linear_change(form(K, {{X3, 1}}), swap) == form(K, {{Y3, 1}}));
  CHECK_THROWS_AS(linear_change(F, Matrix4{}), Error);

  for (int t = 0; t < 20; ++t) {
    auto M = random_invertible(*K, rng), N = random_invertible(*K, rng);
    auto G = linear_change(F, M);
    CHECK(G.degree() == 3);
    CHECK(linear_change(G, mat_inverse(*K, M)) == F);
    CHECK(linear_change(G, N) == linear_change(F, mat_mul(*K, M, N)));
    auto P = random_point(*K, 4, rng);
    CHECK(eval_form(G, P, K) == eval_form(F, mat_apply(*K, M, P), K));
  }
}

TEST_CASE("pencil_validate examples") {
  auto F2 = gf::make_field(2, 1);
  auto g = form(F2, {{Exps{2, 1, 0, 0}, 1}, {Exps{0, 2, 1, 0}, 1}, {Exps{0, 0, 2, 1}, 1}, {Exps{1, 0, 0, 2}, 1}});
  auto P = pencil_validate(fermat(F2), g);
  CHECK(P.pos.rational);
  CHECK(!P.pos.resultant.is_zero());
  // the resultant is nonzero at some point found by search
  auto E = gf::make_field(2, 4);
  bool nonzero = for_each_projective_point(3, *E, [&](std::span<const Elem> v) { return eval_form(P.pos.resultant, v, E) != 0; });
  CHECK(nonzero);

  auto F7 = gf::make_field(7, 1);
  CHECK_THROWS_WITH_AS(pencil_validate(fermat(F7), mp_scale(fermat(F7), 2)), doctest::Contains("proportional"), Error);

  auto x = mp_variable(F2, 4, 0);
  std::mt19937_64 rng(8);
  auto q1 = random_form(F2, 2, rng), q2 = random_form(F2, 2, rng);
  try {
    pencil_validate(mp_mul(x, q1), mp_mul(x, q2));
    CHECK(false);
  } catch (const Error& e) {
    CHECK((e.code() == ErrorCode::CommonFactor || e.code() == ErrorCode::Proportional));
  }

  auto F3 = gf::make_field(3, 1);
  try {
    pencil_validate(fermat(F3), random_form(F3, 3, rng));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegreeCharClash);
  }
  CHECK_THROWS_AS(pencil_validate(fermat(F2), MPoly{F2, 4, {}}), Error);
}

TEST_CASE("common factor detection agrees with planted construction") {
  for (std::uint64_t p : {2, 5}) {
    auto K = gf::make_field(p, 1);
    std::mt19937_64 rng(9 + p);
    int planted = 0, clean = 0;
    for (int t = 0; t < 100; ++t) {
      auto l = random_form(K, 1, rng);
      auto f = mp_mul(l, random_form(K, 2, rng)), g = mp_mul(l, random_form(K, 2, rng));
      try {
        pencil_validate(f, g);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::CommonFactor || e.code() == ErrorCode::Proportional) ++planted;
      }
      auto a = random_form(K, 3, rng), b = random_form(K, 3, rng);
      try {
        auto P = pencil_validate(a, b);
        if (!P.pos.resultant.is_zero()) ++clean;
      } catch (const Error&) {
      }
    }
    CHECK(planted == 100);
    CHECK(clean >= 99);
  }
}

TEST_CASE("is_smooth_finite examples") {
  auto F2 = gf::make_field(2, 1);
  auto v = is_smooth_finite(fermat(F2));
  REQUIRE(std::holds_alternative<Smooth>(v));

  auto cone = form(F2, {{X3, 1}, {Y3, 1}, {Z3, 1}});
  auto s = is_smooth_finite(cone);
  REQUIRE(std::holds_alternative<SingularAt>(s));
  CHECK(std::get<SingularAt>(s).point == std::array<Elem, 4>{0, 0, 0, 1});

  auto F3 = gf::make_field(3, 1);
  auto t = is_smooth_finite(fermat(F3));
  REQUIRE(std::holds_alternative<SingularAt>(t));
  CHECK(is_singular_point(fermat(F3), std::get<SingularAt>(t)));
}

TEST_CASE("singular points of degree > 1 are found") {
  // Two conjugate nodes: f = x^2 + xy + y^2 vanishes only at a point pair over F_4.
  auto F2 = gf::make_field(2, 1);
  std::mt19937_64 rng(10);
  int checked = 0;
  for (int t = 0; t < 40; ++t) {
    auto F = random_form(F2, 3, rng);
    auto v = is_smooth_finite(F);
    auto b = brute_singular_point(F, 4, 400000);
    if (std::holds_alternative<Undetermined>(v)) continue;
    ++checked;
    if (auto* s = std::get_if<SingularAt>(&v)) {
      CHECK(is_singular_point(F, *s));
      CHECK(b.has_value());
    } else {
      CHECK(!b.has_value());
    }
  }
  CHECK(checked == 40);
}

TEST_CASE("smoothness census: cubics over F_2 with at most 5 monomials") {
  auto K = gf::make_field(2, 1);
  auto mons = monomials(3);
  const int M = static_cast<int>(mons.size());
  // canonical representative under permutations of the variables
  std::vector<std::array<int, 4>> perms;
  std::array<int, 4> pi{0, 1, 2, 3};
  do perms.push_back(pi);
  while (std::next_permutation(pi.begin(), pi.end()));
  auto index_of = [&](const Exps& e) { return int(std::find(mons.begin(), mons.end(), e) - mons.begin()); };
  std::vector<std::vector<int>> image(perms.size(), std::vector<int>(M));
  for (size_t k = 0; k < perms.size(); ++k)
    for (int i = 0; i < M; ++i) {
      Exps e{};
      for (int v = 0; v < 4; ++v) e[perms[k][v]] = mons[i][v];
      image[k][i] = index_of(e);
    }

  std::set<std::vector<int>> seen;
  int agree = 0, total = 0, smooth = 0;
  std::vector<int> sel;
  auto visit = [&](auto& self, int start) -> void {
    if (!sel.empty()) {
      std::vector<int> canon = sel;
      for (const auto& img : image) {
        std::vector<int> s;
        for (int i : sel) s.push_back(img[i]);
        std::sort(s.begin(), s.end());
        canon = std::min(canon, s);
      }
      if (seen.insert(canon).second) {
        MPoly F{K, 4, {}};
        for (int i : canon) F.add_term(mons[i], 1);
        auto v = is_smooth_finite(F);
        auto b = brute_singular_point(F, 6, 300000);
        ++total;
        bool ok = false;
        if (auto* s = std::get_if<SingularAt>(&v)) ok = b.has_value() && is_singular_point(F, *s);
        else if (std::holds_alternative<Smooth>(v)) ok = !b.has_value(), ++smooth;
        agree += ok;
      }
    }
    if (sel.size() == 5) return;
    for (int i = start; i < M; ++i) {
      sel.push_back(i);
      self(self, i + 1);
      sel.pop_back();
    }
  };
  visit(visit, 0);
  MESSAGE("census classes: " << total << ", smooth: " << smooth);
  CHECK(agree == total);
}

TEST_CASE("generic fiber smoothness") {
  auto F2 = gf::make_field(2, 1);
  auto f = fermat(F2);
  auto g = form(F2, {{Exps{2, 1, 0, 0}, 1}, {Exps{0, 1, 1, 1}, 1}});
  auto P = pencil_validate(f, g);
  auto v = is_smooth_generic_fiber(P, 32, 4, 1);
  REQUIRE(std::holds_alternative<GenericSmooth>(v));
  auto& w = std::get<GenericSmooth>(v);
  auto member = mp_add(mp_embed(f, w.field), mp_scale(mp_embed(g, w.field), w.lambda));
  CHECK(std::holds_alternative<Smooth>(is_smooth_finite(member)));

  // common singular point at (0:0:0:1): no monomial of degree >= 2 in w
  auto F5 = gf::make_field(5, 1);
  auto a = form(F5, {{X3, 1}, {Y3, 1}, {Exps{0, 0, 2, 1}, 1}, {Exps{1, 1, 0, 1}, 2}});
  auto b = form(F5, {{Z3, 1}, {Exps{2, 0, 0, 1}, 1}, {Exps{0, 1, 1, 1}, 3}, {Exps{1, 2, 0, 0}, 1}});
  auto Q = pencil_validate(a, b);
  auto u = is_smooth_generic_fiber(Q, 8, 2, 1);
  CHECK(std::holds_alternative<ProbablySingular>(u));
}
