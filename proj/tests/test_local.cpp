#include <random>

#include "doctest.h"
#include "pencil/fixtures.hpp"
#include "pencil/gamma.hpp"
#include "pencil/local.hpp"
#include "test_util.hpp"

using namespace pencil;
using namespace pencil::local;
using forms::Exps;

namespace {

forms::Pencil random_pencil(const FieldPtr& K, std::mt19937_64& rng) {
  for (;;) {
    try {
      // cubics in characteristic 3 are only fit for the local layer
      return forms::pencil_validate(fixtures::random_form(K, 3, rng), fixtures::random_form(K, 3, rng), true);
    } catch (const Error&) {
    }
  }
}

// x0 + a x1 + a^2 x2 over F_{q^3}; its norm only vanishes at x0 = x1 = x2 = 0
MPoly anisotropic_norm(const FieldPtr& K) {
  auto L = gf::make_field(K->characteristic(), 3 * K->degree());
  const Elem a = L->root();
  auto l = testutil::form(L, {{Exps{1, 0, 0, 0}, 1}, {Exps{0, 1, 0, 0}, a}, {Exps{0, 0, 1, 0}, L->mul(a, a)}});
  return fixtures::norm_form(l, K);
}

// A pencil whose fibre at t = 0 is the cone over the norm curve with vertex e3,
// and g(e3) != 0.
forms::Pencil insoluble_at_zero(const FieldPtr& K, std::mt19937_64& rng) {
  MPoly f = anisotropic_norm(K);
  for (;;) {
    MPoly g = fixtures::random_form(K, 3, rng);
    if (forms::eval_form(g, std::vector<Elem>{0, 0, 0, 1}, K) == 0) continue;
    try {
      return forms::pencil_validate(f, g, true);
    } catch (const Error&) {
    }
  }
}

}  // namespace

TEST_CASE("places and reductions") {
  auto K = gf::make_field(3, 1);
  std::mt19937_64 rng(1);
  auto P = random_pencil(K, rng);

  CHECK(places_of_degree(K, 1).size() == 3);
  CHECK(places_of_degree(K, 2).size() == 3);  // (9 - 3) / 2
  CHECK(places_of_degree(gf::make_field(2, 1), 3).size() == 2);
  CHECK(place_name(finite_place(*K, {1, 0, 1})) == "t^2+1");
  CHECK(place_name(infinite_place()) == "inf");
  CHECK_THROWS_AS(finite_place(*K, {2, 0, 1}), Error);  // t^2 + 2 = (t-1)(t+1)

  CHECK(reduction_at(P, finite_place(*K, {0, 1})) == P.f);
  CHECK(reduction_at(P, infinite_place()) == P.g);
  // t + 1 = t - 2
  CHECK(reduction_at(P, finite_place(*K, {1, 1})) == forms::mp_add(P.f, forms::mp_scale(P.g, 2)));

  auto v = finite_place(*K, {1, 0, 1});
  auto E = residue_field(K, v);
  CHECK(E->size() == 9);
  const Elem tau = residue_tau(K, v);
  CHECK(E->add(E->mul(tau, tau), 1) == 0);
}

TEST_CASE("valuations") {
  auto K = gf::make_field(2, 1);
  Poly pi{1, 1, 1};
  Poly a = gf::pmul(*K, gf::pmul(*K, pi, pi), Poly{1, 1});
  CHECK(valuation(*K, a, pi) == 2);
  CHECK(valuation(*K, Poly{1}, pi) == 0);
  CHECK(valuation(*K, Poly{}, pi) == kInfiniteValuation);
}

TEST_CASE("bad places match planted singular fibres") {
  std::mt19937_64 rng(7);
  auto K = gf::make_field(2, 1);
  auto E = gf::make_field(2, 2);
  auto emb = gf::embedding(K, E);
  const Elem tau = E->root();  // tau^2 + tau + 1 = 0
  for (int trial = 0; trial < 4; ++trial) {
    // h singular at e0 over F_4: no x0^3 or x0^2 x_i terms
    MPoly h{E, 4, {}};
    for (const auto& e : testutil::monomials(3))
      if (e[0] < 2) h.add_term(e, rng() % 4);
    // split h = f + tau g with f, g over F_2
    MPoly f{K, 4, {}}, g{K, 4, {}};
    for (const auto& [e, c] : h.terms)
      for (Elem x = 0; x < 2; ++x)
        for (Elem y = 0; y < 2; ++y)
          if (E->add(emb->apply(x), E->mul(tau, emb->apply(y))) == c) {
            f.add_term(e, x);
            g.add_term(e, y);
          }
    forms::Pencil P;
    try {
      P = forms::pencil_validate(f, g);
    } catch (const Error&) {
      continue;
    }
    REQUIRE(forms::brute_singular_point(h, 1, 1 << 20));
    auto bad = bad_places(P, 2);
    const Place v = finite_place(*K, {1, 1, 1});
    CHECK(std::find(bad.places.begin(), bad.places.end(), v) != bad.places.end());
    auto verdict = locally_soluble(P, v);
    CHECK(verdict.bad_reduction);
    // e0 reduces to a singular point of the fibre, so F(e0) = 0 mod pi
    CHECK(verdict.status != LocalStatus::InsolubleAtPrecision);
  }
}

TEST_CASE("good reduction gives a residue point") {
  std::mt19937_64 rng(3);
  for (std::uint64_t q : {2, 3}) {
    auto K = gf::make_field(q, 1);
    auto P = random_pencil(K, rng);
    auto bad = bad_places(P, 1);
    for (const auto& v : places_of_degree(K, 1)) {
      if (std::find(bad.places.begin(), bad.places.end(), v) != bad.places.end()) continue;
      auto verdict = locally_soluble(P, v);
      CHECK(!verdict.bad_reduction);
      CHECK(verdict.status == LocalStatus::GoodReductionAuto);
      REQUIRE(verdict.residue_point);
      auto& x = *verdict.residue_point;
      CHECK(forms::eval_form(reduction_at(P, v), x, residue_field(K, v)) == 0);
    }
  }
}

TEST_CASE("anisotropic cone fibre is insoluble at t") {
  std::mt19937_64 rng(11);
  for (std::uint64_t q : {2, 3}) {
    auto K = gf::make_field(q, 1);
    auto P = insoluble_at_zero(K, rng);
    const Place zero = finite_place(*K, {0, 1});
    auto verdict = locally_soluble(P, zero);
    CHECK(verdict.bad_reduction);
    REQUIRE(verdict.residue_point);
    CHECK(*verdict.residue_point == Point4{0, 0, 0, 1});
    CHECK(verdict.status == LocalStatus::InsolubleAtPrecision);
    CHECK(verdict.precision == 2);

    auto report = everywhere_locally(P, 1);
    CHECK(report.overall == Overall::LocalObstructionAt);
    REQUIRE(report.obstruction);
    CHECK(*report.obstruction == zero);
    // no rational point of Gamma either: a rational point of X would be soluble everywhere
    CHECK(gamma::enumerate_gamma(P, 1).empty());
  }
}

TEST_CASE("soluble witnesses carry a Hensel margin") {
  std::mt19937_64 rng(5);
  int checked = 0;
  for (int trial = 0; trial < 30 && checked < 6; ++trial) {
    auto K = gf::make_field(2 + (trial % 2), 1);
    auto P = random_pencil(K, rng);
    for (const auto& v : bad_places(P, 2).places) {
      auto verdict = locally_soluble(P, v);
      if (verdict.status != LocalStatus::Soluble) continue;
      REQUIRE(verdict.witness);
      auto [vf, k] = hensel_valuations(P, v, *verdict.witness);
      CHECK(vf >= verdict.precision);
      CHECK(2 * k < vf);
      if (vf < kInfiniteValuation) {
        auto y = refine(P, v, *verdict.witness);
        REQUIRE(y);
        auto [vy, ky] = hensel_valuations(P, v, *y);
        CHECK(vy > vf);
        CHECK(ky == k);
      }
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("a rational point of Gamma rules out obstructions") {
  std::mt19937_64 rng(9);
  int seen = 0;
  for (int trial = 0; trial < 20 && seen < 3; ++trial) {
    auto K = gf::make_field(2, 1);
    auto P = random_pencil(K, rng);
    if (gamma::enumerate_gamma(P, 1).empty()) continue;
    auto report = everywhere_locally(P, 2);
    CHECK(report.overall != Overall::LocalObstructionAt);
    for (const auto& v : report.verdicts) CHECK(v.status != LocalStatus::InsolubleAtPrecision);
    ++seen;
  }
  CHECK(seen > 0);
}
