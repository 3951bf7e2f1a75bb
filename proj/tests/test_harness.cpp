#include <sstream>

#include "doctest.h"
#include "pencil/harness.hpp"

using namespace pencil;
using namespace pencil::harness;

namespace {

AnalyzeConfig quick() {
  AnalyzeConfig c;
  c.place_degree = 2;
  return c;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("seeds are mixed deterministically") {
  // splitmix64 reference values
  CHECK(mix(0) == 0xE220A8397B1DCDAFull);
  CHECK(mix(1) == 0x910A2DEC89025CC1ull);
  CHECK(row_seed(5, 0) != row_seed(5, 1));
  CHECK(row_seed(5, 3) == mix(mix(5) + 3));
}

TEST_CASE("random_instance is reproducible and guarded") {
  auto a = random_instance(2, 7), b = random_instance(2, 7);
  CHECK(canonical(a) == canonical(b));
  CHECK(a.id() == b.id());
  CHECK(canonical(random_instance(2, 8)) != canonical(a));
  CHECK(a.pencil_status == "valid");
  CHECK(a.generic_fiber == "GenericSmooth");
  CHECK(a.generator == kGeneratorVersion);
  CHECK_THROWS_WITH_AS(random_instance(3, 1), doctest::Contains("Char3"), Error);
  CHECK_THROWS_AS(random_instance(6, 1), Error);
  GenerateOptions g;
  g.allow_char3 = true;
  CHECK(random_instance(3, 1, g).p == 3);
}

TEST_CASE("instances round-trip through JSON") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto inst = random_instance(2, seed);
    auto back = instance_from_json(json::parse(canonical(inst)));
    CHECK(canonical(back) == canonical(inst));
    CHECK_NOTHROW(validate_instance(back));
  }
  // extension coefficients are vectors
  auto inst = random_instance(4, 3);
  auto j = to_json(inst);
  bool vectors = true;
  for (const auto& t : j["f"]) vectors &= t["c"].is_array() && t["c"].size() == 2;
  CHECK(vectors);
  CHECK(canonical(instance_from_json(j)) == canonical(inst));
}

TEST_CASE("hand-written instance JSON") {
  // f = x0 x1 x2 + x3^3 style input with unsorted, negative and duplicate terms
  auto j = json::parse(R"({"p":5,"n":1,
    "f":[{"exp":[0,0,0,3],"c":1},{"exp":[1,1,1,0],"c":-1},{"exp":[0,0,0,3],"c":5}],
    "g":[{"exp":[3,0,0,0],"c":2},{"exp":[0,3,0,0],"c":1},{"exp":[0,0,3,0],"c":7}]})");
  auto inst = instance_from_json(j);
  CHECK(inst.f.coeff(forms::Exps{1, 1, 1, 0}) == 4);
  CHECK(inst.f.coeff(forms::Exps{0, 0, 0, 3}) == 1);
  CHECK(inst.g.coeff(forms::Exps{0, 0, 3, 0}) == 2);
  CHECK(!inst.seed);
  CHECK_THROWS_AS(instance_from_json(json::parse(R"({"p":5,"n":1,"f":[{"exp":[1,2],"c":1}],"g":[]})")), Error);
  CHECK_THROWS_AS(instance_from_json(json::parse(R"({"p":4,"n":1,"f":[],"g":[]})")), Error);
  CHECK_THROWS_AS(instance_from_json(json::parse(R"({"p":2,"n":2,"f":[{"exp":[3,0,0,0],"c":1}],"g":[]})")), Error);
}

TEST_CASE("analyze: rational point of Gamma") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto inst = random_instance(2, seed);
    auto r = analyze(inst, quick());
    if (r.spectrum.size() < 2 || r.spectrum[1] == 0) continue;
    CHECK(r.global_method == "constant");
    CHECK(r.point_verified);
    CHECK(r.point_degree == 0);
    for (const auto* c : {&r.cond_iii, &r.cond_iv, &r.cond_v}) {
      CHECK(c->holds);
      CHECK(c->status == "Certified");
    }
    CHECK(r.flags.empty());
    return;
  }
  FAIL("no instance with a rational point of Gamma");
}

TEST_CASE("analyze: descent from a quadratic point") {
  AnalyzeConfig cfg = quick();
  cfg.local = false;
  int seen = 0;
  for (std::uint64_t seed = 0; seed < 2000 && seen < 2; ++seed) {
    auto inst = random_instance(2, seed);
    auto P = validate_instance(inst);
    auto S = gamma::spectrum(gamma::count_sequence(P, 2));
    if (S.a[1] != 0 || S.a[2] == 0) continue;
    auto r = analyze(inst, cfg);
    CHECK(r.global_method == "descent");
    CHECK(r.global_status == "found");
    CHECK(r.point_verified);
    CHECK(r.cond_v.holds);
    CHECK(r.cond_v.status == "Certified");
    REQUIRE(r.descent_steps.size() == 2);
    CHECK(r.descent_steps[0] == "Start");
    CHECK(r.flags.empty());
    ++seen;
  }
  CHECK(seen == 2);
}

TEST_CASE("report JSON round trip") {
  auto r = analyze(random_instance(2, 11), quick());
  auto text = to_json(r).dump();
  auto back = report_from_json(json::parse(text));
  CHECK(back == r);
  CHECK(to_json(back).dump() == text);
  CHECK_THROWS_AS(report_from_json(json::parse(R"({"id":"x"})")), Error);
}

TEST_CASE("scan output") {
  AnalyzeConfig cfg = quick();
  std::ostringstream empty;
  auto s0 = scan(0, 2, 1, cfg, empty);
  CHECK(s0.count == 0);
  auto l0 = lines(empty.str());
  REQUIRE(l0.size() == 1);
  CHECK(json::parse(l0[0]).contains("summary"));

  std::ostringstream a, b, c;
  auto sa = scan(6, 2, 42, cfg, a);
  scan(6, 2, 42, cfg, b);
  cfg.threads = 3;
  scan(6, 2, 42, cfg, c);
  CHECK(a.str() == b.str());
  CHECK(a.str() == c.str());
  auto rows = lines(a.str());
  REQUIRE(rows.size() == 7);
  for (size_t i = 0; i < 6; ++i) {
    auto j = json::parse(rows[i]);
    CHECK(j["index"] == i);
    CHECK(j["seed"] == row_seed(42, i));
    CHECK(j["id"] == random_instance(2, row_seed(42, i)).id());
  }
  CHECK(sa.count == 6);
  CHECK(sa.flags.count("CONTRADICTION") == 0);
}
