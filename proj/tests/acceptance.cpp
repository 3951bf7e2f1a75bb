// Acceptance suite: one PASS/FAIL line per check. Exit status is nonzero
// when a blocking check fails; check 9 is reported only.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "pencil/fixtures.hpp"
#include "pencil/harness.hpp"

using namespace pencil;
using harness::AnalysisReport;
using harness::Instance;
using gf::Elem;
using gf::FieldPtr;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Sizes {
  int pencils = 50;        // per field, check 1
  int corpus = 200;        // q = 2 and q = 5 corpora
  int corpus4 = 50;        // q = 4, check 9 only
  int corpus3 = 100;       // q = 3, local layer only
  int secants = 1000;
  int fixtures = 20;       // per pattern at q = 2
  int scan = 100;
};

struct Analyzed {
  Instance inst;
  forms::Pencil P;
  AnalysisReport rep;
  double seconds = 0;
};

struct Corpus {
  std::uint64_t q;
  std::vector<Analyzed> rows;
};

constexpr std::uint64_t kMaster = 20240601;

Corpus build_corpus(std::uint64_t q, int count) {
  Corpus c{q, {}};
  for (int i = 0; i < count; ++i) {
    Analyzed a;
    a.inst = harness::random_instance(q, harness::row_seed(kMaster, i));
    a.P = harness::validate_instance(a.inst);
    auto t0 = Clock::now();
    a.rep = harness::analyze(a.inst);
    a.seconds = since(t0);
    c.rows.push_back(std::move(a));
  }
  return c;
}

forms::Pencil random_pencil(const FieldPtr& K, int d, fixtures::Rng& rng) {
  for (;;) {
    try {
      return forms::pencil_validate(fixtures::random_form(K, d, rng), fixtures::random_form(K, d, rng));
    } catch (const Error&) {
    }
  }
}

std::optional<gamma::Point4> point_of_degree(const forms::Pencil& P, int d) {
  const auto& K = P.field();
  auto E = gf::make_field(K->characteristic(), K->degree() * d);
  for (const auto& w : gamma::enumerate_gamma(P, d))
    if (gf::orbit_degree(w, *E, *K) == d) return w;
  return std::nullopt;
}

struct Line {
  int id;
  std::string name;
  bool pass;
  bool blocking;
  std::string detail;
};

std::vector<Line> results;

void report(int id, const std::string& name, bool pass, const std::string& detail, bool blocking = true) {
  results.push_back({id, name, pass, blocking, detail});
  std::printf("%s %2d %-28s %s\n", blocking ? (pass ? "PASS  " : "FAIL  ") : "REPORT", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
}

template <class... T>
std::string fmt(T&&... xs) {
  std::ostringstream s;
  (s << ... << xs);
  return s.str();
}

// 1: resultant path against brute force over P^3.
void enumeration_oracle(const Sizes& z) {
  auto t0 = Clock::now();
  int pencils = 0, mismatches = 0;
  fixtures::Rng rng(1);
  for (std::uint64_t p : {2, 3}) {
    auto K = gf::make_field(p, 1);
    for (int i = 0; i < z.pencils; ++i) {
      const int d = p == 2 ? 3 : (i % 2 ? 4 : 2);
      auto P = random_pencil(K, d, rng);
      ++pencils;
      for (int n = 1; n <= 3; ++n) {
        gamma::GammaOptions brute;
        brute.brute = true;
        if (gamma::enumerate_gamma(P, n) != gamma::enumerate_gamma(P, n, brute)) ++mismatches;
      }
    }
  }
  const double s = since(t0);
  report(1, "enumeration oracle", mismatches == 0 && s < 60,
         fmt(pencils, " pencils, n = 1..3, ", mismatches, " mismatches, ", s, " s"));
}

// 2: sum_{d | n} d a_d = N_n on every analyzed instance.
void moebius(const std::vector<const Corpus*>& corpora) {
  int checked = 0, bad = 0;
  for (const auto* c : corpora)
    for (const auto& a : c->rows) {
      const auto& r = a.rep;
      ++checked;
      bool ok = r.spectrum.size() == r.N.size();
      for (size_t n = 1; n < std::min(r.N.size(), r.spectrum.size()); ++n) {
        std::int64_t sum = 0;
        for (size_t d = 1; d <= n; ++d)
          if (n % d == 0) sum += static_cast<std::int64_t>(d) * r.spectrum[d];
        ok &= sum == static_cast<std::int64_t>(r.N[n]);
      }
      if (!ok) ++bad;
    }
  report(2, "Moebius consistency", bad == 0, fmt(checked, " instances, ", bad, " inconsistent"));
}

// 3: nonzero a_d for some d <= 9 and g_obs in {1, 3, 9}.
void degree_nine(const Corpus& c) {
  int bad = 0;
  for (const auto& a : c.rows) {
    const auto& s = a.rep.spectrum;
    bool some = false;
    for (size_t d = 1; d < s.size() && d <= 9; ++d) some |= s[d] != 0;
    const auto g = a.rep.g_obs;
    if (!some || !(g == 1 || g == 3 || g == 9)) ++bad;
  }
  report(3, "degree-9 structure", bad == 0, fmt(c.rows.size(), " instances at q = ", c.q, ", ", bad, " violations"));
}

// 4: descent from every closed point of degree 2^a <= 12.
void descent(const std::vector<const Corpus*>& corpora) {
  int runs = 0, bad = 0;
  double worst = 0;
  for (const auto* c : corpora)
    for (const auto& a : c->rows) {
      const auto& s = a.rep.spectrum;
      auto t0 = Clock::now();
      for (int d = 1, e = 0; d <= 12 && d < static_cast<int>(s.size()); d *= 2, ++e) {
        if (s[d] == 0) continue;
        auto w = point_of_degree(a.P, d);
        ++runs;
        if (!w) {
          ++bad;
          continue;
        }
        try {
          auto x = surface::tower_descent(a.P, *w, e).final_point();
          if (!(*x.field == *a.P.field()) || !surface::on_surface(a.P, x)) ++bad;
        } catch (const Error&) {
          ++bad;
        }
      }
      worst = std::max(worst, since(t0));
    }
  report(4, "descent (v) => (i)", bad == 0,
         fmt(runs, " descents, ", bad, " failures, slowest instance ", worst, " s"));
}

// 5: secant third points.
void secants(const Sizes& z) {
  int fixtures = 0, bad = 0, lines = 0;
  const std::uint64_t qs[] = {2, 4, 5, 7};
  const int per_q = z.secants / 4;
  for (std::uint64_t q : qs) {
    int done = 0;
    for (std::uint64_t i = 0; done < per_q; ++i) {
      auto inst = harness::random_instance(q, harness::row_seed(5000 + q, i));
      auto X = harness::validate_instance(inst);
      const auto& K = X.field();
      auto L2 = gf::make_field(K->characteristic(), K->degree() * 2);
      auto L4 = gf::make_field(K->characteristic(), K->degree() * 4);

      auto check = [&](const surface::RatPoint& P, const FieldPtr& L) -> std::optional<surface::RatPoint> {
        ++fixtures;
        ++done;
        auto point_of = [](const surface::SecantResult& r) {
          return std::visit([](const auto& x) { return x.point; }, r);
        };
        try {
          auto r = surface::secant_third_point(X, P, L);
          auto T = point_of(r);
          if (std::holds_alternative<surface::LinePoint>(r)) ++lines;
          bool ok = *T.field == *L && surface::on_surface(X, T);
          auto rs = surface::secant_third_point(X, surface::conjugate(P, *L), L);
          ok &= rs.index() == r.index() && point_of(rs) == T;
          auto Lp = P.field;
          auto emb = gf::embedding(L, Lp);
          int alphas = 0;
          for (Elem a = 2; a < Lp->size() && alphas < 2; ++a) {
            if (emb->in_image(a)) continue;
            ++alphas;
            auto ra = surface::secant_third_point(X, P, L, a);
            ok &= ra.index() == r.index() && point_of(ra) == T;
          }
          if (!ok) ++bad;
          return T;
        } catch (const Error& e) {
          ++bad;
          std::fprintf(stderr, "secant q=%llu: %s\n", static_cast<unsigned long long>(q), e.what());
          return std::nullopt;
        }
      };

      if (auto w = point_of_degree(X, 2)) check(surface::constant_point(L2, *w), K);
      if (done >= per_q) break;
      if (auto w = point_of_degree(X, 4)) {
        auto T = check(surface::constant_point(L4, *w), L2);
        // a non-constant quadratic point from the first step
        if (T && done < per_q && !(surface::conjugate(*T, *K) == *T)) check(*T, K);
      }
    }
  }
  report(5, "secant third point", bad == 0,
         fmt(fixtures, " fixtures over q in {2,4,5,7}, ", bad, " failures, ", lines, " line-in-surface cases"));
}

// 6: no CONTRADICTION, every ANOMALY resolved.
void contradictions(const std::vector<const Corpus*>& corpora) {
  int contra = 0, anomalies = 0, unresolved = 0, errors = 0;
  std::string where;
  for (const auto* c : corpora) {
    where += (where.empty() ? "q = " : ", ") + std::to_string(c->q) + " (" + std::to_string(c->rows.size()) + ")";
    for (const auto& a : c->rows) {
      const auto& r = a.rep;
      contra += r.has_flag("CONTRADICTION");
      if (r.has_flag("ANOMALY")) {
        ++anomalies;
        unresolved += r.anomaly_resolved != true;
      }
      errors += !r.errors.empty();
    }
  }
  report(6, "no contradictions", contra == 0 && unresolved == 0,
         fmt(where, ": ", contra, " CONTRADICTION, ", anomalies, " ANOMALY (", unresolved, " unresolved), ", errors,
             " rows with stage errors"));
}

// 7: residue points at places of degree <= 2; global points agree with local verdicts.
void local_layer(const Corpus& c2, const Sizes& z, const std::vector<const Corpus*>& corpora) {
  int places = 0, missing = 0;
  auto residue = [&](const forms::Pencil& P) {
    const auto& K = P.field();
    std::vector<local::Place> vs = local::places_of_degree(K, 1);
    for (const auto& v : local::places_of_degree(K, 2)) vs.push_back(v);
    vs.push_back(local::infinite_place());
    for (const auto& v : vs) {
      ++places;
      auto x = local::residue_point(P, v);
      auto k = local::residue_field(K, v);
      if (!x || forms::eval_form(local::reduction_at(P, v), *x, k) != 0) ++missing;
    }
  };
  for (const auto& a : c2.rows) residue(a.P);
  harness::GenerateOptions g3;
  g3.allow_char3 = true;
  for (int i = 0; i < z.corpus3; ++i) {
    auto inst = harness::random_instance(3, harness::row_seed(kMaster, i), g3);
    residue(harness::validate_instance(inst, true));
  }
  int points = 0, inconsistent = 0;
  for (const auto* c : corpora)
    for (const auto& a : c->rows) {
      const auto& r = a.rep;
      if (!r.point_verified) continue;
      ++points;
      bool ok = r.obstruction.empty() && r.local_overall != "LocalObstructionAt";
      for (const auto& p : r.places) ok &= p.status == "Soluble" || p.status == "GoodReductionAuto";
      if (!ok) ++inconsistent;
    }
  report(7, "local layer", missing == 0 && inconsistent == 0,
         fmt(places, " places over q in {2,3}, ", missing, " without residue point; ", points, " global points, ",
             inconsistent, " inconsistent with local verdicts"));
}

// 8: planted splitting types.
void classifier(const Sizes& z) {
  using gamma::Pattern;
  int total = 0, recovered = 0, unknown = 0, wrong = 0;
  fixtures::Rng rng(8);
  auto run = [&](Pattern planted, std::uint64_t q, int count) {
    auto K = gf::make_field(q == 4 ? 2 : q, q == 4 ? 2 : 1);
    for (int i = 0; i < count; ++i) {
      auto [f, g] = fixtures::splitting_fixture(planted, K, rng);
      auto C = gamma::count_sequence(forms::pencil_validate(f, g), 12);
      auto m = gamma::classify_splitting(C).matched;
      ++total;
      const bool has = std::find(m.begin(), m.end(), planted) != m.end();
      const bool integral = std::find(m.begin(), m.end(), Pattern::IntegralComponent) != m.end();
      if (has && !integral) ++recovered;
      else if (m == std::vector<Pattern>{Pattern::Unknown}) ++unknown;
      else ++wrong;
    }
  };
  for (auto p : {Pattern::TripleConjugateLines, Pattern::ConicsPlusLines, Pattern::NineLines}) run(p, 2, z.fixtures);
  for (auto p : {Pattern::TripleConjugateLines, Pattern::ConicsPlusLines}) run(p, 4, z.fixtures / 2);
  const double rate = total ? double(recovered) / total : 0;
  report(8, "classifier fixtures", rate >= 0.95 && wrong == 0,
         fmt(recovered, "/", total, " recovered (", 100 * rate, "%), ", unknown, " Unknown, ", wrong, " wrong"));
}

// 9: largest coordinate degree of the points found at q in {4, 5}.
void remark(const std::vector<const Corpus*>& corpora) {
  int soluble = 0, worst = -1;
  std::map<std::string, int> methods;
  std::string where;
  for (const auto* c : corpora) {
    where += (where.empty() ? "q = " : ", ") + std::to_string(c->q);
    for (const auto& a : c->rows)
      if (a.rep.point_verified) {
        ++soluble;
        ++methods[a.rep.global_method];
        worst = std::max(worst, a.rep.point_degree);
      }
  }
  std::string by;
  for (const auto& [m, k] : methods) by += (by.empty() ? "" : ", ") + m + " " + std::to_string(k);
  report(9, "degree of points found", worst <= 5,
         fmt(where, ": ", soluble, " soluble instances (", by, "), max coordinate degree ", worst,
             worst <= 5 ? " (<= 5)" : " (> 5)"),
         false);
}

// 10: analyze at q = 2 with D_max = K = 12; 100-instance scan.
void performance(const Corpus& c2, const Sizes& z) {
  double worst = 0;
  for (const auto& a : c2.rows) worst = std::max(worst, a.seconds);
  harness::AnalyzeConfig cfg;
  cfg.threads = static_cast<int>(std::clamp(std::thread::hardware_concurrency(), 1u, 8u));
  std::ostringstream sink;
  auto t0 = Clock::now();
  harness::scan(z.scan, 2, kMaster + 1, cfg, sink);
  const double s = since(t0);
  report(10, "performance", worst < 10 && s < 900,
         fmt("slowest analyze at q = 2 ", worst, " s; ", z.scan, "-instance scan ", s, " s with ", cfg.threads,
             " thread(s)"));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance suite"};
  bool quick = false;
  app.add_flag("--quick", quick, "smaller samples for a fast smoke run");
  CLI11_PARSE(app, argc, argv);

  Sizes z;
  if (quick) z = Sizes{10, 30, 8, 20, 100, 4, 20};

  auto t0 = Clock::now();
  try {
    enumeration_oracle(z);
    auto c2 = build_corpus(2, z.corpus);
    auto c5 = build_corpus(5, z.corpus);
    auto c4 = build_corpus(4, z.corpus4);
    moebius({&c2, &c5, &c4});
    degree_nine(c2);
    descent({&c2, &c5});
    secants(z);
    contradictions({&c2, &c5});
    local_layer(c2, z, {&c2, &c5, &c4});
    classifier(z);
    remark({&c4, &c5});
    performance(c2, z);
  } catch (const std::exception& e) {
    std::printf("FAIL     aborted: %s\n", e.what());
    return 1;
  }
  int failed = 0;
  for (const auto& r : results) failed += r.blocking && !r.pass;
  std::printf("%d blocking failure(s), %.1f s total\n", failed, since(t0));
  return failed ? 1 : 0;
}
