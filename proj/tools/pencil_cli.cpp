#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "pencil/harness.hpp"

using namespace pencil;
using harness::json;

namespace {

struct Args {
  std::string instance;
  std::uint64_t q = 0;
  std::uint64_t seed = 0;
  std::string out;
  harness::AnalyzeConfig cfg;
  bool allow_char3 = false;
};

// Validation failures exit with 2.
struct InputError {
  std::string msg;
};

harness::Instance load(const Args& a) {
  try {
    if (!a.instance.empty()) return harness::load_instance(a.instance);
    if (a.q == 0) throw Error(ErrorCode::InvalidInput, "give --instance or --q");
    harness::GenerateOptions g;
    g.allow_char3 = a.allow_char3;
    return harness::random_instance(a.q, a.seed, g);
  } catch (const Error& e) {
    throw InputError{e.what()};
  }
}

forms::Pencil validated(harness::Instance& inst, bool allow_char_clash = false) {
  try {
    return harness::validate_instance(inst, allow_char_clash);
  } catch (const Error& e) {
    throw InputError{e.what()};
  }
}

void emit(const Args& a, const json& j) {
  if (a.out.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(a.out);
  f << j.dump(2) << '\n';
  if (!f) throw Error(ErrorCode::Io, "cannot write " + a.out);
}

json point_json(const surface::RatPoint& x) {
  json coords = json::array();
  for (const auto& c : x.coords) {
    json poly = json::array();
    for (auto e : c) poly.push_back(harness::encode_elem(*x.field, e));
    coords.push_back(poly);
  }
  return coords;
}

json counts_json(const gamma::PointCounts& C) {
  json j{{"q", C.q}, {"requested", C.requested}, {"depth", C.K()}, {"N", C.N}};
  auto S = gamma::spectrum(C);
  j["a"] = S.a;
  j["g_obs"] = gamma::index_bound(S).g_obs;
  return j;
}

int run_analyze(const Args& a) {
  auto inst = load(a);
  validated(inst);
  auto rep = harness::analyze(inst, a.cfg);
  emit(a, harness::to_json(rep));
  const bool unresolved = rep.has_flag("ANOMALY") && rep.anomaly_resolved != true;
  return rep.has_flag("CONTRADICTION") || unresolved ? 3 : 0;
}

int run_scan(const Args& a, std::uint64_t count) {
  if (a.q == 0) throw InputError{"scan needs --q"};
  harness::GenerateOptions g;
  g.allow_char3 = a.allow_char3;
  if (g.degree == 3 && a.q % 3 == 0 && !a.allow_char3) throw InputError{"Char3: cubic scans need characteristic != 3"};
  harness::ScanSummary sum;
  if (a.out.empty()) {
    sum = harness::scan(count, a.q, a.seed, a.cfg, std::cout, g);
  } else {
    std::ofstream f(a.out);
    if (!f) throw Error(ErrorCode::Io, "cannot write " + a.out);
    sum = harness::scan(count, a.q, a.seed, a.cfg, f, g);
  }
  std::cerr << harness::to_json(sum).dump() << '\n';
  return sum.flags.count("CONTRADICTION") || sum.unresolved_anomalies ? 3 : 0;
}

int run_count(const Args& a, int n) {
  auto inst = load(a);
  auto P = validated(inst);
  emit(a, counts_json(gamma::count_sequence(P, n, {a.cfg.field_cap, a.cfg.threads})));
  return 0;
}

int run_classify(const Args& a) {
  auto inst = load(a);
  auto P = validated(inst);
  auto C = gamma::count_sequence(P, a.cfg.k, {a.cfg.field_cap, a.cfg.threads});
  auto r = gamma::classify_splitting(C);
  json matched = json::array();
  for (auto p : r.matched) matched.push_back(gamma::pattern_name(p));
  json orbits = json::array();
  for (const auto& o : r.orbit_structure) orbits.push_back({{"degree", o.degree}, {"orbit", o.orbit}, {"multiplicity", o.multiplicity}});
  emit(a, json{{"counts", counts_json(C)},
               {"matched", matched},
               {"trusted_n", r.trusted_n},
               {"c", r.c},
               {"residual", r.residual},
               {"orbit_structure", orbits},
               {"note", r.note}});
  return 0;
}

int run_search(const Args& a) {
  auto inst = load(a);
  auto P = validated(inst);
  auto res = surface::search_poly_points(P, a.cfg.deg_bound, {a.cfg.budget, a.cfg.threads});
  if (auto* f = std::get_if<surface::Found>(&res)) {
    emit(a, json{{"status", "Found"}, {"rank", f->rank}, {"degree", f->point.max_degree()}, {"point", point_json(f->point)},
                 {"verified", surface::on_surface(P, f->point)}});
  } else {
    const auto& nf = std::get<surface::NotFoundWithin>(res);
    emit(a, json{{"status", "NotFoundWithin"}, {"degree_bound", nf.degree_bound}, {"budget", nf.budget}, {"tried", nf.tried},
                 {"budget_exceeded", nf.budget_exceeded}});
  }
  return 0;
}

// witness 0: smallest power of two with a closed point
int run_descend(const Args& a, int witness) {
  if (witness != 0 && (witness & (witness - 1))) throw InputError{"--witness-degree must be a power of 2"};
  auto inst = load(a);
  auto P = validated(inst);
  const auto& K = P.field();
  auto C = gamma::count_sequence(P, a.cfg.dmax, {a.cfg.field_cap, a.cfg.threads});
  auto S = gamma::spectrum(C);
  for (int d = 1, e = 0; d <= S.D_max(); d *= 2, ++e) {
    if (S.a[d] == 0 || (witness && d != witness)) continue;
    auto E = gf::make_field(K->characteristic(), K->degree() * d);
    for (const auto& w : gamma::enumerate_gamma(P, d)) {
      if (gf::orbit_degree(w, *E, *K) != d) continue;
      auto trace = surface::tower_descent(P, w, e);
      json steps = json::array();
      for (const auto& s : trace.steps)
        steps.push_back({{"field_degree", s.field_degree}, {"kind", surface::step_kind_name(s.kind)}, {"point", point_json(s.point)}});
      emit(a, json{{"closed_point_degree", d},
                   {"steps", steps},
                   {"degree", trace.max_degree()},
                   {"verified", surface::on_surface(P, trace.final_point())}});
      return 0;
    }
  }
  emit(a, json{{"status", "NoPowerOfTwoPoint"}, {"D_max", S.D_max()}, {"witness_degree", witness}});
  return 0;
}

int run_local(const Args& a) {
  auto inst = load(a);
  auto P = validated(inst, true);
  local::LocalOptions lo;
  lo.precision = a.cfg.precision;
  auto rep = local::everywhere_locally(P, a.cfg.place_degree, lo);
  json verdicts = json::array();
  for (const auto& v : rep.verdicts) {
    json w = nullptr;
    if (v.witness) {
      w = json::array();
      for (const auto& c : *v.witness) {
        json poly = json::array();
        for (auto e : c) poly.push_back(harness::encode_elem(*P.field(), e));
        w.push_back(poly);
      }
    }
    verdicts.push_back({{"place", local::place_name(v.place)},
                        {"bad_reduction", v.bad_reduction},
                        {"status", local::local_status_name(v.status)},
                        {"precision", v.precision},
                        {"branches", v.branches},
                        {"witness", w},
                        {"notes", v.notes}});
  }
  json bad = json::array();
  for (const auto& v : rep.bad) bad.push_back(local::place_name(v));
  emit(a, json{{"bound", rep.bound},
               {"precision", rep.precision},
               {"bad_places", bad},
               {"verdicts", verdicts},
               {"overall", local::overall_name(rep.overall)},
               {"obstruction", rep.obstruction ? json(local::place_name(*rep.obstruction)) : json(nullptr)},
               {"caveat", rep.caveat}});
  return 0;
}

int run_generate(const Args& a) {
  auto inst = load(a);
  emit(a, harness::to_json(inst));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rational points on cubic surfaces f + t g = 0 over F_q(t)"};
  app.require_subcommand(1);
  Args a;
  std::uint64_t count = 0;
  int n = 12;
  int witness = 0;

  auto shared = [&](CLI::App* c) {
    c->add_option("--instance", a.instance, "instance JSON file");
    c->add_option("--q", a.q, "field size for generated instances");
    c->add_option("--seed", a.seed, "generator seed");
    c->add_option("--dmax", a.cfg.dmax, "largest closed-point degree used")->capture_default_str();
    c->add_option("--k", a.cfg.k, "count depth")->capture_default_str();
    c->add_option("--deg-bound", a.cfg.deg_bound, "coordinate degree bound for search")->capture_default_str();
    c->add_option("--budget", a.cfg.budget, "search budget in tuples")->capture_default_str();
    c->add_option("--place-degree", a.cfg.place_degree, "largest place degree examined")->capture_default_str();
    c->add_option("--precision", a.cfg.precision, "lifting precision")->capture_default_str();
    c->add_option("--threads", a.cfg.threads, "worker threads")->capture_default_str();
    c->add_option("--field-cap", a.cfg.field_cap, "largest q^n counted")->capture_default_str();
    c->add_option("--out", a.out, "output file (default stdout)");
    c->add_flag("--allow-char3", a.allow_char3, "accept characteristic 3 (local layer only)");
    c->add_flag("!--no-local", a.cfg.local, "skip the local layer in analyze/scan");
  };

  auto* analyze = app.add_subcommand("analyze", "full analysis of one instance");
  auto* scan = app.add_subcommand("scan", "analyze a seeded batch, JSONL output");
  auto* countc = app.add_subcommand("count", "point counts of Gamma and the degree spectrum");
  auto* classify = app.add_subcommand("classify", "splitting type of Gamma from counts");
  auto* search = app.add_subcommand("search", "bounded-degree search for F_q(t)-points");
  auto* descend = app.add_subcommand("descend", "descent from a closed point of degree 2^a");
  auto* localc = app.add_subcommand("local", "local solubility at places of bounded degree");
  auto* generate = app.add_subcommand("generate", "emit a random valid instance");
  for (auto* c : {analyze, scan, countc, classify, search, descend, localc, generate}) shared(c);
  scan->add_option("--count", count, "number of instances")->required();
  countc->add_option("--n", n, "count depth")->capture_default_str();
  descend->add_option("--witness-degree", witness, "closed-point degree 2^a to start from (default: smallest available)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*analyze) return run_analyze(a);
    if (*scan) return run_scan(a, count);
    if (*countc) return run_count(a, n);
    if (*classify) return run_classify(a);
    if (*search) return run_search(a);
    if (*descend) return run_descend(a, witness);
    if (*localc) return run_local(a);
    if (*generate) return run_generate(a);
  } catch (const InputError& e) {
    std::cerr << "invalid input: " << e.msg << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
