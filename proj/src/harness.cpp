#include "pencil/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include "pencil/fixtures.hpp"

namespace pencil::harness {

using forms::Exps;
using gf::Elem;

// Instances

json encode_elem(const gf::Field& K, Elem a) {
  if (K.degree() == 1) return a;
  return K.coeffs(a);
}

Elem decode_elem(const gf::Field& K, const json& j) {
  const std::uint64_t p = K.characteristic();
  auto reduce = [&](const json& v) -> std::uint64_t {
    if (!v.is_number_integer()) throw Error(ErrorCode::InvalidInput, "coefficient must be an integer");
    const std::int64_t x = v.get<std::int64_t>();
    const std::int64_t r = x % static_cast<std::int64_t>(p);
    return static_cast<std::uint64_t>(r < 0 ? r + static_cast<std::int64_t>(p) : r);
  };
  if (j.is_array()) {
    if (j.size() > static_cast<size_t>(K.degree())) throw Error(ErrorCode::InvalidInput, "coefficient vector longer than the extension degree");
    std::vector<std::uint64_t> c(K.degree(), 0);
    for (size_t i = 0; i < j.size(); ++i) c[i] = reduce(j[i]);
    return K.from_coeffs(c);
  }
  if (K.degree() != 1) throw Error(ErrorCode::InvalidInput, "extension field coefficients must be vectors");
  return reduce(j);
}

namespace {

json terms_json(const MPoly& f) {
  json arr = json::array();
  for (const auto& [e, c] : f.terms)
    arr.push_back(json{{"exp", {e[0], e[1], e[2], e[3]}}, {"c", encode_elem(*f.field, c)}});
  return arr;
}

MPoly terms_from_json(const json& j, const FieldPtr& K, const char* name) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidInput, std::string(name) + " must be a term list");
  MPoly f{K, 4, {}};
  for (const auto& t : j) {
    if (!t.contains("exp") || !t.contains("c")) throw Error(ErrorCode::InvalidInput, "term needs exp and c");
    const auto& e = t["exp"];
    if (!e.is_array() || e.size() != 4) throw Error(ErrorCode::InvalidInput, "exp must have 4 entries");
    Exps ex{};
    for (int i = 0; i < 4; ++i) {
      const int v = e[i].get<int>();
      if (v < 0 || v > 255) throw Error(ErrorCode::InvalidInput, "exponent out of range");
      ex[i] = static_cast<std::uint8_t>(v);
    }
    f.add_term(ex, decode_elem(*K, t["c"]));
  }
  return f;
}

json core_json(const Instance& inst) {
  return json{{"p", inst.p}, {"n", inst.n}, {"f", terms_json(inst.f)}, {"g", terms_json(inst.g)}};
}

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

}  // namespace

std::string Instance::id() const {
  // FNV-1a over the canonical field and forms
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : core_json(*this).dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return hex64(h);
}

json to_json(const Instance& inst) {
  json j = core_json(inst);
  j["provenance"] = json{{"seed", inst.seed ? json(*inst.seed) : json(nullptr)},
                         {"generator", inst.generator},
                         {"rejections", inst.rejections}};
  j["validation"] = json{{"pencil", inst.pencil_status}, {"generic_fiber", inst.generic_fiber}};
  return j;
}

std::string canonical(const Instance& inst) { return to_json(inst).dump(); }

Instance instance_from_json(const json& j) {
  try {
    Instance inst;
    inst.p = j.at("p").get<std::uint64_t>();
    inst.n = j.at("n").get<int>();
    if (inst.n < 1) throw Error(ErrorCode::InvalidInput, "n must be positive");
    FieldPtr K = gf::make_field(inst.p, inst.n);
    inst.f = terms_from_json(j.at("f"), K, "f");
    inst.g = terms_from_json(j.at("g"), K, "g");
    if (j.contains("provenance")) {
      const auto& pr = j["provenance"];
      if (pr.contains("seed") && !pr["seed"].is_null()) inst.seed = pr["seed"].get<std::uint64_t>();
      inst.generator = pr.value("generator", "");
      inst.rejections = pr.value("rejections", std::uint64_t{0});
    }
    if (j.contains("validation")) {
      inst.pencil_status = j["validation"].value("pencil", "");
      inst.generic_fiber = j["validation"].value("generic_fiber", "");
    }
    return inst;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("instance JSON: ") + e.what());
  }
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, path + ": " + e.what());
  }
  return instance_from_json(j);
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t row_seed(std::uint64_t master, std::uint64_t index) { return mix(mix(master) + index); }

namespace {

std::pair<std::uint64_t, int> prime_power(std::uint64_t q) {
  if (q < 2) throw Error(ErrorCode::NotPrime, "field size must be a prime power");
  std::uint64_t p = 2;
  while (p * p <= q && q % p) ++p;
  if (q % p) p = q;
  int n = 0;
  std::uint64_t r = q;
  while (r % p == 0) {
    r /= p;
    ++n;
  }
  if (r != 1) throw Error(ErrorCode::NotPrime, std::to_string(q) + " is not a prime power");
  return {p, n};
}

}  // namespace

forms::Pencil validate_instance(Instance& inst, bool allow_char_clash) {
  try {
    auto P = forms::pencil_validate(inst.f, inst.g, allow_char_clash);
    inst.pencil_status = "valid";
    return P;
  } catch (const Error& e) {
    inst.pencil_status = error_code_name(e.code());
    throw;
  }
}

Instance random_instance(std::uint64_t q, std::uint64_t seed, const GenerateOptions& opt) {
  auto [p, n] = prime_power(q);
  if (opt.degree == 3 && p == 3 && !opt.allow_char3)
    throw Error(ErrorCode::Char3, "cubic pencils in characteristic 3 are excluded");
  FieldPtr K = gf::make_field(p, n);
  gf::Rng rng(mix(seed));
  Instance inst;
  inst.p = p;
  inst.n = n;
  inst.seed = seed;
  inst.generator = kGeneratorVersion;
  for (;;) {
    if (inst.rejections >= opt.max_rejections)
      throw Error(ErrorCode::GenerationExhausted, "no valid pencil after " + std::to_string(inst.rejections) + " draws");
    inst.f = fixtures::random_form(K, opt.degree, rng);
    inst.g = fixtures::random_form(K, opt.degree, rng);
    forms::Pencil P;
    try {
      P = forms::pencil_validate(inst.f, inst.g, opt.allow_char3);
    } catch (const Error&) {
      ++inst.rejections;
      continue;
    }
    auto v = forms::is_smooth_generic_fiber(P, 32, 4, mix(seed + 1));
    if (!std::holds_alternative<forms::GenericSmooth>(v)) {
      ++inst.rejections;
      continue;
    }
    inst.pencil_status = "valid";
    inst.generic_fiber = "GenericSmooth";
    return inst;
  }
}

// Analysis

bool AnalysisReport::has_flag(const std::string& f) const {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

namespace {

ConditionRow condition_row(const gamma::Condition& c) { return {c.holds, gamma::status_name(c.status), c.witness}; }

json condition_json(const ConditionRow& c) {
  return json{{"holds", c.holds}, {"status", c.status}, {"witness", c.witness ? json(*c.witness) : json(nullptr)}};
}

ConditionRow condition_from(const json& j) {
  ConditionRow c;
  c.holds = j.at("holds").get<bool>();
  c.status = j.at("status").get<std::string>();
  if (!j.at("witness").is_null()) c.witness = j["witness"].get<int>();
  return c;
}

template <class Fn>
void stage(AnalysisReport& r, const std::string& name, Fn&& fn) {
  auto t0 = std::chrono::steady_clock::now();
  try {
    fn();
  } catch (const Error& e) {
    r.errors[name] = e.what();
  }
  r.timing[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void set_point(AnalysisReport& r, const forms::Pencil& P, const surface::RatPoint& x) {
  r.point.clear();
  for (const auto& c : x.coords) {
    std::vector<json> coeffs;
    for (Elem e : c) coeffs.push_back(encode_elem(*x.field, e));
    r.point.push_back(std::move(coeffs));
  }
  r.point_degree = x.max_degree();
  r.point_verified = *x.field == *P.field() && surface::on_surface(P, x);
}

bool is_remark_pattern(const std::string& p) {
  return p == gamma::pattern_name(gamma::Pattern::NineLines) || p == gamma::pattern_name(gamma::Pattern::ConjugateCubics) ||
         p == gamma::pattern_name(gamma::Pattern::ConicsPlusLines);
}

}  // namespace

AnalysisReport analyze(const Instance& inst, const AnalyzeConfig& cfg) {
  AnalysisReport r;
  r.id = inst.id();
  forms::Pencil P = forms::pencil_validate(inst.f, inst.g);
  const FieldPtr& K = P.field();
  r.q = K->size();

  std::optional<gamma::PointCounts> counts;
  std::optional<gamma::DegreeSpectrum> S;
  stage(r, "count", [&] {
    counts = gamma::count_sequence(P, cfg.k, {cfg.field_cap, cfg.threads});
    r.count_depth = counts->K();
    r.N = counts->N;
  });
  stage(r, "spectrum", [&] {
    if (!counts) return;
    S = gamma::spectrum(*counts);
    S->a.resize(std::min(S->a.size(), static_cast<size_t>(cfg.dmax) + 1));
    r.spectrum = S->a;
    auto ib = gamma::index_bound(*S);
    r.g_obs = ib.g_obs;
    r.witness_degrees = ib.witness_degrees;
    auto t5 = gamma::theorem5_conditions(*S, P.degree, K->characteristic());
    r.cond_iii = condition_row(t5.cond_iii);
    r.cond_iv = condition_row(t5.cond_iv);
    r.cond_v = condition_row(t5.cond_v);
    r.implies_i_ii = t5.implies_i_ii;
  });
  stage(r, "classify", [&] {
    if (!counts) return;
    auto sp = gamma::classify_splitting(*counts);
    for (auto p : sp.matched) r.patterns.push_back(gamma::pattern_name(p));
    r.trusted_n = sp.trusted_n;
    r.c = sp.c;
    r.splitting_note = sp.note;
  });

  r.global_method = "none";
  r.global_status = "skipped";
  stage(r, "global", [&] {
    r.global_status = "error";
    if (S && S->D_max() >= 1 && S->a[1] > 0) {
      r.global_method = "constant";
      auto pts = gamma::enumerate_gamma(P, 1);
      set_point(r, P, surface::constant_point(K, pts.front()));
      r.global_status = "found";
      return;
    }
    int a = 0;
    for (int d = 2; S && d <= S->D_max(); d *= 2, ++a)
      if (S->a[d] > 0) {
        ++a;
        r.global_method = "descent";
        auto E = gf::make_field(K->characteristic(), K->degree() * d);
        for (const auto& w : gamma::enumerate_gamma(P, d, {false, 1ull << 24, cfg.threads})) {
          if (gf::orbit_degree(w, *E, *K) != d) continue;
          auto trace = surface::tower_descent(P, w, a);
          for (const auto& s : trace.steps) r.descent_steps.push_back(surface::step_kind_name(s.kind));
          set_point(r, P, trace.final_point());
          r.global_status = "found";
          return;
        }
        throw Error(ErrorCode::InternalCountError, "spectrum reports a point of degree " + std::to_string(d) + " that enumeration misses");
      }
    r.global_method = "search";
    auto res = surface::search_poly_points(P, cfg.deg_bound, {cfg.budget, cfg.threads});
    if (auto* f = std::get_if<surface::Found>(&res)) {
      set_point(r, P, f->point);
      r.search_tried = f->rank + 1;
      r.global_status = "found";
    } else {
      const auto& nf = std::get<surface::NotFoundWithin>(res);
      r.search_tried = nf.tried;
      r.global_status = nf.budget_exceeded ? "budget_exceeded" : "not_found";
    }
  });

  if (cfg.local) {
    stage(r, "local", [&] {
      local::LocalOptions lo;
      lo.precision = cfg.precision;
      auto rep = local::everywhere_locally(P, cfg.place_degree, lo);
      r.local_overall = local::overall_name(rep.overall);
      if (rep.obstruction) r.obstruction = local::place_name(*rep.obstruction);
      for (const auto& v : rep.bad) r.bad_places.push_back(local::place_name(v));
      for (const auto& v : rep.verdicts)
        r.places.push_back({local::place_name(v.place), v.place.degree(), v.bad_reduction, local::local_status_name(v.status),
                            v.precision, v.branches});
    });
  }

  // consistency
  const bool found = r.global_status == "found";
  auto flag = [&](const std::string& f, const std::string& why) {
    if (!r.has_flag(f)) r.flags.push_back(f);
    r.reasons.push_back(f + ": " + why);
  };
  if (found && !r.point_verified) flag("CONTRADICTION", "point returned without a verified evaluation");
  if (found && r.point_verified && !r.spectrum.empty() && !r.cond_iii.holds) {
    if (r.cond_iii.status == gamma::status_name(gamma::Status::Certified))
      flag("CONTRADICTION", "verified point with a certified index divisible by 3");
    else
      flag("ANOMALY", "verified point while g_obs = " + std::to_string(r.g_obs) + " up to D_max");
  }
  if (found && r.point_verified && !r.obstruction.empty())
    flag("CONTRADICTION", "verified global point but local obstruction at " + r.obstruction);
  if (r.cond_v.holds && r.cond_v.status == gamma::status_name(gamma::Status::Certified) && !(found && r.point_verified))
    flag("CONTRADICTION", "condition (v) certified but no verified point was constructed");
  if (!found && r.local_overall == local::overall_name(local::Overall::EverywhereLocallySolubleUpToBounds) && r.g_obs == 3) {
    if (std::any_of(r.patterns.begin(), r.patterns.end(), is_remark_pattern))
      flag("CANDIDATE", "locally soluble up to bounds, no point, g_obs = 3, pattern " + r.patterns.front());
    else if (r.patterns == std::vector<std::string>{gamma::pattern_name(gamma::Pattern::Unknown)})
      flag("REVIEW", "locally soluble up to bounds, no point, g_obs = 3, unclassified splitting");
  }

  if (r.has_flag("ANOMALY") && cfg.escalate) {
    stage(r, "escalate", [&] {
      auto C = gamma::count_sequence(P, 18, {std::max<std::uint64_t>(cfg.field_cap, 1ull << 21), cfg.threads});
      auto ib = gamma::index_bound(gamma::spectrum(C));
      r.anomaly_resolved = ib.g_obs % 3 != 0;
      r.reasons.push_back("escalation to D_max = " + std::to_string(C.K()) + ": g_obs = " + std::to_string(ib.g_obs));
    });
  }
  return r;
}

json to_json(const AnalysisReport& r) {
  json places = json::array();
  for (const auto& p : r.places)
    places.push_back(json{{"place", p.place}, {"degree", p.degree}, {"bad", p.bad}, {"status", p.status},
                          {"precision", p.precision}, {"branches", p.branches}});
  json point = json::array();
  for (const auto& c : r.point) point.push_back(c);
  return json{
      {"id", r.id},
      {"q", r.q},
      {"counts", {{"depth", r.count_depth}, {"N", r.N}}},
      {"spectrum", {{"a", r.spectrum}, {"g_obs", r.g_obs}, {"witness_degrees", r.witness_degrees}}},
      {"theorem5",
       {{"cond_iii", condition_json(r.cond_iii)},
        {"cond_iv", condition_json(r.cond_iv)},
        {"cond_v", condition_json(r.cond_v)},
        {"implies_i_ii", r.implies_i_ii}}},
      {"splitting", {{"patterns", r.patterns}, {"trusted_n", r.trusted_n}, {"c", r.c}, {"note", r.splitting_note}}},
      {"global",
       {{"method", r.global_method},
        {"status", r.global_status},
        {"point", point},
        {"verified", r.point_verified},
        {"degree", r.point_degree},
        {"descent_steps", r.descent_steps},
        {"search_tried", r.search_tried}}},
      {"local",
       {{"overall", r.local_overall}, {"obstruction", r.obstruction}, {"bad_places", r.bad_places}, {"places", places}}},
      {"flags", r.flags},
      {"reasons", r.reasons},
      {"anomaly_resolved", r.anomaly_resolved ? json(*r.anomaly_resolved) : json(nullptr)},
      {"errors", r.errors},
      {"timing", r.timing},
  };
}

AnalysisReport report_from_json(const json& j) {
  try {
    AnalysisReport r;
    r.id = j.at("id").get<std::string>();
    r.q = j.at("q").get<std::uint64_t>();
    r.count_depth = j.at("counts").at("depth").get<int>();
    r.N = j["counts"].at("N").get<std::vector<std::uint64_t>>();
    const auto& s = j.at("spectrum");
    r.spectrum = s.at("a").get<std::vector<std::int64_t>>();
    r.g_obs = s.at("g_obs").get<std::int64_t>();
    r.witness_degrees = s.at("witness_degrees").get<std::vector<int>>();
    const auto& t = j.at("theorem5");
    r.cond_iii = condition_from(t.at("cond_iii"));
    r.cond_iv = condition_from(t.at("cond_iv"));
    r.cond_v = condition_from(t.at("cond_v"));
    r.implies_i_ii = t.at("implies_i_ii").get<bool>();
    const auto& sp = j.at("splitting");
    r.patterns = sp.at("patterns").get<std::vector<std::string>>();
    r.trusted_n = sp.at("trusted_n").get<std::vector<int>>();
    r.c = sp.at("c").get<std::vector<std::int64_t>>();
    r.splitting_note = sp.at("note").get<std::string>();
    const auto& g = j.at("global");
    r.global_method = g.at("method").get<std::string>();
    r.global_status = g.at("status").get<std::string>();
    for (const auto& c : g.at("point")) r.point.push_back(c.get<std::vector<json>>());
    r.point_verified = g.at("verified").get<bool>();
    r.point_degree = g.at("degree").get<int>();
    r.descent_steps = g.at("descent_steps").get<std::vector<std::string>>();
    r.search_tried = g.at("search_tried").get<std::uint64_t>();
    const auto& l = j.at("local");
    r.local_overall = l.at("overall").get<std::string>();
    r.obstruction = l.at("obstruction").get<std::string>();
    r.bad_places = l.at("bad_places").get<std::vector<std::string>>();
    for (const auto& p : l.at("places"))
      r.places.push_back({p.at("place").get<std::string>(), p.at("degree").get<int>(), p.at("bad").get<bool>(),
                          p.at("status").get<std::string>(), p.at("precision").get<int>(), p.at("branches").get<std::uint64_t>()});
    r.flags = j.at("flags").get<std::vector<std::string>>();
    r.reasons = j.at("reasons").get<std::vector<std::string>>();
    if (!j.at("anomaly_resolved").is_null()) r.anomaly_resolved = j["anomaly_resolved"].get<bool>();
    r.errors = j.at("errors").get<std::map<std::string, std::string>>();
    r.timing = j.at("timing").get<std::map<std::string, double>>();
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("report JSON: ") + e.what());
  }
}

// Scans

json to_json(const ScanRow& r) {
  return json{{"index", r.index},
              {"seed", r.seed},
              {"id", r.id},
              {"pattern", r.pattern},
              {"local", r.local_status},
              {"global", r.global_status},
              {"g_obs", r.g_obs},
              {"point_degree", r.point_degree},
              {"flags", r.flags},
              {"anomaly_resolved", r.anomaly_resolved ? json(*r.anomaly_resolved) : json(nullptr)},
              {"error", r.error}};
}

json to_json(const ScanSummary& s) {
  return json{{"count", s.count},
              {"patterns", s.patterns},
              {"flags", s.flags},
              {"candidates", s.candidates},
              {"unresolved_anomalies", s.unresolved_anomalies},
              {"errors", s.errors},
              {"max_point_degree", s.max_point_degree}};
}

namespace {

ScanRow scan_row(std::uint64_t index, std::uint64_t q, std::uint64_t master, const AnalyzeConfig& cfg,
                 const GenerateOptions& gen) {
  ScanRow row;
  row.index = index;
  row.seed = row_seed(master, index);
  try {
    Instance inst = random_instance(q, row.seed, gen);
    row.id = inst.id();
    AnalysisReport rep = analyze(inst, cfg);
    row.pattern = rep.patterns.empty() ? "" : rep.patterns.front();
    row.local_status = rep.local_overall;
    row.global_status = rep.global_status;
    row.g_obs = rep.g_obs;
    row.point_degree = rep.point_degree;
    row.flags = rep.flags;
    row.anomaly_resolved = rep.anomaly_resolved;
    for (const auto& [stage, msg] : rep.errors) row.error += (row.error.empty() ? "" : "; ") + stage + ": " + msg;
  } catch (const Error& e) {
    row.error = e.what();
  }
  return row;
}

}  // namespace

ScanSummary scan(std::uint64_t count, std::uint64_t q, std::uint64_t master_seed, const AnalyzeConfig& cfg, std::ostream& out,
                 const GenerateOptions& gen) {
  ScanSummary sum;
  AnalyzeConfig one = cfg;
  one.threads = 1;
  const int workers = static_cast<int>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(cfg.threads, count)));

  std::mutex mu;
  std::condition_variable ready;
  std::map<std::uint64_t, ScanRow> done;
  std::atomic<std::uint64_t> next{0};
  std::vector<std::thread> pool;
  if (workers > 1) {
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::uint64_t i; (i = next++) < count;) {
          ScanRow row = scan_row(i, q, master_seed, one, gen);
          std::lock_guard lock(mu);
          done.emplace(i, std::move(row));
          ready.notify_all();
        }
      });
  }

  for (std::uint64_t i = 0; i < count; ++i) {
    ScanRow row;
    if (workers > 1) {
      std::unique_lock lock(mu);
      ready.wait(lock, [&] { return done.count(i) > 0; });
      row = std::move(done[i]);
      done.erase(i);
    } else {
      row = scan_row(i, q, master_seed, one, gen);
    }
    out << to_json(row).dump() << '\n';
    out.flush();
    if (!out) {
      for (auto& t : pool) t.join();
      throw Error(ErrorCode::Io, "write failed; output is partial after row " + std::to_string(i));
    }
    ++sum.count;
    if (!row.pattern.empty()) ++sum.patterns[row.pattern];
    for (const auto& f : row.flags) ++sum.flags[f];
    if (std::find(row.flags.begin(), row.flags.end(), "CANDIDATE") != row.flags.end()) sum.candidates.push_back(row.id);
    if (std::find(row.flags.begin(), row.flags.end(), "ANOMALY") != row.flags.end() && row.anomaly_resolved != true)
      ++sum.unresolved_anomalies;
    if (!row.error.empty()) ++sum.errors;
    sum.max_point_degree = std::max(sum.max_point_degree, row.point_degree);
  }
  for (auto& t : pool) t.join();
  out << json{{"summary", to_json(sum)}}.dump() << '\n';
  if (!out) throw Error(ErrorCode::Io, "write failed; summary missing");
  return sum;
}

}  // namespace pencil::harness
