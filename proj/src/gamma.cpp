#include "pencil/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

namespace pencil::gamma {

using forms::EmbeddedForm;
using forms::MPoly;

namespace {

std::uint64_t field_size(std::uint64_t q, int n, std::uint64_t cap) {
  std::uint64_t s = 1;
  for (int i = 0; i < n; ++i) {
    if (s > cap / q) return 0;
    s *= q;
  }
  return s;
}

// Everything needed to walk the projected plane curve over one field E.
struct Sweep {
  FieldPtr E;
  std::uint64_t q;
  const Pencil& P;
  std::vector<std::pair<forms::Exps, Elem>> R;  // resultant terms embedded in E
  std::vector<std::vector<EmbeddedForm>> fiber;  // coefficient forms of fp, gp in x3
  std::array<std::array<Elem, 4>, 4> M{};

  Sweep(const Pencil& pencil, const FieldPtr& field) : E(field), q(pencil.field()->size()), P(pencil) {
    auto emb = gf::embedding(P.field(), E);
    for (const auto& [e, c] : P.pos.resultant.terms) R.emplace_back(e, emb->apply(c));
    for (const MPoly* h : {&P.pos.fp, &P.pos.gp}) {
      std::vector<EmbeddedForm> cf;
      for (const auto& c : forms::coefficients_in(*h, 3)) cf.emplace_back(c, E);
      fiber.push_back(std::move(cf));
    }
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) M[i][j] = emb->apply(P.pos.M[i][j]);
  }

  // R(y0, y1, x) as a polynomial in x.
  gf::Poly restrict_line(Elem y0, Elem y1) const {
    const gf::Field& F = *E;
    gf::Poly u(10, 0);
    for (const auto& [e, c] : R) {
      Elem t = F.mul(c, F.mul(F.pow(y0, e[0]), F.pow(y1, e[1])));
      if (e[2] >= u.size()) u.resize(e[2] + 1, 0);
      u[e[2]] = F.add(u[e[2]], t);
    }
    gf::trim(u);
    return u;
  }

  // Points of Gamma over the plane point y (new coordinates), in original
  // coordinates and normalized.
  void fiber_points(std::array<Elem, 3> y, gf::Rng& rng, std::vector<Point4>& out) const {
    const gf::Field& F = *E;
    gf::Poly g;
    bool first = true;
    for (const auto& cf : fiber) {
      gf::Poly u(cf.size());
      for (size_t k = 0; k < cf.size(); ++k) u[k] = cf[k](y);
      gf::trim(u);
      g = first ? gf::monic(F, u) : gf::pgcd(F, g, u);
      first = false;
    }
    if (gf::deg(g) <= 0) return;
    for (Elem r : gf::distinct_roots(F, g, rng)) {
      std::array<Elem, 4> local{y[0], y[1], y[2], r};
      Point4 pt = forms::mat_apply(F, M, local);
      gf::normalize_projective(pt, F);
      out.push_back(pt);
    }
  }

  // All points over the plane line (y0 : y1 : x), x in E.
  void line_points(Elem y0, Elem y1, gf::Rng& rng, std::vector<Point4>& out) const {
    gf::Poly u = restrict_line(y0, y1);
    if (u.empty()) {
      for (Elem x = 0; x < E->size(); ++x) fiber_points({y0, y1, x}, rng, out);
      return;
    }
    for (Elem x : gf::distinct_roots(*E, u, rng)) fiber_points({y0, y1, x}, rng, out);
  }

  Point4 conjugate(const Point4& p) const {
    Point4 r;
    for (int i = 0; i < 4; ++i) r[i] = E->frobenius(p[i], q);
    return r;
  }
};

void sort_unique(std::vector<Point4>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::vector<Point4> enumerate_brute(const Pencil& P, const FieldPtr& E) {
  EmbeddedForm f(P.f, E), g(P.g, E);
  std::vector<Point4> out;
  forms::for_each_projective_point(4, *E, [&](std::span<const Elem> v) {
    if (f(v) == 0 && g(v) == 0) out.push_back({v[0], v[1], v[2], v[3]});
    return false;
  });
  return out;
}

}  // namespace

std::vector<Point4> enumerate_gamma(const Pencil& P, int n, const GammaOptions& opt) {
  const auto& K = P.field();
  if (n < 1) throw Error(ErrorCode::InvalidInput, "extension degree must be positive");
  if (field_size(K->size(), n, opt.max_field) == 0)
    throw Error(ErrorCode::ExtensionTooLarge, "F_" + std::to_string(K->size()) + "^" + std::to_string(n) + " exceeds the enumeration cap");
  FieldPtr E = gf::make_field(K->characteristic(), K->degree() * n);
  if (opt.brute) {
    auto pts = enumerate_brute(P, E);
    sort_unique(pts);
    return pts;
  }
  if (!P.pos.rational) throw Error(ErrorCode::NoGoodPosition, "no resultant-ready position over the base field");

  Sweep sweep(P, E);
  const std::uint64_t Q = E->size();

  // One representative (smallest code) per Frobenius orbit of b; the lines
  // (1 : b : x) for conjugate b carry conjugate points.
  std::vector<std::pair<Elem, int>> reps;
  {
    std::vector<bool> seen(Q, false);
    for (Elem b = 0; b < Q; ++b) {
      if (seen[b]) continue;
      int s = 0;
      Elem c = b;
      do {
        seen[c] = true;
        c = E->frobenius(c, sweep.q);
        ++s;
      } while (c != b);
      reps.emplace_back(b, s);
    }
  }

  auto work = [&](size_t begin, size_t end, std::vector<Point4>& out) {
    gf::Rng rng(0x5eed + begin);
    std::vector<Point4> local;
    for (size_t i = begin; i < end; ++i) {
      local.clear();
      sweep.line_points(1, reps[i].first, rng, local);
      for (const auto& p : local) {
        Point4 c = p;
        out.push_back(c);
        for (int k = 1; k < reps[i].second; ++k) {
          c = sweep.conjugate(c);
          out.push_back(c);
        }
      }
    }
  };

  std::vector<Point4> pts;
  const int threads = std::max(1, std::min<int>(opt.threads, static_cast<int>(reps.size())));
  if (threads == 1) {
    work(0, reps.size(), pts);
  } else {
    std::vector<std::vector<Point4>> parts(threads);
    std::vector<std::thread> pool;
    const size_t chunk = (reps.size() + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      size_t b = std::min(reps.size(), t * chunk), e = std::min(reps.size(), b + chunk);
      pool.emplace_back([&, b, e, t] { work(b, e, parts[t]); });
    }
    for (auto& th : pool) th.join();
    for (auto& part : parts) pts.insert(pts.end(), part.begin(), part.end());
  }
  gf::Rng rng(1);
  sweep.line_points(0, 1, rng, pts);
  sweep.fiber_points({0, 0, 1}, rng, pts);
  sort_unique(pts);
  return pts;
}

int count_depth(std::uint64_t q, int K, std::uint64_t field_cap) {
  int n = 0;
  while (n < K && field_size(q, n + 1, field_cap) != 0) ++n;
  return n;
}

PointCounts count_sequence(const Pencil& P, int K, const CountOptions& opt) {
  PointCounts C;
  C.q = P.field()->size();
  C.requested = K;
  const int depth = count_depth(C.q, K, opt.field_cap);
  C.N.assign(depth + 1, 0);
  GammaOptions g;
  g.threads = opt.threads;
  g.max_field = std::max(g.max_field, opt.field_cap);
  for (int n = 1; n <= depth; ++n) C.N[n] = enumerate_gamma(P, n, g).size();
  for (int m = 1; m <= depth; ++m)
    for (int n = 2 * m; n <= depth; n += m)
      if (C.N[m] > C.N[n])
        throw Error(ErrorCode::InternalCountError, "N[" + std::to_string(m) + "] > N[" + std::to_string(n) + "]");
  return C;
}

namespace {

int moebius(int n) {
  int r = 1;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    r = -r;
  }
  return n > 1 ? -r : r;
}

}  // namespace

DegreeSpectrum spectrum(const PointCounts& C) {
  DegreeSpectrum S;
  const int K = C.K();
  S.a.assign(K + 1, 0);
  for (int d = 1; d <= K; ++d) {
    std::int64_t s = 0;
    for (int e = 1; e <= d; ++e)
      if (d % e == 0) s += moebius(d / e) * static_cast<std::int64_t>(C.N[e]);
    if (s < 0 || s % d != 0)
      throw Error(ErrorCode::InternalCountError, "closed-point count of degree " + std::to_string(d) + " is not a nonnegative integer");
    S.a[d] = s / d;
  }
  return S;
}

IndexBound index_bound(const DegreeSpectrum& S) {
  IndexBound r;
  for (int d = 1; d <= S.D_max(); ++d) {
    if (S.a[d] <= 0) continue;
    r.g_obs = std::gcd<std::int64_t>(r.g_obs, d);
    r.witness_degrees.push_back(d);
  }
  if (r.witness_degrees.empty()) throw Error(ErrorCode::EmptySpectrum, "no closed points up to degree " + std::to_string(S.D_max()));
  return r;
}

const char* status_name(Status s) { return s == Status::Certified ? "Certified" : "UpToBound"; }

Theorem5Report theorem5_conditions(const DegreeSpectrum& S, int degree, std::uint64_t characteristic) {
  if (degree != 3) throw Error(ErrorCode::NotCubic, "the index conditions need cubic forms");
  if (characteristic == 3) throw Error(ErrorCode::Char3, "the index conditions need characteristic other than 3");
  Theorem5Report r;
  r.D_max = S.D_max();
  auto first = [&](auto pred) -> Condition {
    for (int d = 1; d <= S.D_max(); ++d)
      if (S.a[d] > 0 && pred(d)) return {true, Status::Certified, d};
    return {false, Status::UpToBound, std::nullopt};
  };
  r.cond_iv = first([](int d) { return d % 3 != 0; });
  r.cond_v = first([](int d) { return (d & (d - 1)) == 0; });
  std::int64_t g = 0;
  for (int d = 1; d <= S.D_max(); ++d)
    if (S.a[d] > 0) g = std::gcd<std::int64_t>(g, d);
  r.g_obs = g;
  r.cond_iii = g == 1 ? Condition{true, Status::Certified, r.cond_iv.witness} : Condition{false, Status::UpToBound, std::nullopt};
  r.implies_i_ii = r.cond_iii.holds || r.cond_iv.holds || r.cond_v.holds;
  return r;
}

const char* pattern_name(Pattern p) {
  switch (p) {
    case Pattern::TripleConjugateLines: return "3(1+1+1)";
    case Pattern::DoubleLinesPlusLines: return "2(1+1+1)+(1+1+1)";
    case Pattern::ConicsPlusLines: return "(2+2+2)+(1+1+1)";
    case Pattern::ThreeLineTriples: return "(1+1+1)+(1+1+1)+(1+1+1)";
    case Pattern::NineLines: return "(1+...+1)";
    case Pattern::ConjugateCubics: return "(3+3+3)";
    case Pattern::IntegralComponent: return "IntegralComponent";
    case Pattern::Unknown: return "Unknown";
  }
  return "?";
}

int PatternConstraint::predicted_c(int n) const {
  int c = 0;
  for (const auto& o : components)
    if (n % o.orbit == 0) c += o.orbit;
  return c;
}

const std::vector<PatternConstraint>& pattern_constraints() {
  static const std::vector<PatternConstraint> table = {
      {Pattern::TripleConjugateLines, {{1, 3, 3}}, 3, "three conjugate lines counted three times"},
      {Pattern::DoubleLinesPlusLines, {{1, 3, 2}, {1, 3, 1}}, 3, "a doubled line triple and a reduced line triple"},
      {Pattern::ConicsPlusLines, {{2, 3, 1}, {1, 3, 1}}, 3, "two smooth conics in distinct planes meet in at most 2 points"},
      {Pattern::ThreeLineTriples, {{1, 3, 1}, {1, 3, 1}, {1, 3, 1}}, 3, "three orbits of three conjugate lines"},
      {Pattern::NineLines, {{1, 9, 1}}, 9, "nine lines and their intersection points defined over the degree 9 extension"},
      {Pattern::ConjugateCubics, {{3, 3, 1}}, 9,
       "plane cubics: pairwise intersection 3; twisted cubics: (C.C) = 1, (C.sC) = 4, 3 pairs x 4 = 12 points"},
  };
  return table;
}

SplittingReport classify_splitting(const PointCounts& C) {
  SplittingReport r;
  for (int n = 1; n <= C.K(); ++n) {
    double qn = std::pow(static_cast<double>(C.q), n);
    if (qn < kTrustThreshold) continue;
    double ratio = static_cast<double>(C.N[n]) / qn;
    std::int64_t c = std::llround(ratio);
    r.trusted_n.push_back(n);
    r.c.push_back(c);
    r.residual.push_back(std::abs(ratio - static_cast<double>(c)));
  }
  if (r.trusted_n.empty()) {
    r.matched = {Pattern::Unknown};
    r.note = "no n with q^n >= 1600 within the counted range";
    return r;
  }
  auto fits = [&](auto predicted) {
    for (size_t i = 0; i < r.trusted_n.size(); ++i)
      if (predicted(r.trusted_n[i]) != r.c[i]) return false;
    return true;
  };
  bool integral = std::all_of(r.c.begin(), r.c.end(), [](std::int64_t c) { return c >= 1; });
  for (const auto& pc : pattern_constraints()) {
    bool ok = fits([&](int n) { return pc.predicted_c(n); });
    // One 9-orbit and three 3-orbits of lines agree whenever 9 does not divide
    // a trusted n, so both are reported.
    if (!ok && pc.pattern == Pattern::NineLines) ok = fits([](int n) { return n % 3 == 0 ? 9 : 0; });
    if (ok) {
      if (r.matched.empty()) r.orbit_structure = pc.components;
      r.matched.push_back(pc.pattern);
    }
  }
  if (integral) {
    if (r.matched.empty()) r.orbit_structure = {{0, 1, 1}};
    r.matched.push_back(Pattern::IntegralComponent);
    r.note = "c_n >= 1 for every trusted n: a component defined over F_q, so Gamma has points over all large extensions";
  }
  if (r.matched.empty()) {
    r.matched = {Pattern::Unknown};
    r.note = "c_n sequence matches none of the patterns";
  } else if (r.matched.front() != Pattern::IntegralComponent) {
    r.note = "counts see only the reduced curve; multiplicities are taken from the pattern, not observed";
  }
  return r;
}

}  // namespace pencil::gamma
