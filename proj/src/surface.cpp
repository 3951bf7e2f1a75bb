#include "pencil/surface.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

namespace pencil::surface {

using forms::Exps;
using forms::MPoly;

int RatPoint::max_degree() const {
  int d = -1;
  for (const auto& c : coords) d = std::max(d, gf::deg(c));
  return d;
}

RatPoint normalize(RatPoint P) {
  const gf::Field& L = *P.field;
  Poly g;
  for (auto& c : P.coords) {
    gf::trim(c);
    if (!c.empty()) g = g.empty() ? gf::monic(L, c) : gf::pgcd(L, g, c);
  }
  if (g.empty()) throw Error(ErrorCode::ZeroPolynomial, "zero coordinate tuple");
  if (gf::deg(g) > 0)
    for (auto& c : P.coords)
      if (!c.empty()) c = gf::pdiv(L, c, g);
  const int D = P.max_degree();
  int lead = 0;
  while (gf::deg(P.coords[lead]) != D) ++lead;
  const Elem s = L.inv(P.coords[lead].back());
  for (auto& c : P.coords) c = gf::pscale(L, c, s);
  return P;
}

RatPoint constant_point(const FieldPtr& field, std::span<const Elem> coords) {
  RatPoint P{field, {}};
  for (int i = 0; i < 4; ++i) {
    P.coords[i] = Poly{coords[i]};
    gf::trim(P.coords[i]);
  }
  return P;
}

namespace {

// Value of a form at polynomial coordinates (all over L).
struct PolyEvaluator {
  const gf::Field& L;
  std::array<std::vector<Poly>, 4> powers;

  PolyEvaluator(const gf::Field& field, const std::array<Poly, 4>& x, int maxdeg) : L(field) {
    for (int i = 0; i < 4; ++i) {
      powers[i].push_back(Poly{1});
      for (int k = 1; k <= maxdeg; ++k) powers[i].push_back(gf::pmul(L, powers[i].back(), x[i]));
    }
  }

  Poly operator()(const MPoly& F, const gf::Embedding& emb) const {
    Poly acc;
    for (const auto& [e, c] : F.terms) {
      Poly t{emb.apply(c)};
      for (int i = 0; i < 4; ++i)
        if (e[i]) t = gf::pmul(L, t, powers[i][e[i]]);
      acc = gf::padd(L, acc, t);
    }
    gf::trim(acc);
    return acc;
  }
};

Poly times_t(Poly p) {
  if (!p.empty()) p.insert(p.begin(), 0);
  return p;
}

}  // namespace

Poly surface_value(const Pencil& X, const RatPoint& x) {
  const gf::Field& L = *x.field;
  auto emb = gf::embedding(X.field(), x.field);
  PolyEvaluator ev(L, x.coords, X.degree);
  Poly v = gf::padd(L, ev(X.f, *emb), times_t(ev(X.g, *emb)));
  gf::trim(v);
  return v;
}

bool on_surface(const Pencil& X, const RatPoint& x) { return surface_value(X, x).empty(); }

RatPoint embed(const RatPoint& x, const FieldPtr& K) {
  auto emb = gf::embedding(x.field, K);
  RatPoint r{K, x.coords};
  for (auto& c : r.coords)
    for (auto& v : c) v = emb->apply(v);
  return r;
}

std::optional<RatPoint> restrict(const RatPoint& x, const FieldPtr& L) {
  auto emb = gf::embedding(L, x.field);
  RatPoint r{L, x.coords};
  for (auto& c : r.coords)
    for (auto& v : c) {
      if (!emb->in_image(v)) return std::nullopt;
      v = emb->restrict(v);
    }
  return r;
}

RatPoint conjugate(const RatPoint& x, const gf::Field& base) {
  RatPoint r = x;
  for (auto& c : r.coords)
    for (auto& v : c) v = x.field->frobenius(v, base.size());
  return r;
}

std::vector<Poly> restrict_to_line(const Pencil& X, const LineKT& line) {
  const FieldPtr& Lp = line.A.field;
  const gf::Field& L = *Lp;
  auto emb = gf::embedding(X.field(), Lp);
  const int d = X.degree;
  // binary forms in (s, u): index k holds the coefficient of s^{deg-k} u^k
  using Binary = std::vector<Poly>;
  auto bmul = [&](const Binary& a, const Binary& b) {
    Binary r(a.size() + b.size() - 1);
    for (size_t i = 0; i < a.size(); ++i)
      for (size_t j = 0; j < b.size(); ++j) r[i + j] = gf::padd(L, r[i + j], gf::pmul(L, a[i], b[j]));
    return r;
  };
  std::array<std::vector<Binary>, 4> pw;
  for (int i = 0; i < 4; ++i) {
    pw[i].push_back(Binary{Poly{1}});
    Binary lin{line.A.coords[i], line.B.coords[i]};
    for (int k = 1; k <= d; ++k) pw[i].push_back(bmul(pw[i].back(), lin));
  }
  std::map<Exps, Poly> coeff;
  for (const auto& [e, c] : X.f.terms) coeff[e] = gf::padd(L, coeff[e], Poly{emb->apply(c)});
  for (const auto& [e, c] : X.g.terms) coeff[e] = gf::padd(L, coeff[e], Poly{0, emb->apply(c)});
  std::vector<Poly> out(d + 1);
  for (const auto& [e, c] : coeff) {
    Binary t{c};
    for (int i = 0; i < 4; ++i)
      if (e[i]) t = bmul(t, pw[i][e[i]]);
    for (int k = 0; k <= d; ++k) out[k] = gf::padd(L, out[k], t[k]);
  }
  for (auto& c : out) gf::trim(c);
  return out;
}

SecantResult secant_third_point(const Pencil& X, const RatPoint& P, const FieldPtr& L, std::optional<Elem> alpha) {
  const FieldPtr& Lp = P.field;
  if (X.degree != 3) throw Error(ErrorCode::NotCubic, "the secant construction needs a cubic surface");
  if (Lp->degree() != 2 * L->degree() || Lp->characteristic() != L->characteristic())
    throw Error(ErrorCode::InvalidInput, "point field is not a quadratic extension of L");
  if (!on_surface(X, P)) throw Error(ErrorCode::InvalidInput, "point is not on the surface");
  if (restrict(P, L)) throw Error(ErrorCode::PointIsRational, "point is already defined over L(t)");
  const RatPoint Pbar = conjugate(P, *L);
  if (normalize(P) == normalize(Pbar))
    throw Error(ErrorCode::ConjugateEqualsPoint, "point is projectively fixed by conjugation");

  const gf::Field& F = *Lp;
  auto emb = gf::embedding(L, Lp);
  Elem a = 0;
  if (alpha) {
    a = *alpha;
    if (emb->in_image(a)) throw Error(ErrorCode::InvalidInput, "alpha lies in L");
  } else {
    while (emb->in_image(a)) ++a;
  }
  const Elem abar = F.frobenius(a, L->size());

  auto combo = [&](Elem x, Elem y) {
    RatPoint r{Lp, {}};
    for (int i = 0; i < 4; ++i) {
      r.coords[i] = gf::padd(F, gf::pscale(F, P.coords[i], x), gf::pscale(F, Pbar.coords[i], y));
      gf::trim(r.coords[i]);
    }
    auto down = restrict(r, L);
    if (!down) throw Error(ErrorCode::DescentStuck, "conjugation-invariant combination is not over L");
    return *down;
  };
  // P = (abar A - B) / (abar - a) and Pbar = (B - a A) / (abar - a), so A, B
  // are independent whenever P and Pbar are.
  LineKT line{combo(1, 1), combo(a, abar)};
  const gf::Field& K = *L;
  bool independent = false;
  for (int i = 0; i < 4 && !independent; ++i)
    for (int j = i + 1; j < 4 && !independent; ++j) {
      Poly m = gf::psub(K, gf::pmul(K, line.A.coords[i], line.B.coords[j]), gf::pmul(K, line.A.coords[j], line.B.coords[i]));
      gf::trim(m);
      independent = !m.empty();
    }
  if (!independent) throw Error(ErrorCode::DescentStuck, "secant spanning points are dependent");

  auto C = restrict_to_line(X, line);
  if (std::all_of(C.begin(), C.end(), [](const Poly& c) { return c.empty(); })) return LinePoint{normalize(line.A)};

  // C = (s^2 + T s u + N u^2)(c s + b u), the quadratic vanishing at P, Pbar.
  const Elem T = emb->restrict(F.add(a, abar)), N = emb->restrict(F.mul(a, abar));
  Poly c = C[0];
  Poly b = gf::psub(K, C[1], gf::pscale(K, c, T));
  Poly r2 = gf::psub(K, gf::psub(K, C[2], gf::pscale(K, b, T)), gf::pscale(K, c, N));
  Poly r3 = gf::psub(K, C[3], gf::pscale(K, b, N));
  gf::trim(r2);
  gf::trim(r3);
  if (!r2.empty() || !r3.empty()) throw Error(ErrorCode::DescentStuck, "restricted cubic is not divisible by the secant quadratic");

  // root of c s + b u is (s : u) = (b : -c)
  RatPoint third{L, {}};
  for (int i = 0; i < 4; ++i) {
    third.coords[i] = gf::psub(K, gf::pmul(K, b, line.A.coords[i]), gf::pmul(K, c, line.B.coords[i]));
    gf::trim(third.coords[i]);
  }
  third = normalize(third);
  if (!on_surface(X, third)) throw Error(ErrorCode::DescentStuck, "third point fails verification");
  return ThirdPoint{third};
}

const char* step_kind_name(StepKind k) {
  switch (k) {
    case StepKind::Start: return "Start";
    case StepKind::SecantThirdPoint: return "SecantThirdPoint";
    case StepKind::LineInSurface: return "LineInSurface";
    case StepKind::AlreadyRational: return "AlreadyRational";
  }
  return "?";
}

int DescentTrace::max_degree() const {
  int d = 0;
  for (const auto& s : steps) d = std::max(d, s.point.max_degree());
  return d;
}

DescentTrace tower_descent(const Pencil& X, std::span<const Elem> w, int a) {
  const FieldPtr& K = X.field();
  if (a < 0 || a > 5) throw Error(ErrorCode::InvalidInput, "witness degree exponent out of range");
  if (w.size() != 4) throw Error(ErrorCode::InvalidInput, "witness needs 4 coordinates");
  FieldPtr Lp = gf::make_field(K->characteristic(), K->degree() << a);
  if (forms::eval_form(X.f, w, Lp) != 0 || forms::eval_form(X.g, w, Lp) != 0)
    throw Error(ErrorCode::InvalidInput, "witness is not on Gamma");
  DescentTrace trace;
  RatPoint cur = normalize(constant_point(Lp, w));
  trace.steps.push_back({1 << a, StepKind::Start, cur});
  for (int j = a; j >= 1; --j) {
    FieldPtr L = gf::make_field(K->characteristic(), K->degree() << (j - 1));
    StepKind kind;
    if (auto down = restrict(cur, L)) {
      cur = normalize(*down);
      kind = StepKind::AlreadyRational;
    } else {
      auto r = secant_third_point(X, cur, L);
      if (auto* t = std::get_if<ThirdPoint>(&r)) {
        cur = t->point;
        kind = StepKind::SecantThirdPoint;
      } else {
        cur = std::get<LinePoint>(r).point;
        kind = StepKind::LineInSurface;
      }
    }
    if (!on_surface(X, cur)) throw Error(ErrorCode::DescentStuck, "descent step left the surface");
    trace.steps.push_back({1 << (j - 1), kind, cur});
  }
  return trace;
}

long double tuples_of_degree(std::uint64_t q, int D) {
  long double qd = std::pow(static_cast<long double>(q), D);
  return (std::pow(qd * q, 4) - std::pow(qd, 4)) / (q - 1);
}

namespace {

// Mixed-radix decoding of one block of normalized tuples of degree exactly D.
struct Block {
  int lead;                // first coordinate of degree D
  std::uint64_t size = 0;  // number of tuples
};

std::uint64_t ipow(std::uint64_t q, int e) {
  std::uint64_t r = 1;
  while (e-- > 0) r *= q;
  return r;
}

}  // namespace

SearchResult search_poly_points(const Pencil& X, int N, const SearchOptions& opt) {
  const FieldPtr& K = X.field();
  const std::uint64_t q = K->size();
  if (N < 0) throw Error(ErrorCode::InvalidInput, "degree bound must be nonnegative");
  if (N > 20) throw Error(ErrorCode::InvalidInput, "degree bound too large");

  // quick rejection at a generator tau of a larger field
  int m = 1;
  while (ipow(q, m + 1) <= gf::kTableCap) ++m;
  FieldPtr E = gf::make_field(K->characteristic(), K->degree() * m);
  auto emb = gf::embedding(K, E);
  const Elem tau = E->root() ? E->root() : 2 % E->size();
  std::vector<Elem> kimg(q);
  for (Elem c = 0; c < q; ++c) kimg[c] = emb->apply(c);
  std::vector<Elem> taupow(N + 1, 1);
  for (int k = 1; k <= N; ++k) taupow[k] = E->mul(taupow[k - 1], tau);
  forms::EmbeddedForm fE(X.f, E), gE(X.g, E);

  std::uint64_t offset = 0, tried = 0;
  for (int D = 0; D <= N; ++D) {
    const std::uint64_t lo = ipow(q, D), hi = ipow(q, D + 1);
    std::vector<Block> blocks;
    for (int lead = 0; lead < 4; ++lead) blocks.push_back({lead, ipow(lo, lead) * lo * ipow(hi, 3 - lead)});
    std::uint64_t total = 0;
    for (const auto& b : blocks) total += b.size;
    const bool exceeded = tried + total > opt.budget;
    const std::uint64_t limit = exceeded ? opt.budget - tried : total;

    // candidate with local rank r; returns true and fills x when it is a point of X
    auto test = [&](std::uint64_t r, RatPoint& x) {
      size_t bi = 0;
      while (r >= blocks[bi].size) r -= blocks[bi++].size;
      const int lead = blocks[bi].lead;
      x.field = K;
      std::array<Elem, 4> val{};
      // least significant digits belong to the last coordinate
      for (int i = 3; i >= 0; --i) {
        int len = i < lead ? D : (i == lead ? D : D + 1);
        Poly c(len + (i == lead ? 1 : 0), 0);
        for (int k = 0; k < len; ++k) {
          c[k] = r % q;
          r /= q;
        }
        if (i == lead) c[D] = 1;
        Elem v = 0;
        for (size_t k = 0; k < c.size(); ++k)
          if (c[k]) v = E->add(v, E->mul(kimg[c[k]], taupow[k]));
        val[i] = v;
        x.coords[i] = std::move(c);
      }
      if (E->add(fE(val), E->mul(tau, gE(val))) != 0) return false;
      for (auto& c : x.coords) gf::trim(c);
      Poly g;
      for (const auto& c : x.coords)
        if (!c.empty()) g = g.empty() ? gf::monic(*K, c) : gf::pgcd(*K, g, c);
      if (gf::deg(g) > 0) return false;
      return on_surface(X, x);
    };

    const int threads = std::max(1, std::min<int>(opt.threads, static_cast<int>(std::min<std::uint64_t>(limit, 1024))));
    std::atomic<std::uint64_t> best{limit};
    std::vector<RatPoint> found(threads);
    std::vector<std::uint64_t> found_rank(threads, limit);
    auto work = [&](int t, std::uint64_t begin, std::uint64_t end) {
      RatPoint x;
      for (std::uint64_t r = begin; r < end && r < best.load(std::memory_order_relaxed); ++r) {
        if (test(r, x)) {
          found[t] = x;
          found_rank[t] = r;
          std::uint64_t cur = best.load();
          while (r < cur && !best.compare_exchange_weak(cur, r)) {
          }
          return;
        }
      }
    };
    if (threads == 1) {
      work(0, 0, limit);
    } else {
      std::vector<std::thread> pool;
      const std::uint64_t chunk = (limit + threads - 1) / threads;
      for (int t = 0; t < threads; ++t)
        pool.emplace_back(work, t, std::min(limit, t * chunk), std::min(limit, (t + 1) * chunk));
      for (auto& th : pool) th.join();
    }
    const std::uint64_t b = best.load();
    if (b < limit) {
      for (int t = 0; t < threads; ++t)
        if (found_rank[t] == b) return Found{normalize(found[t]), offset + b};
    }
    tried += limit;
    offset += total;
    if (exceeded) return NotFoundWithin{N, opt.budget, tried, true};
  }
  return NotFoundWithin{N, opt.budget, tried, false};
}

}  // namespace pencil::surface
