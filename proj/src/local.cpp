#include "pencil/local.hpp"

#include <algorithm>

namespace pencil::local {

using forms::Exps;

std::string poly_string(const Poly& a, char var) {
  std::string s;
  for (size_t k = a.size(); k-- > 0;) {
    if (a[k] == 0) continue;
    if (!s.empty()) s += "+";
    if (a[k] != 1 || k == 0) s += std::to_string(a[k]);
    if (k > 0) {
      if (a[k] != 1) s += "*";
      s += var;
      if (k > 1) s += "^" + std::to_string(k);
    }
  }
  return s.empty() ? "0" : s;
}

std::string place_name(const Place& v) { return v.infinity ? "inf" : poly_string(v.pi); }

Place infinite_place() { return Place{true, {}}; }

Place finite_place(const gf::Field& K, Poly pi) {
  gf::trim(pi);
  if (gf::deg(pi) < 1 || pi.back() != 1) throw Error(ErrorCode::InvalidInput, "place polynomial must be monic of positive degree");
  if (!gf::is_irreducible(K, pi)) throw Error(ErrorCode::InvalidInput, "place polynomial must be irreducible");
  return Place{false, std::move(pi)};
}

std::vector<Place> places_of_degree(const FieldPtr& K, int e) {
  const std::uint64_t q = K->size();
  std::uint64_t count = 1;
  for (int i = 0; i < e; ++i) count *= q;
  std::vector<Place> out;
  for (std::uint64_t code = 0; code < count; ++code) {
    Poly pi(e + 1, 0);
    std::uint64_t c = code;
    for (int i = 0; i < e; ++i) {
      pi[i] = c % q;
      c /= q;
    }
    pi[e] = 1;
    if (gf::is_irreducible(*K, pi)) out.push_back(Place{false, pi});
  }
  return out;
}

FieldPtr residue_field(const FieldPtr& K, const Place& v) {
  return v.infinity ? K : gf::make_field(K->characteristic(), K->degree() * v.degree());
}

Elem residue_tau(const FieldPtr& K, const Place& v) {
  if (v.infinity) return 0;
  FieldPtr E = residue_field(K, v);
  auto emb = gf::embedding(K, E);
  Poly p(v.pi.size());
  for (size_t i = 0; i < p.size(); ++i) p[i] = emb->apply(v.pi[i]);
  gf::Rng rng(0);
  auto r = gf::distinct_roots(*E, p, rng);
  if (r.empty()) throw Error(ErrorCode::InvalidInput, "place polynomial has no root in its residue field");
  return r.front();
}

MPoly reduction_at(const Pencil& P, const Place& v) {
  if (v.infinity) return P.g;
  FieldPtr E = residue_field(P.field(), v);
  return forms::mp_add(forms::mp_embed(P.f, E), forms::mp_scale(forms::mp_embed(P.g, E), residue_tau(P.field(), v)));
}

BadPlaces bad_places(const Pencil& P, int B, const forms::SmoothOptions& opt) {
  BadPlaces r;
  r.bound = B;
  auto bad = [&](const Place& v) { return !std::holds_alternative<forms::Smooth>(forms::is_smooth_finite(reduction_at(P, v), opt)); };
  for (int e = 1; e <= B; ++e)
    for (const auto& v : places_of_degree(P.field(), e))
      if (bad(v)) r.places.push_back(v);
  if (bad(infinite_place())) r.places.push_back(infinite_place());
  return r;
}

const char* local_status_name(LocalStatus s) {
  switch (s) {
    case LocalStatus::GoodReductionAuto: return "GoodReductionAuto";
    case LocalStatus::Soluble: return "Soluble";
    case LocalStatus::InsolubleAtPrecision: return "InsolubleAtPrecision";
    case LocalStatus::Undecided: return "Undecided";
  }
  return "?";
}

const char* overall_name(Overall o) {
  switch (o) {
    case Overall::EverywhereLocallySolubleUpToBounds: return "EverywhereLocallySolubleUpToBounds";
    case Overall::LocalObstructionAt: return "LocalObstructionAt";
    case Overall::Undetermined: return "Undetermined";
  }
  return "?";
}

int valuation(const gf::Field& K, Poly a, const Poly& pi) {
  gf::trim(a);
  if (a.empty()) return kInfiniteValuation;
  int v = 0;
  for (;;) {
    Poly q, r;
    gf::pdivmod(K, a, pi, q, r);
    gf::trim(r);
    if (!r.empty()) return v;
    a = std::move(q);
    ++v;
  }
}

namespace {

// F = F0 + w F1 in the uniformizer variable w, with its partials.
struct Chart {
  FieldPtr K;
  Poly pi;
  MPoly F0, F1;
  std::vector<MPoly> d0, d1;
  int degree;

  Chart(const Pencil& P, const Place& v) : K(P.field()), degree(P.degree) {
    pi = v.infinity ? Poly{0, 1} : v.pi;
    F0 = v.infinity ? P.g : P.f;
    F1 = v.infinity ? P.f : P.g;
    d0 = forms::partials(F0);
    d1 = forms::partials(F1);
  }

  Poly reduce(Poly a, const Poly& mod) const {
    if (mod.empty()) return a;
    a = gf::pmod(*K, a, mod);
    gf::trim(a);
    return a;
  }

  // A(x) + w B(x), reduced modulo mod (exact when mod is empty).
  Poly eval(const MPoly& A, const MPoly& B, const std::array<Poly, 4>& x, const Poly& mod) const {
    const gf::Field& F = *K;
    std::array<std::vector<Poly>, 4> pw;
    for (int i = 0; i < 4; ++i) {
      pw[i].push_back(Poly{1});
      for (int k = 1; k <= degree; ++k) pw[i].push_back(reduce(gf::pmul(F, pw[i].back(), x[i]), mod));
    }
    auto one = [&](const MPoly& H) {
      Poly acc;
      for (const auto& [e, c] : H.terms) {
        Poly t{c};
        for (int i = 0; i < 4; ++i)
          if (e[i]) t = reduce(gf::pmul(F, t, pw[i][e[i]]), mod);
        acc = gf::padd(F, acc, t);
      }
      gf::trim(acc);
      return acc;
    };
    Poly b = one(B);
    if (!b.empty()) b.insert(b.begin(), 0);
    Poly r = gf::padd(F, one(A), b);
    gf::trim(r);
    return reduce(r, mod);
  }

  Poly value(const std::array<Poly, 4>& x, const Poly& mod) const { return eval(F0, F1, x, mod); }
  Poly partial(int i, const std::array<Poly, 4>& x, const Poly& mod) const { return eval(d0[i], d1[i], x, mod); }

  Poly pi_power(int j) const {
    Poly r{1};
    for (int k = 0; k < j; ++k) r = gf::pmul(*K, r, pi);
    return r;
  }
};

// Elements of F_q[w]/(pi) as polynomials of degree < e, indexed by code.
std::vector<Poly> residue_reps(const gf::Field& K, int e) {
  std::uint64_t count = 1;
  for (int i = 0; i < e; ++i) count *= K.size();
  std::vector<Poly> reps(count);
  for (std::uint64_t code = 0; code < count; ++code) {
    Poly a(e, 0);
    std::uint64_t c = code;
    for (int i = 0; i < e; ++i) {
      a[i] = c % K.size();
      c /= K.size();
    }
    gf::trim(a);
    reps[code] = a;
  }
  return reps;
}

Poly residue_inverse(const Chart& c, const Poly& a, std::uint64_t residue_size) {
  return gf::ppowmod(*c.K, a, residue_size - 2, c.pi);
}

}  // namespace

std::pair<int, int> hensel_valuations(const Pencil& P, const Place& v, const std::array<Poly, 4>& x) {
  Chart c(P, v);
  int vf = valuation(*c.K, c.value(x, {}), c.pi);
  int k = kInfiniteValuation;
  for (int i = 0; i < 4; ++i) k = std::min(k, valuation(*c.K, c.partial(i, x, {}), c.pi));
  return {vf, k};
}

std::optional<std::array<Poly, 4>> refine(const Pencil& P, const Place& v, const std::array<Poly, 4>& x) {
  Chart c(P, v);
  auto [vf, k] = hensel_valuations(P, v, x);
  if (vf >= kInfiniteValuation) return x;
  if (k >= kInfiniteValuation || vf <= 2 * k) return std::nullopt;
  int i = 0;
  while (valuation(*c.K, c.partial(i, x, {}), c.pi) != k) ++i;
  const Poly step = c.pi_power(vf - k);
  for (const auto& d : residue_reps(*c.K, v.degree())) {
    auto y = x;
    y[i] = gf::padd(*c.K, y[i], gf::pmul(*c.K, step, d));
    gf::trim(y[i]);
    if (valuation(*c.K, c.value(y, {}), c.pi) > vf) return y;
  }
  return std::nullopt;
}

std::optional<Point4> residue_point(const Pencil& P, const Place& v) {
  FieldPtr E = residue_field(P.field(), v);
  forms::EmbeddedForm F(reduction_at(P, v), E);
  std::optional<Point4> found;
  forms::for_each_projective_point(4, *E, [&](std::span<const Elem> pt) {
    if (F(pt) != 0) return false;
    found = Point4{pt[0], pt[1], pt[2], pt[3]};
    return true;
  });
  return found;
}

LocalVerdict locally_soluble(const Pencil& P, const Place& v, const LocalOptions& opt) {
  LocalVerdict out;
  out.place = v;
  const MPoly red = reduction_at(P, v);
  out.bad_reduction = !std::holds_alternative<forms::Smooth>(forms::is_smooth_finite(red, opt.smooth));
  out.residue_point = residue_point(P, v);
  if (!out.bad_reduction) {
    if (out.residue_point) {
      out.status = LocalStatus::GoodReductionAuto;
      out.precision = 1;
      out.notes = "smooth reduction with a residue point; Hensel lifts it";
    } else {
      out.status = LocalStatus::Undecided;
      out.notes = "smooth reduction without a residue point";
    }
    return out;
  }
  if (!out.residue_point) {
    out.status = LocalStatus::InsolubleAtPrecision;
    out.precision = 1;
    out.notes = "no point modulo the uniformizer";
    return out;
  }

  // Breadth-first lifting in F_q[w]/(pi^j). Representatives are normalized:
  // the first coordinate that is a unit mod pi equals 1.
  Chart c(P, v);
  const gf::Field& K = *c.K;
  const int e = v.degree();
  FieldPtr E = residue_field(c.K, v);
  const Elem tau = residue_tau(c.K, v);
  const auto reps = residue_reps(K, e);
  const std::uint64_t rsize = reps.size();
  // residue representative with a given value at tau
  std::vector<std::uint64_t> rep_of(rsize);
  {
    auto emb = gf::embedding(c.K, E);
    for (std::uint64_t code = 0; code < rsize; ++code) {
      Elem val = 0;
      for (size_t k = reps[code].size(); k-- > 0;) val = E->add(E->mul(val, tau), emb->apply(reps[code][k]));
      rep_of[val] = code;
    }
  }

  struct Branch {
    std::array<Poly, 4> x;
    int lead;
  };
  std::vector<Branch> level;
  forms::EmbeddedForm Fred(red, E);
  forms::for_each_projective_point(4, *E, [&](std::span<const Elem> pt) {
    if (Fred(pt) != 0) return false;
    Branch b;
    b.lead = 0;
    while (pt[b.lead] == 0) ++b.lead;
    for (int i = 0; i < 4; ++i) b.x[i] = reps[rep_of[pt[i]]];
    level.push_back(std::move(b));
    return level.size() > opt.branch_budget;
  });
  out.branches = level.size();

  for (int j = 1; j <= opt.precision; ++j) {
    if (out.branches > opt.branch_budget) {
      out.status = LocalStatus::Undecided;
      out.precision = j;
      out.notes = "branch budget exhausted";
      return out;
    }
    const int h = (j + 1) / 2;
    const Poly mod_h = c.pi_power(h), mod_next = c.pi_power(j + 1), mod_j = c.pi_power(j);
    // Hensel margin: v(F) >= j > 2k
    for (const auto& b : level) {
      for (int i = 0; i < 4; ++i) {
        if (valuation(K, c.partial(i, b.x, mod_h), c.pi) < h) {
          out.status = LocalStatus::Soluble;
          out.witness = b.x;
          out.precision = j;
          out.notes = "Hensel margin reached at precision " + std::to_string(j);
          return out;
        }
      }
    }
    if (j == opt.precision) break;
    // lifts x + pi^j delta solve F(x)/pi^j + sum delta_i dF_i(x) = 0 mod pi
    std::vector<Branch> next;
    for (const auto& b : level) {
      Poly c0 = gf::pdiv(K, c.value(b.x, mod_next), mod_j);
      gf::trim(c0);
      std::array<Poly, 4> ci;
      int pivot = -1;
      for (int i = 0; i < 4; ++i) {
        ci[i] = c.partial(i, b.x, c.pi);
        if (i != b.lead && !ci[i].empty() && pivot < 0) pivot = i;
      }
      std::vector<int> free_vars;
      for (int i = 0; i < 4; ++i)
        if (i != b.lead && i != pivot) free_vars.push_back(i);
      if (pivot < 0) {
        c0 = c.reduce(c0, c.pi);
        if (!c0.empty()) continue;  // F(x) / pi^j is a unit for every lift
      }
      Poly inv = pivot >= 0 ? residue_inverse(c, ci[pivot], E->size()) : Poly{};
      std::uint64_t combos = 1;
      for (size_t k = 0; k < free_vars.size(); ++k) combos *= rsize;
      for (std::uint64_t code = 0; code < combos; ++code) {
        std::array<Poly, 4> delta;
        std::uint64_t cc = code;
        Poly rhs = c0;
        for (int i : free_vars) {
          delta[i] = reps[cc % rsize];
          cc /= rsize;
          rhs = gf::padd(K, rhs, gf::pmul(K, ci[i], delta[i]));
        }
        if (pivot >= 0) delta[pivot] = c.reduce(gf::pmul(K, gf::pscale(K, rhs, K.neg(1)), inv), c.pi);
        Branch nb = b;
        for (int i = 0; i < 4; ++i) {
          if (delta[i].empty()) continue;
          nb.x[i] = gf::padd(K, nb.x[i], gf::pmul(K, mod_j, delta[i]));
          gf::trim(nb.x[i]);
        }
        next.push_back(std::move(nb));
        if (out.branches + next.size() > opt.branch_budget) break;
      }
      if (out.branches + next.size() > opt.branch_budget) break;
    }
    out.branches += next.size();
    if (next.empty()) {
      out.status = LocalStatus::InsolubleAtPrecision;
      out.precision = j + 1;
      out.notes = "no solution modulo pi^" + std::to_string(j + 1);
      return out;
    }
    level = std::move(next);
  }
  out.status = LocalStatus::Undecided;
  out.precision = opt.precision;
  out.notes = "live branches without Hensel margin at the precision bound";
  return out;
}

LocalReport everywhere_locally(const Pencil& P, int B, const LocalOptions& opt) {
  LocalReport r;
  r.bound = B;
  r.precision = opt.precision;
  r.bad = bad_places(P, B, opt.smooth).places;
  auto is_bad = [&](const Place& v) { return std::find(r.bad.begin(), r.bad.end(), v) != r.bad.end(); };
  for (int e = 1; e <= B; ++e)
    for (const auto& v : places_of_degree(P.field(), e))
      if (e <= 2 || is_bad(v)) r.verdicts.push_back(locally_soluble(P, v, opt));
  r.verdicts.push_back(locally_soluble(P, infinite_place(), opt));
  bool undecided = false;
  for (const auto& v : r.verdicts) {
    if (v.status == LocalStatus::InsolubleAtPrecision && !r.obstruction) r.obstruction = v.place;
    if (v.status == LocalStatus::Undecided) undecided = true;
  }
  if (r.obstruction) r.overall = Overall::LocalObstructionAt;
  else if (undecided) r.overall = Overall::Undetermined;
  else r.overall = Overall::EverywhereLocallySolubleUpToBounds;
  r.caveat = "places of degree > " + std::to_string(B) +
             " are assumed to have good reduction; InsolubleAtPrecision is evidence, not a proof";
  return r;
}

}  // namespace pencil::local
