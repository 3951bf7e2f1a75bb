#include "pencil/upoly.hpp"

#include <algorithm>

namespace pencil::gf {

void trim(Poly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

Poly padd(const Field& F, const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] = F.add(r[i], b[i]);
  trim(r);
  return r;
}

Poly psub(const Field& F, const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] = F.sub(r[i], b[i]);
  trim(r);
  return r;
}

Poly pmul(const Field& F, const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j) r[i + j] = F.add(r[i + j], F.mul(a[i], b[j]));
  }
  trim(r);
  return r;
}

Poly pscale(const Field& F, const Poly& a, Elem c) {
  if (c == 0) return {};
  Poly r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = F.mul(a[i], c);
  return r;
}

void pdivmod(const Field& F, const Poly& a, const Poly& b, Poly& q, Poly& r) {
  if (b.empty()) throw Error(ErrorCode::ZeroPolynomial, "division by the zero polynomial");
  r = a;
  trim(r);
  if (r.size() < b.size()) {
    q.clear();
    return;
  }
  q.assign(r.size() - b.size() + 1, 0);
  const Elem lead_inv = F.inv(b.back());
  const size_t db = b.size() - 1;
  for (size_t i = r.size(); i-- > db;) {
    if (r[i] == 0) continue;
    Elem c = F.mul(r[i], lead_inv);
    q[i - db] = c;
    for (size_t j = 0; j <= db; ++j) r[i - db + j] = F.sub(r[i - db + j], F.mul(c, b[j]));
  }
  trim(r);
  trim(q);
}

Poly pdiv(const Field& F, const Poly& a, const Poly& b) {
  Poly q, r;
  pdivmod(F, a, b, q, r);
  return q;
}

Poly pmod(const Field& F, const Poly& a, const Poly& b) {
  if (b.empty()) throw Error(ErrorCode::ZeroPolynomial, "reduction by the zero polynomial");
  if (a.size() < b.size()) {
    Poly r = a;
    trim(r);
    return r;
  }
  Poly r = a;
  const Elem lead_inv = F.inv(b.back());
  const size_t db = b.size() - 1;
  for (size_t i = r.size(); i-- > db;) {
    if (r[i] == 0) continue;
    Elem c = F.mul(r[i], lead_inv);
    for (size_t j = 0; j <= db; ++j) r[i - db + j] = F.sub(r[i - db + j], F.mul(c, b[j]));
  }
  r.resize(db);
  trim(r);
  return r;
}

Poly monic(const Field& F, const Poly& a) {
  if (a.empty() || a.back() == 1) return a;
  return pscale(F, a, F.inv(a.back()));
}

Poly pgcd(const Field& F, Poly a, Poly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = pmod(F, a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return monic(F, a);
}

Poly pderiv(const Field& F, const Poly& a) {
  if (a.size() <= 1) return {};
  Poly r(a.size() - 1);
  for (size_t i = 1; i < a.size(); ++i) r[i - 1] = F.mul(a[i], F.from_int(static_cast<std::int64_t>(i % F.characteristic())));
  trim(r);
  return r;
}

Elem peval(const Field& F, const Poly& a, Elem x) {
  Elem acc = 0;
  for (size_t i = a.size(); i-- > 0;) acc = F.add(F.mul(acc, x), a[i]);
  return acc;
}

Poly pmulmod(const Field& F, const Poly& a, const Poly& b, const Poly& m) { return pmod(F, pmul(F, a, b), m); }

namespace {

// r (length <= 2n - 1) reduced in place modulo the monic m of degree n.
void reduce_monic(const Field& F, Poly& r, const Poly& m) {
  const size_t n = m.size() - 1;
  for (size_t i = r.size(); i-- > n;) {
    const Elem c = r[i];
    if (c == 0) continue;
    for (size_t j = 0; j < n; ++j)
      if (m[j] != 0) r[i - n + j] = F.sub(r[i - n + j], F.mul(c, m[j]));
  }
  r.resize(std::min(r.size(), n));
}

void mul_into(const Field& F, const Poly& a, const Poly& b, Poly& out) {
  out.assign(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j)
      if (b[j] != 0) out[i + j] = F.add(out[i + j], F.mul(a[i], b[j]));
  }
}

}  // namespace

Poly ppowmod(const Field& F, Poly base, std::uint64_t e, const Poly& m) {
  Poly mm = m;
  trim(mm);
  mm = monic(F, mm);
  if (mm.empty()) throw Error(ErrorCode::ZeroPolynomial, "reduction by the zero polynomial");
  const size_t n = mm.size() - 1;
  if (n == 0) return {};
  base = pmod(F, base, mm);
  if (e == 0 || base.empty()) {
    Poly r = e == 0 ? Poly{1} : Poly{};
    return pmod(F, r, mm);
  }
  const bool is_x = n > 1 && base.size() == 2 && base[0] == 0 && base[1] == 1;
  // left to right; multiplying by x is a shift and one reduction step
  int top = 63;
  while (!((e >> top) & 1)) --top;
  Poly r = base, tmp;
  for (int bit = top - 1; bit >= 0; --bit) {
    mul_into(F, r, r, tmp);
    reduce_monic(F, tmp, mm);
    std::swap(r, tmp);
    if ((e >> bit) & 1) {
      if (is_x) {
        r.insert(r.begin(), 0);
        reduce_monic(F, r, mm);
      } else {
        mul_into(F, r, base, tmp);
        reduce_monic(F, tmp, mm);
        std::swap(r, tmp);
      }
    }
  }
  trim(r);
  return r;
}

Poly x_frobenius_mod(const Field& F, int k, const Poly& m) {
  Poly r = pmod(F, Poly{0, 1}, m);
  for (int i = 0; i < k; ++i) r = ppowmod(F, r, F.size(), m);
  return r;
}

namespace {

Elem random_elem(const Field& F, Rng& rng) { return rng() % F.size(); }

// Splits a squarefree product of distinct irreducibles of degree d into its
// factors. Appends monic factors to out.
void equal_degree_split(const Field& F, const Poly& h, int d, Rng& rng, std::vector<Poly>& out) {
  const int n = deg(h);
  if (n <= d) {
    out.push_back(monic(F, h));
    return;
  }
  if (d == 1 && F.size() <= 64) {
    for (Elem x = 0; x < F.size(); ++x)
      if (peval(F, h, x) == 0) out.push_back(Poly{F.neg(x), 1});
    return;
  }
  const int k = F.degree();
  for (;;) {
    Poly r(n);
    for (auto& c : r) c = random_elem(F, rng);
    trim(r);
    if (deg(r) < 1) continue;
    Poly t;
    if (F.characteristic() == 2) {
      // Absolute trace of r over F_2 inside F[x]/(h) restricted to F_{Q^d}.
      Poly acc = r, cur = r;
      for (int i = 1; i < k * d; ++i) {
        cur = pmulmod(F, cur, cur, h);
        acc = padd(F, acc, cur);
      }
      t = acc;
    } else {
      // r^((Q^d - 1)/2) = N(r)^((Q-1)/2) with N(r) = r^(1 + Q + ... + Q^(d-1)).
      Poly norm = r, cur = r;
      for (int i = 1; i < d; ++i) {
        cur = ppowmod(F, cur, F.size(), h);
        norm = pmulmod(F, norm, cur, h);
      }
      t = ppowmod(F, norm, (F.size() - 1) / 2, h);
      t = psub(F, t, Poly{1});
    }
    Poly g = pgcd(F, h, t);
    if (deg(g) > 0 && deg(g) < n) {
      equal_degree_split(F, g, d, rng, out);
      equal_degree_split(F, pdiv(F, h, g), d, rng, out);
      return;
    }
  }
}

Poly pth_root(const Field& F, const Poly& a) {
  const std::uint64_t p = F.characteristic();
  Poly r((a.size() + p - 1) / p, 0);
  const std::uint64_t e = F.size() / p;  // a^(Q/p) is the p-th root
  for (size_t i = 0; i < a.size(); i += p) r[i / p] = F.pow(a[i], e);
  trim(r);
  return r;
}

// Product of the distinct monic irreducible factors of f.
Poly radical(const Field& F, const Poly& f) {
  if (deg(f) <= 0) return Poly{1};
  Poly d = pderiv(F, f);
  if (d.empty()) return radical(F, pth_root(F, f));
  Poly c = pgcd(F, f, d);
  Poly w = monic(F, pdiv(F, f, c));
  for (;;) {
    Poly g = pgcd(F, c, w);
    if (deg(g) <= 0) break;
    c = pdiv(F, c, g);
  }
  if (deg(c) <= 0) return w;
  return pmul(F, w, radical(F, pth_root(F, c)));
}

int multiplicity(const Field& F, Poly f, const Poly& g) {
  int m = 0;
  for (;;) {
    Poly q, r;
    pdivmod(F, f, g, q, r);
    if (!r.empty()) return m;
    ++m;
    f = std::move(q);
  }
}

bool poly_less(const Poly& a, const Poly& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

}  // namespace

std::vector<Elem> distinct_roots(const Field& F, const Poly& f_in, Rng& rng) {
  Poly f = f_in;
  trim(f);
  if (f.empty()) throw Error(ErrorCode::ZeroPolynomial, "roots of the zero polynomial");
  std::vector<Elem> out;
  if (deg(f) == 0) return out;
  if (F.size() <= 16 || (F.size() <= 256 && deg(f) > 6)) {
    for (Elem x = 0; x < F.size(); ++x)
      if (peval(F, f, x) == 0) out.push_back(x);
    return out;
  }
  f = monic(F, f);
  Poly h;
  if (deg(f) == 1) {
    h = f;
  } else {
    Poly xq = ppowmod(F, Poly{0, 1}, F.size(), f);
    h = pgcd(F, f, psub(F, xq, Poly{0, 1}));
  }
  if (deg(h) <= 0) return out;
  std::vector<Poly> lin;
  equal_degree_split(F, h, 1, rng, lin);
  for (const auto& l : lin) out.push_back(F.neg(l[0]));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Elem> roots(const Field& F, const Poly& f_in, Rng& rng) {
  Poly f = f_in;
  trim(f);
  std::vector<Elem> distinct = distinct_roots(F, f, rng);
  std::vector<Elem> out;
  for (Elem r : distinct) {
    int m = multiplicity(F, f, Poly{F.neg(r), 1});
    for (int i = 0; i < m; ++i) out.push_back(r);
  }
  return out;
}

std::vector<std::pair<Poly, int>> factor(const Field& F, const Poly& f_in, Rng& rng) {
  Poly f = f_in;
  trim(f);
  if (f.empty()) throw Error(ErrorCode::ZeroPolynomial, "factoring the zero polynomial");
  std::vector<std::pair<Poly, int>> out;
  if (deg(f) == 0) return out;
  Poly rad = monic(F, radical(F, f));
  // Distinct-degree factorization of the squarefree radical.
  std::vector<Poly> irreducibles;
  Poly rest = rad;
  Poly xq = Poly{0, 1};
  for (int d = 1; 2 * d <= deg(rest); ++d) {
    xq = ppowmod(F, xq, F.size(), rest);
    Poly g = pgcd(F, rest, psub(F, xq, Poly{0, 1}));
    if (deg(g) > 0) {
      equal_degree_split(F, g, d, rng, irreducibles);
      rest = pdiv(F, rest, g);
      xq = pmod(F, xq, rest);
    }
  }
  if (deg(rest) > 0) irreducibles.push_back(monic(F, rest));
  std::sort(irreducibles.begin(), irreducibles.end(), poly_less);
  for (auto& g : irreducibles) {
    int m = multiplicity(F, f, g);
    out.emplace_back(std::move(g), m);
  }
  return out;
}

bool is_irreducible(const Field& F, const Poly& f_in) {
  Poly f = f_in;
  trim(f);
  const int n = deg(f);
  if (n <= 0) return false;
  if (n == 1) return true;
  f = monic(F, f);
  const Poly x{0, 1};
  // Rabin: x^(Q^n) = x mod f and gcd(x^(Q^(n/r)) - x, f) = 1 for primes r | n.
  std::vector<int> primes;
  for (int r = 2, m = n; r <= m; ++r) {
    if (m % r == 0) {
      primes.push_back(r);
      while (m % r == 0) m /= r;
    }
  }
  std::vector<Poly> powers(n + 1);
  powers[0] = x;
  for (int i = 1; i <= n; ++i) powers[i] = ppowmod(F, powers[i - 1], F.size(), f);
  if (psub(F, powers[n], x) != Poly{}) return false;
  for (int r : primes) {
    Poly g = pgcd(F, f, psub(F, powers[n / r], x));
    if (deg(g) > 0) return false;
  }
  return true;
}

std::vector<FieldElem> poly_roots(const UniPoly& f, const FieldPtr& K, std::uint64_t seed) {
  if (f.is_zero()) throw Error(ErrorCode::ZeroPolynomial, "poly_roots of the zero polynomial");
  auto emb = embedding(f.field, K);
  Poly g(f.coeffs.size());
  for (size_t i = 0; i < g.size(); ++i) g[i] = emb->apply(f.coeffs[i]);
  Rng rng(seed);
  std::vector<FieldElem> out;
  for (Elem r : roots(*K, g, rng)) out.emplace_back(K, r);
  return out;
}

std::vector<std::pair<UniPoly, int>> poly_factor(const UniPoly& f, std::uint64_t seed) {
  if (f.is_zero()) throw Error(ErrorCode::ZeroPolynomial, "poly_factor of the zero polynomial");
  Rng rng(seed);
  std::vector<std::pair<UniPoly, int>> out;
  for (auto& [g, m] : factor(*f.field, f.coeffs, rng)) out.push_back({UniPoly{f.field, g}, m});
  return out;
}

}  // namespace pencil::gf
