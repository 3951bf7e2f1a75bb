#include "pencil/fixtures.hpp"

#include <algorithm>
#include <optional>

namespace pencil::fixtures {

using forms::Exps;
using gamma::Pattern;

MPoly random_form(const FieldPtr& K, int d, Rng& rng, int nvars) {
  MPoly f{K, nvars, {}};
  while (f.is_zero()) {
    for (int a = 0; a <= d; ++a)
      for (int b = 0; a + b <= d; ++b)
        for (int c = 0; a + b + c <= d; ++c) {
          int e = d - a - b - c;
          if (nvars == 3 && e) continue;
          f.add_term(Exps{std::uint8_t(a), std::uint8_t(b), std::uint8_t(c), std::uint8_t(e)}, rng() % K->size());
        }
  }
  return f;
}

Matrix4 random_invertible(const gf::Field& K, Rng& rng) {
  for (;;) {
    Matrix4 M{};
    for (auto& row : M)
      for (auto& x : row) x = rng() % K.size();
    try {
      forms::mat_inverse(K, M);
      return M;
    } catch (const Error&) {
    }
  }
}

MPoly norm_form(const MPoly& l, const FieldPtr& K) {
  const int m = l.field->degree() / K->degree();
  MPoly prod = l, cur = l;
  for (int k = 1; k < m; ++k) {
    cur = forms::mp_frobenius(cur, *K);
    prod = forms::mp_mul(prod, cur);
  }
  return forms::mp_restrict(prod, K);
}

namespace {

using Row = std::array<Elem, 4>;

Row coeff_row(const MPoly& l) {
  Row r{};
  for (const auto& [e, c] : l.terms)
    for (int i = 0; i < 4; ++i)
      if (e[i]) r[i] = c;
  return r;
}

int rank(std::vector<Row> rows, const gf::Field& E) {
  int r = 0;
  for (int col = 0; col < 4 && r < static_cast<int>(rows.size()); ++col) {
    int piv = -1;
    for (int i = r; i < static_cast<int>(rows.size()); ++i)
      if (rows[i][col]) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(rows[piv], rows[r]);
    Elem inv = E.inv(rows[r][col]);
    for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
      if (i == r || rows[i][col] == 0) continue;
      Elem f = E.mul(rows[i][col], inv);
      for (int j = 0; j < 4; ++j) rows[i][j] = E.sub(rows[i][j], E.mul(f, rows[r][j]));
    }
    ++r;
  }
  return r;
}

std::vector<MPoly> conjugates(const MPoly& l, const FieldPtr& K) {
  std::vector<MPoly> out{l};
  const int m = l.field->degree() / K->degree();
  for (int k = 1; k < m; ++k) out.push_back(forms::mp_frobenius(out.back(), *K));
  return out;
}

// F restricted to the plane l = 0, as a ternary form over the field of l.
MPoly restrict_to_plane(const MPoly& F, const MPoly& l) {
  const auto& E = l.field;
  Row c = coeff_row(l);
  int piv = 0;
  while (c[piv] == 0) ++piv;
  Matrix4 M{};
  int col = 0;
  for (int j = 0; j < 4; ++j) {
    if (j == piv) continue;
    M[j][col] = 1;
    M[piv][col] = E->neg(E->div(c[j], c[piv]));
    ++col;
  }
  M[piv][3] = 1;
  MPoly G = forms::linear_change(forms::mp_embed(F, E), M);
  MPoly T{E, 3, {}};
  for (const auto& [e, v] : G.terms)
    if (e[3] == 0) T.add_term(e, v);
  return T;
}

bool plane_curve_smooth(const MPoly& T) {
  if (T.is_zero()) return false;
  std::vector<MPoly> polys = forms::partials(T);
  polys.push_back(T);
  forms::ZeroSolver solver(polys, 3, T.field);
  return solver.provably_empty();
}

}  // namespace

MPoly independent_linear_form(const FieldPtr& K, int m, Rng& rng) {
  FieldPtr E = gf::make_field(K->characteristic(), K->degree() * m);
  for (;;) {
    MPoly l = random_form(E, 1, rng);
    std::vector<Row> rows;
    for (const auto& c : conjugates(l, K)) rows.push_back(coeff_row(c));
    if (rank(rows, *E) == m) return l;
  }
}

std::pair<MPoly, MPoly> disguise(const MPoly& f, const MPoly& g, Rng& rng) {
  const auto& K = *f.field;
  Matrix4 M = random_invertible(K, rng);
  MPoly fm = forms::linear_change(f, M), gm = forms::linear_change(g, M);
  for (;;) {
    Elem a = rng() % K.size(), b = rng() % K.size(), c = rng() % K.size(), d = rng() % K.size();
    if (K.sub(K.mul(a, d), K.mul(b, c)) == 0) continue;
    return {forms::mp_add(forms::mp_scale(fm, a), forms::mp_scale(gm, b)),
            forms::mp_add(forms::mp_scale(fm, c), forms::mp_scale(gm, d))};
  }
}

namespace {

using Vec4 = std::array<Elem, 4>;

// Basis of {v : A v = 0} over K.
std::vector<std::vector<Elem>> nullspace(std::vector<std::vector<Elem>> A, int cols, const gf::Field& K) {
  std::vector<int> pivots;
  size_t r = 0;
  for (int c = 0; c < cols && r < A.size(); ++c) {
    size_t p = r;
    while (p < A.size() && A[p][c] == 0) ++p;
    if (p == A.size()) continue;
    std::swap(A[p], A[r]);
    const Elem inv = K.inv(A[r][c]);
    for (auto& x : A[r]) x = K.mul(x, inv);
    for (size_t i = 0; i < A.size(); ++i) {
      if (i == r || A[i][c] == 0) continue;
      const Elem m = A[i][c];
      for (int j = 0; j < cols; ++j) A[i][j] = K.sub(A[i][j], K.mul(m, A[r][j]));
    }
    pivots.push_back(c);
    ++r;
  }
  std::vector<std::vector<Elem>> basis;
  for (int fc = 0; fc < cols; ++fc) {
    if (std::find(pivots.begin(), pivots.end(), fc) != pivots.end()) continue;
    std::vector<Elem> v(cols, 0);
    v[fc] = 1;
    for (size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = K.neg(A[i][fc]);
    basis.push_back(std::move(v));
  }
  return basis;
}

// Row echelon form of the 2 x 4 matrix spanned by a line; equal lines give
// equal keys.
std::array<Vec4, 2> line_key(std::array<Vec4, 2> m, const gf::Field& E) {
  int row = 0;
  for (int c = 0; c < 4 && row < 2; ++c) {
    int p = row;
    while (p < 2 && m[p][c] == 0) ++p;
    if (p == 2) continue;
    std::swap(m[p], m[row]);
    const Elem inv = E.inv(m[row][c]);
    for (auto& x : m[row]) x = E.mul(x, inv);
    const int other = 1 - row;
    if (m[other][c] != 0) {
      const Elem k = m[other][c];
      for (int j = 0; j < 4; ++j) m[other][j] = E.sub(m[other][j], E.mul(k, m[row][j]));
    }
    ++row;
  }
  return m;
}

// A line of F = 0 through its point P, searching the tangent plane.
std::optional<std::array<Vec4, 2>> line_through(const forms::EmbeddedForm& F, const std::vector<forms::EmbeddedForm>& grad,
                                                const Vec4& P, const gf::Field& E) {
  Vec4 g;
  for (int i = 0; i < 4; ++i) g[i] = grad[i](P);
  int k = 0;
  while (k < 4 && g[k] == 0) ++k;
  if (k == 4) return std::nullopt;
  std::vector<Vec4> tangent;
  for (int j = 0; j < 4; ++j) {
    if (j == k) continue;
    Vec4 d{};
    d[j] = 1;
    d[k] = E.neg(E.div(g[j], g[k]));
    tangent.push_back(d);
  }
  // two tangent directions independent of P
  auto key = [&](const Vec4& a, const Vec4& b) { return line_key({a, b}, E); };
  for (size_t a = 0; a < tangent.size(); ++a)
    for (size_t b = a + 1; b < tangent.size(); ++b) {
      auto m = key(P, tangent[a]);
      // tangent[b] outside span(P, tangent[a])
      Vec4 r = tangent[b];
      for (const auto& row : m) {
        int c = 0;
        while (c < 4 && row[c] == 0) ++c;
        if (c < 4 && r[c] != 0) {
          const Elem s = r[c];
          for (int j = 0; j < 4; ++j) r[j] = E.sub(r[j], E.mul(s, row[j]));
        }
      }
      if (std::all_of(r.begin(), r.end(), [](Elem x) { return x == 0; })) continue;
      const Elem s1 = 1, s2 = E.root(), s3 = E.mul(s2, s2);
      auto on_line = [&](const Vec4& d) {
        for (Elem s : {s1, s2, s3}) {
          Vec4 x;
          for (int i = 0; i < 4; ++i) x[i] = E.add(P[i], E.mul(s, d[i]));
          if (F(x) != 0) return false;
        }
        return true;
      };
      if (on_line(tangent[b])) return key(P, tangent[b]);
      for (Elem u = 0; u < E.size(); ++u) {
        Vec4 d;
        for (int i = 0; i < 4; ++i) d[i] = E.add(tangent[a][i], E.mul(u, tangent[b][i]));
        if (on_line(d)) return key(P, d);
      }
      return std::nullopt;
    }
  return std::nullopt;
}

// Cubic pencil over F_2 whose base curve is one Frobenius orbit of nine lines
// on a smooth cubic surface: Frobenius then acts on the 27 lines with order 9
// and each orbit is cut out by a second cubic.
std::pair<MPoly, MPoly> nine_lines(const FieldPtr& K, Rng& rng) {
  if (K->size() != 2) throw Error(ErrorCode::InvalidInput, "nine-line fixtures are only built over F_2");
  auto E = gf::make_field(2, 9);
  std::vector<Exps> monos;
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; a + b <= 3; ++b)
      for (int c = 0; a + b + c <= 3; ++c) monos.push_back(Exps{std::uint8_t(a), std::uint8_t(b), std::uint8_t(c), std::uint8_t(3 - a - b - c)});
  for (;;) {
    MPoly f = random_form(K, 3, rng);
    if (!std::holds_alternative<forms::Smooth>(forms::is_smooth_finite(f))) continue;
    forms::EmbeddedForm F(f, E);
    std::vector<forms::EmbeddedForm> grad;
    for (const auto& d : forms::partials(f)) grad.emplace_back(d, E);
    std::vector<forms::EmbeddedForm> cx;
    for (const auto& m : forms::coefficients_in(f, 3)) cx.emplace_back(m, E);

    std::optional<std::array<Vec4, 2>> line;
    for (int tries = 0; tries < 2000 && !line; ++tries) {
      std::array<Elem, 3> y{rng() % E->size(), rng() % E->size(), rng() % E->size()};
      if (y[0] == 0 && y[1] == 0 && y[2] == 0) continue;
      gf::Poly u(cx.size());
      for (size_t k = 0; k < cx.size(); ++k) u[k] = cx[k](y);
      gf::trim(u);
      if (gf::deg(u) < 1) continue;
      for (Elem r : gf::distinct_roots(*E, u, rng)) {
        auto L = line_through(F, grad, Vec4{y[0], y[1], y[2], r}, *E);
        if (!L) continue;
        // orbit of size exactly 9
        auto c = *L;
        int size = 0;
        do {
          for (auto& row : c)
            for (auto& x : row) x = E->frobenius(x, 2);
          c = line_key(c, *E);
          ++size;
        } while (c != *L);
        if (size == 9) line = L;
        break;
      }
    }
    if (!line) continue;

    // cubics over F_2 through the orbit: 4 points on each line
    auto monomial_values = [&](const Vec4& x) {
      std::vector<Elem> v;
      for (const auto& m : monos) {
        Elem y = 1;
        for (int i = 0; i < 4; ++i) y = E->mul(y, E->pow(x[i], m[i]));
        v.push_back(y);
      }
      return v;
    };
    std::vector<std::vector<Elem>> rows;
    auto c = *line;
    for (int i = 0; i < 9; ++i) {
      for (Elem s : {Elem{0}, Elem{1}, E->root()}) {
        Vec4 x;
        for (int j = 0; j < 4; ++j) x[j] = E->add(c[0][j], E->mul(s, c[1][j]));
        rows.push_back(monomial_values(x));
      }
      rows.push_back(monomial_values(c[1]));
      for (auto& row : c)
        for (auto& x : row) x = E->frobenius(x, 2);
      c = line_key(c, *E);
    }
    std::vector<std::vector<Elem>> bits;
    for (const auto& row : rows)
      for (int k = 0; k < 9; ++k) {
        bits.emplace_back();
        for (Elem v : row) bits.back().push_back((v >> k) & 1);
      }
    auto basis = nullspace(bits, static_cast<int>(monos.size()), *K);
    if (basis.size() != 2) continue;
    MPoly g{K, 4, {}};
    for (const auto& v : basis) {
      MPoly h{K, 4, {}};
      for (size_t i = 0; i < monos.size(); ++i) h.add_term(monos[i], v[i]);
      if (!(h == f)) {
        g = h;
        break;
      }
    }
    try {
      auto P = forms::pencil_validate(f, g);
      auto C = gamma::count_sequence(P, 9, {1u << 10, 1});
      // no closed points of degree < 9
      bool ok = true;
      for (int n = 1; n < 9; ++n) ok &= C.N[n] == 0;
      if (!ok || C.N[9] == 0) continue;
      return {f, g};
    } catch (const Error&) {
    }
  }
}

}  // namespace

std::pair<MPoly, MPoly> splitting_fixture(Pattern pattern, const FieldPtr& K, Rng& rng) {
  for (;;) {
    MPoly l = independent_linear_form(K, 3, rng);
    MPoly f = norm_form(l, K);
    const auto planes = conjugates(l, K);
    const auto& E = l.field;
    auto independent_of_planes = [&](const std::vector<MPoly>& extra) {
      for (const auto& p : planes) {
        std::vector<Row> rows{coeff_row(p)};
        for (const auto& x : extra) rows.push_back(coeff_row(forms::mp_embed(x, E)));
        if (rank(rows, *E) != static_cast<int>(rows.size())) return false;
      }
      return true;
    };
    MPoly g;
    bool ok = true;
    switch (pattern) {
      case Pattern::TripleConjugateLines: {
        MPoly u = random_form(K, 1, rng);
        ok = independent_of_planes({u});
        g = forms::mp_mul(u, forms::mp_mul(u, u));
        break;
      }
      case Pattern::DoubleLinesPlusLines: {
        MPoly u = random_form(K, 1, rng), v = random_form(K, 1, rng);
        ok = independent_of_planes({u, v});
        g = forms::mp_mul(forms::mp_mul(u, u), v);
        break;
      }
      case Pattern::ConicsPlusLines: {
        MPoly u = random_form(K, 1, rng), Q = random_form(K, 2, rng);
        ok = independent_of_planes({u}) && plane_curve_smooth(restrict_to_plane(Q, l));
        g = forms::mp_mul(u, Q);
        break;
      }
      case Pattern::ThreeLineTriples: {
        MPoly m = independent_linear_form(K, 3, rng);
        auto others = conjugates(m, K);
        for (const auto& a : planes)
          for (size_t j = 0; j < others.size() && ok; ++j)
            for (size_t k = 0; k < others.size() && ok; ++k) {
              std::vector<Row> rows{coeff_row(a), coeff_row(others[j])};
              if (k != j) rows.push_back(coeff_row(others[k]));
              ok = rank(rows, *E) == static_cast<int>(rows.size());
            }
        for (size_t i = 0; i < planes.size() && ok; ++i)
          for (size_t k = i + 1; k < planes.size() && ok; ++k)
            for (const auto& b : others) ok = ok && rank({coeff_row(planes[i]), coeff_row(planes[k]), coeff_row(b)}, *E) == 3;
        g = norm_form(m, K);
        break;
      }
      case Pattern::ConjugateCubics: {
        g = random_form(K, 3, rng);
        ok = plane_curve_smooth(restrict_to_plane(g, l));
        break;
      }
      case Pattern::NineLines: {
        auto [a, b] = nine_lines(K, rng);
        return disguise(a, b, rng);
      }
      default:
        throw Error(ErrorCode::InvalidInput, std::string("no fixture for pattern ") + gamma::pattern_name(pattern));
    }
    if (!ok) continue;
    auto [a, b] = disguise(f, g, rng);
    try {
      forms::pencil_validate(a, b);
    } catch (const Error&) {
      continue;
    }
    return {a, b};
  }
}

}  // namespace pencil::fixtures
