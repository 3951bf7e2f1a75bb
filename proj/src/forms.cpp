#include "pencil/forms.hpp"

#include <bit>

namespace pencil::forms {

int MPoly::degree() const {
  int d = -1;
  for (const auto& [e, c] : terms) d = std::max(d, e[0] + e[1] + e[2] + e[3]);
  return d;
}

bool MPoly::is_homogeneous() const {
  int d = -1;
  for (const auto& [e, c] : terms) {
    int s = e[0] + e[1] + e[2] + e[3];
    if (d < 0) d = s;
    if (s != d) return false;
  }
  return true;
}

int MPoly::degree_in(int var) const {
  int d = 0;
  for (const auto& [e, c] : terms) d = std::max<int>(d, e[var]);
  return d;
}

Elem MPoly::coeff(const Exps& e) const {
  auto it = terms.find(e);
  return it == terms.end() ? 0 : it->second;
}

void MPoly::add_term(const Exps& e, Elem c) {
  if (c == 0) return;
  auto [it, inserted] = terms.try_emplace(e, c);
  if (!inserted) {
    it->second = field->add(it->second, c);
    if (it->second == 0) terms.erase(it);
  }
}

MPoly mp_add(const MPoly& a, const MPoly& b) {
  MPoly r = a;
  for (const auto& [e, c] : b.terms) r.add_term(e, c);
  return r;
}

MPoly mp_sub(const MPoly& a, const MPoly& b) {
  MPoly r = a;
  for (const auto& [e, c] : b.terms) r.add_term(e, a.field->neg(c));
  return r;
}

MPoly mp_mul(const MPoly& a, const MPoly& b) {
  MPoly r{a.field, a.nvars, {}};
  const Field& F = *a.field;
  for (const auto& [ea, ca] : a.terms) {
    for (const auto& [eb, cb] : b.terms) {
      Exps e{};
      for (int i = 0; i < 4; ++i) e[i] = static_cast<std::uint8_t>(ea[i] + eb[i]);
      r.add_term(e, F.mul(ca, cb));
    }
  }
  return r;
}

MPoly mp_scale(const MPoly& a, Elem c) {
  MPoly r{a.field, a.nvars, {}};
  if (c == 0) return r;
  for (const auto& [e, v] : a.terms) r.terms.emplace(e, a.field->mul(v, c));
  return r;
}

MPoly mp_constant(const FieldPtr& F, int nvars, Elem c) {
  MPoly r{F, nvars, {}};
  r.add_term(Exps{}, c);
  return r;
}

MPoly mp_variable(const FieldPtr& F, int nvars, int var) {
  MPoly r{F, nvars, {}};
  Exps e{};
  e[var] = 1;
  r.add_term(e, 1);
  return r;
}

MPoly mp_embed(const MPoly& a, const FieldPtr& K) {
  auto emb = gf::embedding(a.field, K);
  MPoly r{K, a.nvars, {}};
  for (const auto& [e, c] : a.terms) r.terms.emplace(e, emb->apply(c));
  return r;
}

MPoly mp_restrict(const MPoly& a, const FieldPtr& K) {
  auto emb = gf::embedding(K, a.field);
  MPoly r{K, a.nvars, {}};
  for (const auto& [e, c] : a.terms) r.terms.emplace(e, emb->restrict(c));
  return r;
}

MPoly mp_frobenius(const MPoly& a, const Field& base) {
  MPoly r{a.field, a.nvars, {}};
  for (const auto& [e, c] : a.terms) r.terms.emplace(e, a.field->frobenius(c, base.size()));
  return r;
}

EmbeddedForm::EmbeddedForm(const MPoly& F, const FieldPtr& K) : K_(K), nvars_(F.nvars) {
  auto emb = gf::embedding(F.field, K);
  for (const auto& [e, c] : F.terms) {
    terms_.emplace_back(e, emb->apply(c));
    for (int i = 0; i < nvars_; ++i) maxdeg_ = std::max<int>(maxdeg_, e[i]);
  }
}

Elem EmbeddedForm::operator()(std::span<const Elem> point) const {
  const Field& K = *K_;
  // powers[i * stride + k] = point[i]^k
  constexpr int kStack = 40;
  const int stride = maxdeg_ + 1;
  Elem stack[4 * kStack];
  std::vector<Elem> heap;
  Elem* powers = stack;
  if (stride > kStack) {
    heap.resize(4 * stride);
    powers = heap.data();
  }
  for (int i = 0; i < nvars_; ++i) {
    Elem* row = powers + i * stride;
    row[0] = 1;
    for (int k = 1; k <= maxdeg_; ++k) row[k] = K.mul(row[k - 1], point[i]);
  }
  Elem acc = 0;
  for (const auto& [e, c] : terms_) {
    Elem t = c;
    for (int i = 0; i < nvars_ && t; ++i)
      if (e[i]) t = K.mul(t, powers[i * stride + e[i]]);
    acc = K.add(acc, t);
  }
  return acc;
}

Elem eval_form(const MPoly& F, std::span<const Elem> point, const FieldPtr& K) {
  if (static_cast<int>(point.size()) != F.nvars) throw Error(ErrorCode::InvalidInput, "point has wrong number of coordinates");
  return EmbeddedForm(F, K)(point);
}

std::vector<MPoly> partials(const MPoly& F) {
  std::vector<MPoly> out;
  const std::uint64_t p = F.field->characteristic();
  for (int i = 0; i < F.nvars; ++i) {
    MPoly d{F.field, F.nvars, {}};
    for (const auto& [e, c] : F.terms) {
      if (e[i] == 0 || e[i] % p == 0) continue;
      Exps e2 = e;
      --e2[i];
      d.add_term(e2, F.field->mul(c, F.field->from_int(e[i])));
    }
    out.push_back(std::move(d));
  }
  return out;
}

Matrix4 identity4() {
  Matrix4 m{};
  for (int i = 0; i < 4; ++i) m[i][i] = 1;
  return m;
}

Matrix4 mat_mul(const Field& F, const Matrix4& a, const Matrix4& b) {
  Matrix4 r{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Elem acc = 0;
      for (int k = 0; k < 4; ++k) acc = F.add(acc, F.mul(a[i][k], b[k][j]));
      r[i][j] = acc;
    }
  return r;
}

Matrix4 mat_inverse(const Field& F, const Matrix4& a) {
  Matrix4 m = a, inv = identity4();
  for (int col = 0; col < 4; ++col) {
    int piv = -1;
    for (int r = col; r < 4; ++r)
      if (m[r][col]) {
        piv = r;
        break;
      }
    if (piv < 0) throw Error(ErrorCode::SingularMatrix, "matrix is not invertible");
    std::swap(m[piv], m[col]);
    std::swap(inv[piv], inv[col]);
    Elem s = F.inv(m[col][col]);
    for (int j = 0; j < 4; ++j) {
      m[col][j] = F.mul(m[col][j], s);
      inv[col][j] = F.mul(inv[col][j], s);
    }
    for (int r = 0; r < 4; ++r) {
      if (r == col || m[r][col] == 0) continue;
      Elem f = m[r][col];
      for (int j = 0; j < 4; ++j) {
        m[r][j] = F.sub(m[r][j], F.mul(f, m[col][j]));
        inv[r][j] = F.sub(inv[r][j], F.mul(f, inv[col][j]));
      }
    }
  }
  return inv;
}

std::array<Elem, 4> mat_apply(const Field& K, const Matrix4& m, std::span<const Elem> v) {
  std::array<Elem, 4> r{};
  for (int i = 0; i < 4; ++i) {
    Elem acc = 0;
    for (int j = 0; j < 4; ++j) acc = K.add(acc, K.mul(m[i][j], v[j]));
    r[i] = acc;
  }
  return r;
}

MPoly linear_change_n(const MPoly& F, std::span<const Elem> M) {
  const int n = F.nvars;
  const FieldPtr& K = F.field;
  std::vector<MPoly> lin;
  for (int i = 0; i < n; ++i) {
    MPoly L{K, n, {}};
    for (int j = 0; j < n; ++j) {
      Exps e{};
      e[j] = 1;
      L.add_term(e, M[i * n + j]);
    }
    lin.push_back(std::move(L));
  }
  std::map<std::pair<int, int>, MPoly> powers;
  auto power = [&](int i, int k) -> const MPoly& {
    auto key = std::make_pair(i, k);
    auto it = powers.find(key);
    if (it != powers.end()) return it->second;
    MPoly v = k == 0 ? mp_constant(K, n, 1) : mp_mul(lin[i], (k == 1 ? mp_constant(K, n, 1) : powers.at({i, k - 1})));
    if (k >= 2 && !powers.count({i, k - 1})) throw Error(ErrorCode::InvalidInput, "power cache order");
    return powers.emplace(key, std::move(v)).first->second;
  };
  MPoly out{K, n, {}};
  for (const auto& [e, c] : F.terms) {
    MPoly t = mp_constant(K, n, c);
    for (int i = 0; i < n; ++i) {
      if (!e[i]) continue;
      for (int k = 1; k <= e[i]; ++k) power(i, k);
      t = mp_mul(t, power(i, e[i]));
    }
    out = mp_add(out, t);
  }
  return out;
}

MPoly linear_change(const MPoly& F, const Matrix4& M) {
  if (F.nvars != 4) throw Error(ErrorCode::InvalidInput, "linear_change expects a quaternary form");
  mat_inverse(*F.field, M);  // throws SingularMatrix
  std::array<Elem, 16> flat{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) flat[i * 4 + j] = M[i][j];
  return linear_change_n(F, flat);
}

std::vector<MPoly> coefficients_in(const MPoly& F, int var) {
  const int d = F.degree_in(var);
  std::vector<MPoly> out(d + 1, MPoly{F.field, F.nvars - 1, {}});
  for (const auto& [e, c] : F.terms) {
    Exps r{};
    int j = 0;
    for (int i = 0; i < F.nvars; ++i)
      if (i != var) r[j++] = e[i];
    out[e[var]].add_term(r, c);
  }
  return out;
}

MPoly resultant_formal(const MPoly& a, const MPoly& b, int var) {
  const FieldPtr& K = a.field;
  const int nv = a.nvars - 1;
  std::vector<MPoly> A = coefficients_in(a, var);
  const int m = static_cast<int>(A.size()) - 1;
  if (A[m].degree() != 0) throw Error(ErrorCode::LeadingCoefficientVanishes, "leading coefficient is not a nonzero constant");
  if (b.is_zero()) return MPoly{K, nv, {}};
  const int n = b.degree();
  std::vector<MPoly> B = coefficients_in(b, var);
  B.resize(n + 1, MPoly{K, nv, {}});
  const int N = m + n;
  if (N == 0) return mp_constant(K, nv, 1);
  // S[row][col] as pointers into A/B (nullptr = 0)
  std::vector<std::vector<const MPoly*>> S(N, std::vector<const MPoly*>(N, nullptr));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= m; ++j)
      if (!A[m - j].is_zero()) S[i][i + j] = &A[m - j];
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= n; ++j)
      if (!B[n - j].is_zero()) S[n + i][i + j] = &B[n - j];

  std::map<std::uint32_t, MPoly> dp;
  dp.emplace(0u, mp_constant(K, nv, 1));
  for (int r = 0; r < N; ++r) {
    std::map<std::uint32_t, MPoly> next;
    for (const auto& [mask, val] : dp) {
      for (int c = 0; c < N; ++c) {
        if ((mask >> c) & 1u || !S[r][c]) continue;
        int inversions = std::popcount(mask >> (c + 1));
        MPoly t = mp_mul(val, *S[r][c]);
        if (inversions & 1) t = mp_scale(t, K->neg(1));
        std::uint32_t nm = mask | (1u << c);
        auto it = next.find(nm);
        if (it == next.end())
          next.emplace(nm, std::move(t));
        else
          it->second = mp_add(it->second, t);
      }
    }
    dp = std::move(next);
  }
  auto it = dp.find((1u << N) - 1);
  return it == dp.end() ? MPoly{K, nv, {}} : it->second;
}

TernaryForm sylvester_resultant(const MPoly& f, const MPoly& g, int var) {
  const int d = f.degree();
  for (const MPoly* h : {&f, &g}) {
    Exps e{};
    e[var] = static_cast<std::uint8_t>(d);
    if (h->degree() != d || h->coeff(e) == 0)
      throw Error(ErrorCode::LeadingCoefficientVanishes, "x" + std::to_string(var) + "^" + std::to_string(d) + " coefficient vanishes");
  }
  return resultant_formal(f, g, var);
}

// ZeroSolver

struct ZeroSolver::Node {
  FieldPtr base;
  int nvars = 0;
  std::vector<MPoly> polys;
  bool degenerate = false;
  bool empty_everywhere = false;
  // nvars == 2
  gf::Poly gcd_dehom;
  bool zero_at_infinity = false;
  // nvars >= 3
  std::vector<Elem> M;  // row-major; original = M * transformed coordinates
  std::vector<MPoly> transformed;
  std::unique_ptr<Node> child;

  Node(std::vector<MPoly> input, int n, const FieldPtr& K, std::uint64_t seed) : base(K), nvars(n) {
    for (auto& p : input)
      if (!p.is_zero()) polys.push_back(std::move(p));
    if (n == 1) {
      empty_everywhere = !polys.empty();
      degenerate = polys.empty();
      return;
    }
    if (polys.empty()) {
      degenerate = true;
      return;
    }
    if (n == 2) {
      bool first = true;
      zero_at_infinity = true;
      for (const auto& p : polys) {
        const int d = p.degree();
        gf::Poly u(d + 1, 0);
        for (const auto& [e, c] : p.terms) u[e[1]] = c;
        gf::trim(u);
        gcd_dehom = first ? gf::monic(*K, u) : gf::pgcd(*K, gcd_dehom, u);
        first = false;
        if (p.coeff(Exps{0, static_cast<std::uint8_t>(d), 0, 0}) != 0) zero_at_infinity = false;
      }
      empty_everywhere = gf::deg(gcd_dehom) == 0 && !zero_at_infinity;
      return;
    }
    for (int v = 0; v < n; ++v) {
      bool used = false;
      for (const auto& p : polys) used |= p.involves(v);
      if (!used) {
        degenerate = true;  // cone over the remaining variables
        return;
      }
    }
    // Find a point v with some poly nonzero; it becomes the projection center.
    std::vector<Elem> center;
    int pivot = -1;
    std::vector<EmbeddedForm> ev;
    for (const auto& p : polys) ev.emplace_back(p, K);
    if (seed != 0) {
      gf::Rng rng(seed);
      std::vector<Elem> pt(n);
      for (int attempt = 0; attempt < 64 && pivot < 0; ++attempt) {
        for (auto& x : pt) x = rng() % K->size();
        if (std::all_of(pt.begin(), pt.end(), [](Elem x) { return x == 0; })) continue;
        gf::normalize_projective(pt, *K);
        for (size_t i = 0; i < ev.size() && pivot < 0; ++i)
          if (ev[i](pt) != 0) {
            pivot = static_cast<int>(i);
            center = pt;
          }
      }
    }
    int tried = 0;
    if (pivot < 0) for_each_projective_point(n, *K, [&](std::span<const Elem> pt) {
      for (size_t i = 0; i < ev.size(); ++i) {
        if (ev[i](pt) != 0) {
          pivot = static_cast<int>(i);
          center.assign(pt.begin(), pt.end());
          return true;
        }
      }
      return ++tried > 20000;
    });
    if (pivot < 0) {
      degenerate = true;
      return;
    }
    int lead = 0;
    while (center[lead] == 0) ++lead;
    M.assign(n * n, 0);
    int col = 0;
    for (int j = 0; j < n; ++j) {
      if (j == lead) continue;
      M[j * n + col] = 1;
      ++col;
    }
    for (int i = 0; i < n; ++i) M[i * n + (n - 1)] = center[i];
    for (const auto& p : polys) transformed.push_back(linear_change_n(p, M));
    std::vector<MPoly> res;
    for (size_t i = 0; i < transformed.size(); ++i) {
      if (static_cast<int>(i) == pivot) continue;
      MPoly r = resultant_formal(transformed[pivot], transformed[i], n - 1);
      if (!r.is_zero()) res.push_back(std::move(r));
    }
    if (res.empty()) {
      degenerate = true;
      return;
    }
    child = std::make_unique<Node>(std::move(res), n - 1, K, seed == 0 ? 0 : seed * 0x9E3779B97F4A7C15ull + 1);
    degenerate = child->degenerate;
    empty_everywhere = child->empty_everywhere;
  }

  std::vector<std::vector<Elem>> zeros(const FieldPtr& E) const {
    if (degenerate) throw Error(ErrorCode::InvalidInput, "zero set is not finite or elimination degenerated");
    std::vector<std::vector<Elem>> out;
    if (empty_everywhere || nvars == 1) return out;
    const Field& F = *E;
    auto emb = gf::embedding(base, E);
    gf::Rng rng(0);
    if (nvars == 2) {
      if (gf::deg(gcd_dehom) > 0) {
        gf::Poly h(gcd_dehom.size());
        for (size_t i = 0; i < h.size(); ++i) h[i] = emb->apply(gcd_dehom[i]);
        for (Elem r : gf::distinct_roots(F, h, rng)) out.push_back({1, r});
      }
      if (zero_at_infinity) out.push_back({0, 1});
      std::sort(out.begin(), out.end());
      return out;
    }
    auto below = child->zeros(E);
    if (below.empty()) return out;
    // Univariate coefficient forms in the last transformed variable.
    std::vector<std::vector<EmbeddedForm>> coeff_forms;
    for (const auto& t : transformed) {
      std::vector<EmbeddedForm> cf;
      for (const auto& c : coefficients_in(t, nvars - 1)) cf.emplace_back(c, E);
      coeff_forms.push_back(std::move(cf));
    }
    std::vector<Elem> ME(M.size());
    for (size_t i = 0; i < M.size(); ++i) ME[i] = emb->apply(M[i]);
    for (const auto& y : below) {
      gf::Poly g;
      bool first = true;
      for (const auto& cf : coeff_forms) {
        gf::Poly u(cf.size());
        for (size_t k = 0; k < cf.size(); ++k) u[k] = cf[k](y);
        gf::trim(u);
        g = first ? gf::monic(F, u) : gf::pgcd(F, g, u);
        first = false;
      }
      if (gf::deg(g) <= 0) continue;
      for (Elem r : gf::distinct_roots(F, g, rng)) {
        std::vector<Elem> local(y.begin(), y.end());
        local.push_back(r);
        std::vector<Elem> pt(nvars, 0);
        for (int i = 0; i < nvars; ++i) {
          Elem acc = 0;
          for (int j = 0; j < nvars; ++j) acc = F.add(acc, F.mul(ME[i * nvars + j], local[j]));
          pt[i] = acc;
        }
        gf::normalize_projective(pt, F);
        out.push_back(std::move(pt));
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
};

ZeroSolver::ZeroSolver(std::vector<MPoly> polys, int nvars, const FieldPtr& base, std::uint64_t seed)
    : root_(std::make_unique<Node>(std::move(polys), nvars, base, seed)) {}
ZeroSolver::~ZeroSolver() = default;
ZeroSolver::ZeroSolver(ZeroSolver&&) noexcept = default;
ZeroSolver& ZeroSolver::operator=(ZeroSolver&&) noexcept = default;

std::vector<std::vector<Elem>> ZeroSolver::all_zeros(const FieldPtr& E) const { return root_->zeros(E); }
bool ZeroSolver::provably_empty() const { return !root_->degenerate && root_->empty_everywhere; }
bool ZeroSolver::degenerate() const { return root_->degenerate; }

// Smoothness

namespace {

std::uint64_t projective_size(std::uint64_t q, int dim) {
  std::uint64_t s = 0, pw = 1;
  for (int i = 0; i <= dim; ++i) {
    if (pw > (std::uint64_t{1} << 62) / q) return ~std::uint64_t{0};
    s += pw;
    pw *= q;
  }
  return s;
}

std::optional<std::array<Elem, 4>> brute_zero(const std::vector<MPoly>& polys, const FieldPtr& E) {
  std::vector<EmbeddedForm> ev;
  for (const auto& p : polys) ev.emplace_back(p, E);
  std::optional<std::array<Elem, 4>> found;
  for_each_projective_point(4, *E, [&](std::span<const Elem> pt) {
    for (const auto& f : ev)
      if (f(pt) != 0) return false;
    found = std::array<Elem, 4>{pt[0], pt[1], pt[2], pt[3]};
    return true;
  });
  return found;
}

}  // namespace

std::optional<SingularAt> brute_singular_point(const MPoly& F, int bound, std::uint64_t point_cap) {
  std::vector<MPoly> polys = partials(F);
  polys.push_back(F);
  const Field& K = *F.field;
  for (int m = 1; m <= bound; ++m) {
    std::uint64_t size = 1;
    bool too_big = false;
    for (int i = 0; i < m && !too_big; ++i) {
      if (size > gf::kDefaultSizeCap / K.size()) too_big = true;
      size *= K.size();
    }
    if (too_big || projective_size(size, 3) > point_cap) break;
    auto E = gf::make_field(K.characteristic(), K.degree() * m);
    if (auto z = brute_zero(polys, E)) return SingularAt{E, *z};
  }
  return std::nullopt;
}

SmoothVerdict is_smooth_finite(const MPoly& F, const SmoothOptions& opt) {
  const FieldPtr& K = F.field;
  const std::uint64_t p = K->characteristic();
  const int d = F.degree();
  auto extension = [&](int m) -> FieldPtr {
    std::uint64_t size = 1;
    for (int i = 0; i < m; ++i) {
      if (size > opt.field_cap / K->size()) return nullptr;
      size *= K->size();
    }
    return gf::make_field(p, K->degree() * m, opt.field_cap);
  };

  std::vector<MPoly> polys;
  for (auto& g : partials(F))
    if (!g.is_zero()) polys.push_back(std::move(g));
  if (polys.empty()) {
    for (int m = 1; m <= opt.bound; ++m) {
      auto E = extension(m);
      if (!E || projective_size(E->size(), 3) > opt.brute_cap) break;
      if (auto z = brute_zero({F}, E)) return SingularAt{E, *z};
    }
    return Undetermined{"gradient vanishes identically"};
  }
  if (d % static_cast<int>(p) == 0) polys.push_back(F);

  for (int v = 0; v < 4; ++v) {
    bool used = false;
    for (const auto& g : polys) used |= g.involves(v);
    if (!used) {
      std::array<Elem, 4> pt{};
      pt[v] = 1;
      return SingularAt{K, pt};
    }
  }

  ZeroSolver solver(polys, 4, K);
  if (solver.provably_empty()) return Smooth{opt.bound, true};
  for (int c = 1; c < opt.centers && !solver.degenerate(); ++c)
    if (ZeroSolver(polys, 4, K, c).provably_empty()) return Smooth{opt.bound, true};
  int searched = 0;
  for (int m = 1; m <= opt.bound; ++m) {
    auto E = extension(m);
    if (!E) break;
    if (solver.degenerate()) {
      if (projective_size(E->size(), 3) > opt.brute_cap) {
        return Undetermined{"elimination degenerated and the brute-force search exceeds its cap at extension degree " +
                            std::to_string(m)};
      }
      if (auto z = brute_zero(polys, E)) return SingularAt{E, *z};
    } else {
      auto zs = solver.all_zeros(E);
      if (!zs.empty()) return SingularAt{E, {zs[0][0], zs[0][1], zs[0][2], zs[0][3]}};
    }
    searched = m;
  }
  return Smooth{searched, false};
}

}  // namespace pencil::forms
