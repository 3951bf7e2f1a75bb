#include "pencil/gf.hpp"

#include <algorithm>
#include <map>

#include "pencil/upoly.hpp"

namespace pencil::gf {

namespace {

using u128 = unsigned __int128;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t r = 2; r * r <= n; ++r) {
    if (n % r == 0) {
      out.push_back(r);
      while (n % r == 0) n /= r;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

}  // namespace

bool is_prime(std::uint64_t p) {
  if (p < 2) return false;
  for (std::uint64_t r = 2; r * r <= p; ++r)
    if (p % r == 0) return false;
  return true;
}

Field::Field(std::uint64_t p, int n, std::vector<std::uint64_t> modulus)
    : p_(p), n_(n), modulus_(std::move(modulus)) {
  q_ = 1;
  for (int i = 0; i < n_; ++i) q_ *= p_;
  ord_ = q_ - 1;
  if (p_ == 2) {
    for (int i = 0; i < n_; ++i)
      if (modulus_[i]) mod_bits_ |= std::uint64_t{1} << i;
  }
  if (q_ <= kTableCap && q_ > 2) build_tables();
}

Elem Field::root() const { return n_ >= 2 ? p_ : 0; }

Elem Field::from_int(std::int64_t v) const {
  std::int64_t m = static_cast<std::int64_t>(p_);
  std::int64_t r = v % m;
  if (r < 0) r += m;
  return static_cast<Elem>(r);
}

Elem Field::from_coeffs(std::span<const std::uint64_t> c) const {
  if (static_cast<int>(c.size()) > n_) throw Error(ErrorCode::FieldMismatch, "too many coefficients for field");
  Elem code = 0;
  for (size_t i = c.size(); i-- > 0;) code = code * p_ + (c[i] % p_);
  return code;
}

std::vector<std::uint64_t> Field::coeffs(Elem a) const {
  std::vector<std::uint64_t> c(n_);
  for (int i = 0; i < n_; ++i) {
    c[i] = a % p_;
    a /= p_;
  }
  return c;
}

Elem Field::add_slow(Elem a, Elem b) const {
  Elem r = 0, scale = 1;
  for (int i = 0; i < n_; ++i) {
    std::uint64_t d = (a % p_ + b % p_) % p_;
    r += d * scale;
    a /= p_;
    b /= p_;
    scale *= p_;
  }
  return r;
}

Elem Field::neg_slow(Elem a) const {
  Elem r = 0, scale = 1;
  for (int i = 0; i < n_; ++i) {
    std::uint64_t d = a % p_;
    r += (d ? p_ - d : 0) * scale;
    a /= p_;
    scale *= p_;
  }
  return r;
}

Elem Field::mul_slow(Elem a, Elem b) const {
  if (n_ == 1) return mulmod(a, b, p_);
  if (p_ == 2) {
    u128 prod = 0;
    for (int i = 0; i < n_; ++i)
      if ((b >> i) & 1) prod ^= static_cast<u128>(a) << i;
    for (int i = 2 * n_ - 2; i >= n_; --i) {
      if ((prod >> i) & 1) {
        prod ^= static_cast<u128>(1) << i;
        prod ^= static_cast<u128>(mod_bits_) << (i - n_);
      }
    }
    return static_cast<Elem>(prod);
  }
  std::vector<std::uint64_t> x = coeffs(a), y = coeffs(b);
  std::vector<std::uint64_t> prod(2 * n_ - 1, 0);
  for (int i = 0; i < n_; ++i) {
    if (!x[i]) continue;
    for (int j = 0; j < n_; ++j) prod[i + j] = (prod[i + j] + mulmod(x[i], y[j], p_)) % p_;
  }
  for (int i = 2 * n_ - 2; i >= n_; --i) {
    std::uint64_t c = prod[i];
    if (!c) continue;
    prod[i] = 0;
    for (int j = 0; j < n_; ++j) {
      std::uint64_t t = mulmod(c, modulus_[j], p_);
      prod[i - n_ + j] = (prod[i - n_ + j] + p_ - t) % p_;
    }
  }
  prod.resize(n_);
  return from_coeffs(prod);
}

void Field::build_tables() {
  const auto factors = prime_factors(ord_);
  auto slow_pow = [&](Elem a, std::uint64_t e) {
    Elem r = 1;
    while (e) {
      if (e & 1) r = mul_slow(r, a);
      a = mul_slow(a, a);
      e >>= 1;
    }
    return r;
  };
  auto primitive = [&](Elem g) {
    if (g == 0) return false;
    for (auto r : factors)
      if (slow_pow(g, ord_ / r) == 1) return false;
    return true;
  };
  Elem g = root();
  if (!primitive(g)) {
    for (g = 2; g < q_ && !primitive(g); ++g) {
    }
  }
  exp_.resize(ord_);
  log_.assign(q_, 0);
  Elem cur = 1;
  for (std::uint64_t i = 0; i < ord_; ++i) {
    exp_[i] = static_cast<std::uint32_t>(cur);
    log_[cur] = static_cast<std::uint32_t>(i);
    cur = mul_slow(cur, g);
  }
  if (p_ != 2) {
    half_ = ord_ / 2;
    zech_.resize(ord_);
    for (std::uint64_t i = 0; i < ord_; ++i) {
      Elem e = exp_[i];
      Elem s = (e % p_ == p_ - 1) ? e - (p_ - 1) : e + 1;
      zech_[i] = s == 0 ? kNone : log_[s];
    }
  }
}

Elem Field::inv(Elem a) const {
  if (a == 0) throw Error(ErrorCode::DivisionByZero, "inverse of zero");
  if (!exp_.empty()) {
    std::uint64_t l = log_[a];
    return exp_[l == 0 ? 0 : ord_ - l];
  }
  return pow(a, q_ - 2);
}

Elem Field::pow(Elem a, std::uint64_t e) const {
  if (e == 0) return 1;
  if (a == 0) return 0;
  if (!exp_.empty()) {
    std::uint64_t r = static_cast<std::uint64_t>(static_cast<u128>(log_[a]) * (e % ord_) % ord_);
    return exp_[r];
  }
  Elem r = 1;
  while (e) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}

std::vector<std::uint64_t> smallest_irreducible(std::uint64_t p, int n) {
  if (n == 1) return {0, 1};
  auto Fp = make_field(p, 1);
  std::vector<std::uint64_t> c(n, 0);
  // Lexicographic order with c[0] most significant; c[0] = 0 is never
  // irreducible, so start past that block.
  c[0] = 1;
  for (;;) {
    Poly f(c.begin(), c.end());
    f.push_back(1);
    if (c[0] != 0 && is_irreducible(*Fp, f)) return {f.begin(), f.end()};
    int i = n - 1;
    while (i >= 0 && ++c[i] == p) c[i--] = 0;
    if (i < 0) break;
  }
  throw Error(ErrorCode::InvalidInput, "no irreducible polynomial found");
}

FieldPtr make_field(std::uint64_t p, int n, std::uint64_t size_cap) {
  if (!is_prime(p)) throw Error(ErrorCode::NotPrime, std::to_string(p) + " is not prime");
  if (n < 1) throw Error(ErrorCode::InvalidInput, "extension degree must be positive");
  u128 size = 1;
  for (int i = 0; i < n; ++i) {
    size *= p;
    if (size > size_cap) throw Error(ErrorCode::SizeCapExceeded, std::to_string(p) + "^" + std::to_string(n));
  }
  static std::recursive_mutex mu;
  static std::map<std::pair<std::uint64_t, int>, FieldPtr> cache;
  std::lock_guard lock(mu);
  auto it = cache.find({p, n});
  if (it != cache.end()) return it->second;
  auto field = std::make_shared<const Field>(p, n, smallest_irreducible(p, n));
  cache.emplace(std::make_pair(p, n), field);
  return field;
}

// FieldElem

const Field& FieldElem::same(const FieldElem& o) const {
  if (!field_ || !o.field_ || !(*field_ == *o.field_)) throw Error(ErrorCode::FieldMismatch, "operands in different fields");
  return *field_;
}

FieldElem FieldElem::operator+(const FieldElem& o) const { return {field_, same(o).add(value_, o.value_)}; }
FieldElem FieldElem::operator-(const FieldElem& o) const { return {field_, same(o).sub(value_, o.value_)}; }
FieldElem FieldElem::operator*(const FieldElem& o) const { return {field_, same(o).mul(value_, o.value_)}; }
FieldElem FieldElem::operator/(const FieldElem& o) const {
  const Field& F = same(o);
  if (o.value_ == 0) throw Error(ErrorCode::DivisionByZero, "division by zero");
  return {field_, F.div(value_, o.value_)};
}
FieldElem FieldElem::inverse() const { return {field_, field_->inv(value_)}; }
bool FieldElem::operator==(const FieldElem& o) const { return value_ == o.value_ && *field_ == *o.field_; }

FieldElem frobenius(const FieldElem& a, const Field& base) {
  const Field& K = *a.field();
  if (K.characteristic() != base.characteristic() || K.degree() % base.degree() != 0)
    throw Error(ErrorCode::FieldMismatch, "base is not a subfield");
  return {a.field(), K.frobenius(a.value(), base.size())};
}

// Embedding

Embedding::Embedding(FieldPtr sub, FieldPtr sup, Elem root_image) : sub_(std::move(sub)), sup_(std::move(sup)) {
  const Field& S = *sup_;
  const int a = sub_->degree();
  basis_.resize(a);
  Elem cur = 1;
  for (int i = 0; i < a; ++i) {
    basis_[i] = cur;
    cur = S.mul(cur, root_image);
  }
  if (sub_->size() <= 4096) {
    small_table_.resize(sub_->size());
    for (Elem x = 0; x < sub_->size(); ++x) {
      auto c = sub_->coeffs(x);
      Elem acc = 0;
      for (int i = 0; i < a; ++i)
        if (c[i]) acc = S.add(acc, S.mul(S.from_int(static_cast<std::int64_t>(c[i])), basis_[i]));
      small_table_[x] = acc;
    }
  }
  // Row-reduce the F_p-linear map digits(sub) -> digits(sup).
  const std::uint64_t p = S.characteristic();
  const int b = S.degree();
  std::vector<std::vector<std::uint64_t>> rows(b, std::vector<std::uint64_t>(a));
  for (int j = 0; j < a; ++j) {
    auto d = S.coeffs(basis_[j]);
    for (int i = 0; i < b; ++i) rows[i][j] = d[i];
  }
  // Keep the transformation so that restrict() can replay it on a right-hand side.
  std::vector<std::vector<std::uint64_t>> tr(b, std::vector<std::uint64_t>(b, 0));
  for (int i = 0; i < b; ++i) tr[i][i] = 1;
  int r = 0;
  for (int col = 0; col < a && r < b; ++col) {
    int piv = -1;
    for (int i = r; i < b; ++i)
      if (rows[i][col]) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(rows[piv], rows[r]);
    std::swap(tr[piv], tr[r]);
    std::uint64_t inv = 1;
    {
      std::uint64_t base = rows[r][col], e = p - 2;
      while (e) {
        if (e & 1) inv = mulmod(inv, base, p);
        base = mulmod(base, base, p);
        e >>= 1;
      }
    }
    for (auto& v : rows[r]) v = mulmod(v, inv, p);
    for (auto& v : tr[r]) v = mulmod(v, inv, p);
    for (int i = 0; i < b; ++i) {
      if (i == r || rows[i][col] == 0) continue;
      std::uint64_t f = rows[i][col];
      for (int k = 0; k < a; ++k) rows[i][k] = (rows[i][k] + p - mulmod(f, rows[r][k], p)) % p;
      for (int k = 0; k < b; ++k) tr[i][k] = (tr[i][k] + p - mulmod(f, tr[r][k], p)) % p;
    }
    pivot_col_.push_back(col);
    ++r;
  }
  rref_ = std::move(tr);  // rows 0..r-1 solve, rows r..b-1 are consistency checks
}

Elem Embedding::apply(Elem a) const {
  if (!small_table_.empty()) return small_table_[a];
  const Field& S = *sup_;
  auto c = sub_->coeffs(a);
  Elem acc = 0;
  for (size_t i = 0; i < c.size(); ++i)
    if (c[i]) acc = S.add(acc, S.mul(S.from_int(static_cast<std::int64_t>(c[i])), basis_[i]));
  return acc;
}

bool Embedding::in_image(Elem x) const {
  const std::uint64_t p = sup_->characteristic();
  auto d = sup_->coeffs(x);
  for (size_t i = pivot_col_.size(); i < rref_.size(); ++i) {
    std::uint64_t acc = 0;
    for (size_t k = 0; k < d.size(); ++k) acc = (acc + mulmod(rref_[i][k], d[k], p)) % p;
    if (acc) return false;
  }
  return true;
}

Elem Embedding::restrict(Elem x) const {
  if (!in_image(x)) throw Error(ErrorCode::FieldMismatch, "element is not in the subfield image");
  const std::uint64_t p = sup_->characteristic();
  auto d = sup_->coeffs(x);
  std::vector<std::uint64_t> c(sub_->degree(), 0);
  for (size_t i = 0; i < pivot_col_.size(); ++i) {
    std::uint64_t acc = 0;
    for (size_t k = 0; k < d.size(); ++k) acc = (acc + mulmod(rref_[i][k], d[k], p)) % p;
    c[pivot_col_[i]] = acc;
  }
  return sub_->from_coeffs(c);
}

EmbeddingPtr embedding(const FieldPtr& sub, const FieldPtr& sup) {
  if (sub->characteristic() != sup->characteristic() || sup->degree() % sub->degree() != 0)
    throw Error(ErrorCode::NoEmbedding, "degree " + std::to_string(sub->degree()) + " does not divide " +
                                            std::to_string(sup->degree()));
  static std::recursive_mutex mu;
  static std::map<std::tuple<std::uint64_t, int, int>, EmbeddingPtr> cache;
  std::lock_guard lock(mu);
  const std::uint64_t p = sub->characteristic();
  const int a = sub->degree(), b = sup->degree();
  auto key = std::make_tuple(p, a, b);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  Elem image = 0;
  if (a == 1) {
    image = 0;
  } else if (a == b) {
    image = sup->root();
  } else {
    Rng rng(0);
    Poly m(sub->modulus().begin(), sub->modulus().end());
    auto candidates = distinct_roots(*sup, m, rng);
    // Constraints from each maximal proper subfield of sub.
    struct Constraint {
      std::vector<std::uint64_t> coords;  // image of the small root, in the power basis of sub
      Elem target;                        // image of the small root in sup
    };
    std::vector<Constraint> constraints;
    for (std::uint64_t r : prime_factors(static_cast<std::uint64_t>(a))) {
      int c = a / static_cast<int>(r);
      if (c == 1) continue;
      auto small = make_field(p, c);
      auto into_sub = embedding(small, sub);
      auto into_sup = embedding(small, sup);
      constraints.push_back({sub->coeffs(into_sub->root_image()), into_sup->root_image()});
    }
    bool found = false;
    for (Elem rho : candidates) {
      bool ok = true;
      for (const auto& con : constraints) {
        Elem acc = 0, pw = 1;
        for (int i = 0; i < a; ++i) {
          if (con.coords[i]) acc = sup->add(acc, sup->mul(sup->from_int(static_cast<std::int64_t>(con.coords[i])), pw));
          pw = sup->mul(pw, rho);
        }
        if (acc != con.target) {
          ok = false;
          break;
        }
      }
      if (ok) {
        image = rho;
        found = true;
        break;
      }
    }
    if (!found) throw Error(ErrorCode::NoEmbedding, "no compatible root found");
  }
  auto e = std::make_shared<const Embedding>(sub, sup, image);
  cache.emplace(key, e);
  return e;
}

FieldElem embed(const FieldElem& a, const FieldPtr& sup) {
  auto e = embedding(a.field(), sup);
  return {sup, e->apply(a.value())};
}

bool normalize_projective(std::span<Elem> coords, const Field& K) {
  for (size_t i = 0; i < coords.size(); ++i) {
    if (coords[i] != 0) {
      if (coords[i] != 1) {
        Elem inv = K.inv(coords[i]);
        for (size_t j = i; j < coords.size(); ++j) coords[j] = K.mul(coords[j], inv);
      }
      return true;
    }
  }
  return false;
}

int orbit_degree(std::span<const Elem> coords, const Field& K, const Field& base) {
  if (K.characteristic() != base.characteristic() || K.degree() % base.degree() != 0)
    throw Error(ErrorCode::FieldMismatch, "base is not a subfield");
  std::vector<Elem> pt(coords.begin(), coords.end());
  if (!normalize_projective(pt, K)) throw Error(ErrorCode::InvalidInput, "zero tuple has no orbit");
  const int rel = K.degree() / base.degree();
  std::vector<Elem> cur = pt;
  for (int m = 1; m <= rel; ++m) {
    for (auto& c : cur) c = K.frobenius(c, base.size());
    if (cur == pt) return m;
  }
  return rel;
}

}  // namespace pencil::gf
