#pragma once

// Finite fields F_{p^n} realized as F_p[x]/(m) with m the lexicographically
// smallest monic irreducible of degree n.
//
// An element is stored as its coefficient vector in the power basis of the
// root of m, packed into one integer: code = sum c_i p^i. Code order is the
// enumeration order of the field. Fields with at most kTableCap elements also
// carry log/antilog/Zech tables so that the hot kernels run on lookups.

#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "pencil/error.hpp"

namespace pencil::gf {

using Elem = std::uint64_t;

inline constexpr std::uint64_t kDefaultSizeCap = std::uint64_t{1} << 40;
inline constexpr std::uint64_t kTableCap = std::uint64_t{1} << 21;

bool is_prime(std::uint64_t p);

class Field;
using FieldPtr = std::shared_ptr<const Field>;

class Field {
 public:
  Field(std::uint64_t p, int n, std::vector<std::uint64_t> modulus);

  std::uint64_t characteristic() const { return p_; }
  int degree() const { return n_; }
  std::uint64_t size() const { return q_; }
  /// Monic modulus, constant term first, length degree()+1.
  const std::vector<std::uint64_t>& modulus() const { return modulus_; }
  bool has_tables() const { return !exp_.empty(); }

  static constexpr Elem zero() { return 0; }
  static constexpr Elem one() { return 1; }
  /// Class of x, the root of the modulus.
  Elem root() const;

  Elem from_int(std::int64_t v) const;
  Elem from_coeffs(std::span<const std::uint64_t> c) const;
  std::vector<std::uint64_t> coeffs(Elem a) const;

  Elem add(Elem a, Elem b) const {
    if (p_ == 2) return a ^ b;
    if (a == 0) return b;
    if (b == 0) return a;
    if (!exp_.empty()) {
      std::uint64_t la = log_[a], lb = log_[b];
      std::uint64_t d = lb >= la ? lb - la : lb + ord_ - la;
      std::uint32_t z = zech_[d];
      if (z == kNone) return 0;
      std::uint64_t e = la + z;
      return exp_[e >= ord_ ? e - ord_ : e];
    }
    return add_slow(a, b);
  }
  Elem neg(Elem a) const {
    if (p_ == 2 || a == 0) return a;
    if (!exp_.empty()) {
      std::uint64_t e = log_[a] + half_;
      return exp_[e >= ord_ ? e - ord_ : e];
    }
    return neg_slow(a);
  }
  Elem sub(Elem a, Elem b) const { return add(a, neg(b)); }
  Elem mul(Elem a, Elem b) const {
    if (a == 0 || b == 0) return 0;
    if (!exp_.empty()) {
      std::uint64_t e = std::uint64_t{log_[a]} + log_[b];
      return exp_[e >= ord_ ? e - ord_ : e];
    }
    return mul_slow(a, b);
  }
  Elem inv(Elem a) const;
  Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }
  Elem pow(Elem a, std::uint64_t e) const;
  /// a -> a^base_size, the Frobenius relative to a subfield of that size.
  Elem frobenius(Elem a, std::uint64_t base_size) const { return pow(a, base_size); }

  bool operator==(const Field& o) const { return p_ == o.p_ && n_ == o.n_; }

 private:
  static constexpr std::uint32_t kNone = 0xffffffffu;

  Elem add_slow(Elem a, Elem b) const;
  Elem neg_slow(Elem a) const;
  Elem mul_slow(Elem a, Elem b) const;
  void build_tables();

  std::uint64_t p_;
  int n_;
  std::uint64_t q_;
  std::vector<std::uint64_t> modulus_;
  std::uint64_t mod_bits_ = 0;  // p = 2: modulus as a bit mask without the leading term
  std::uint64_t ord_ = 0;       // q - 1
  std::uint64_t half_ = 0;      // log(-1)
  std::vector<std::uint32_t> exp_;
  std::vector<std::uint32_t> log_;
  std::vector<std::uint32_t> zech_;
};

/// Deterministic construction; the same (p, n) always returns the same field
/// object from a process-wide cache.
FieldPtr make_field(std::uint64_t p, int n, std::uint64_t size_cap = kDefaultSizeCap);

/// Lexicographically smallest monic irreducible of degree n over F_p,
/// comparing coefficients from the constant term upward.
std::vector<std::uint64_t> smallest_irreducible(std::uint64_t p, int n);

/// Field element bound to its field. Arithmetic checks that operands share a
/// field and throws FieldMismatch otherwise.
class FieldElem {
 public:
  FieldElem() = default;
  FieldElem(FieldPtr field, Elem value) : field_(std::move(field)), value_(value) {}

  const FieldPtr& field() const { return field_; }
  Elem value() const { return value_; }
  std::vector<std::uint64_t> coeffs() const { return field_->coeffs(value_); }
  bool is_zero() const { return value_ == 0; }

  FieldElem operator+(const FieldElem& o) const;
  FieldElem operator-(const FieldElem& o) const;
  FieldElem operator*(const FieldElem& o) const;
  FieldElem operator/(const FieldElem& o) const;
  FieldElem operator-() const { return {field_, field_->neg(value_)}; }
  FieldElem inverse() const;
  FieldElem pow(std::uint64_t e) const { return {field_, field_->pow(value_, e)}; }
  bool operator==(const FieldElem& o) const;

 private:
  const Field& same(const FieldElem& o) const;
  FieldPtr field_;
  Elem value_ = 0;
};

/// Frobenius x -> x^|base| of the field of a, with base a subfield.
FieldElem frobenius(const FieldElem& a, const Field& base);

/// Compatible embedding of F_{p^a} into F_{p^b}, a | b. The image of the root
/// of the smaller modulus is the first root (in code order) that agrees with
/// the embeddings of every intermediate subfield already fixed, so that the
/// embeddings commute along every chain of the subfield lattice.
class Embedding {
 public:
  Embedding(FieldPtr sub, FieldPtr sup, Elem root_image);

  const FieldPtr& sub() const { return sub_; }
  const FieldPtr& sup() const { return sup_; }
  Elem root_image() const { return basis_[sub_->degree() > 1 ? 1 : 0]; }

  Elem apply(Elem a) const;
  /// Inverse on the image; throws FieldMismatch when x is not in the image.
  Elem restrict(Elem x) const;
  bool in_image(Elem x) const;

 private:
  FieldPtr sub_;
  FieldPtr sup_;
  std::vector<Elem> basis_;        // images of root^i
  std::vector<Elem> small_table_;  // full map when the subfield is small
  // Row-reduced system for restrict(): pivot rows over F_p.
  std::vector<std::vector<std::uint64_t>> rref_;
  std::vector<int> pivot_col_;
};

using EmbeddingPtr = std::shared_ptr<const Embedding>;

EmbeddingPtr embedding(const FieldPtr& sub, const FieldPtr& sup);
FieldElem embed(const FieldElem& a, const FieldPtr& sup);

/// Smallest m >= 1 such that Frobenius^m (relative to base) fixes the tuple,
/// after scaling the tuple so its first nonzero coordinate is 1. Coordinates
/// live in K.
int orbit_degree(std::span<const Elem> coords, const Field& K, const Field& base);

/// Scale so the first nonzero entry is 1. Returns false for the zero tuple.
bool normalize_projective(std::span<Elem> coords, const Field& K);

}  // namespace pencil::gf
