#pragma once

// Local solubility of X: f + t g = 0 at the places of F_q(t).

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pencil/pencil.hpp"

namespace pencil::local {

using forms::MPoly;
using forms::Pencil;
using gf::Elem;
using gf::FieldPtr;
using gf::Poly;
using Point4 = std::array<Elem, 4>;

/// A monic irreducible pi(t), or the place at infinity. At infinity the
/// uniformizer is u = 1/t and the pencil is read as g + u f.
struct Place {
  bool infinity = false;
  Poly pi;  // empty at infinity

  int degree() const { return infinity ? 1 : static_cast<int>(pi.size()) - 1; }
  bool operator==(const Place& o) const { return infinity == o.infinity && pi == o.pi; }
};

std::string place_name(const Place& v);
std::string poly_string(const Poly& a, char var = 't');
Place infinite_place();
Place finite_place(const gf::Field& K, Poly pi);  // throws InvalidInput unless monic irreducible

/// Monic irreducible polynomials of degree e over K, in code order.
std::vector<Place> places_of_degree(const FieldPtr& K, int e);

FieldPtr residue_field(const FieldPtr& K, const Place& v);
/// Class of t in the residue field: the first root of pi (0 at infinity).
Elem residue_tau(const FieldPtr& K, const Place& v);

/// f + tau g over the residue field; g at infinity.
MPoly reduction_at(const Pencil& P, const Place& v);

struct BadPlaces {
  int bound = 0;
  std::vector<Place> places;  // finite places by degree then code, infinity last
};

BadPlaces bad_places(const Pencil& P, int B, const forms::SmoothOptions& opt = {});

// Undecided: the branch budget or the precision ran out with live branches
// and no Hensel margin.
enum class LocalStatus { GoodReductionAuto, Soluble, InsolubleAtPrecision, Undecided };
const char* local_status_name(LocalStatus s);

struct LocalVerdict {
  Place place;
  bool bad_reduction = false;
  LocalStatus status = LocalStatus::GoodReductionAuto;
  std::optional<Point4> residue_point;  // over the residue field
  // Representative in F_q[w] with w the uniformizer variable (t - or u at
  // infinity); F(witness) = 0 mod pi^precision and the Hensel margin holds.
  std::optional<std::array<Poly, 4>> witness;
  int precision = 0;
  std::uint64_t branches = 0;
  std::string notes;
};

struct LocalOptions {
  int precision = 20;
  std::uint64_t branch_budget = 20000;
  forms::SmoothOptions smooth;
};

LocalVerdict locally_soluble(const Pencil& P, const Place& v, const LocalOptions& opt = {});

/// First point of the reduction in enumeration order; exhaustive.
std::optional<Point4> residue_point(const Pencil& P, const Place& v);

enum class Overall { EverywhereLocallySolubleUpToBounds, LocalObstructionAt, Undetermined };
const char* overall_name(Overall o);

struct LocalReport {
  int bound = 0;
  int precision = 0;
  std::vector<Place> bad;
  std::vector<LocalVerdict> verdicts;  // bad places and every place of degree <= min(2, bound)
  Overall overall = Overall::EverywhereLocallySolubleUpToBounds;
  std::optional<Place> obstruction;
  std::string caveat;
};

LocalReport everywhere_locally(const Pencil& P, int B, const LocalOptions& opt = {});

/// pi-adic valuation of a nonzero polynomial (a large sentinel for zero).
int valuation(const gf::Field& K, Poly a, const Poly& pi);
constexpr int kInfiniteValuation = 1 << 20;

/// Value v(F(x)) and min_i v(dF/dx_i (x)) at a polynomial tuple x.
std::pair<int, int> hensel_valuations(const Pencil& P, const Place& v, const std::array<Poly, 4>& x);

/// One Newton-type refinement: a tuple x' = x mod pi^{v(F) - k} with
/// v(F(x')) > v(F(x)). Requires the Hensel margin at x.
std::optional<std::array<Poly, 4>> refine(const Pencil& P, const Place& v, const std::array<Poly, 4>& x);

}  // namespace pencil::local
