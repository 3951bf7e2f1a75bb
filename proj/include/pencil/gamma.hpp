#pragma once

// Points of the base curve Gamma = {f = g = 0}, their closed-point degree
// spectrum, and the splitting-type classifier.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pencil/pencil.hpp"

namespace pencil::gamma {

using forms::Pencil;
using gf::Elem;
using gf::FieldPtr;
using Point4 = std::array<Elem, 4>;

struct GammaOptions {
  bool brute = false;                       // iterate over all of P^3 instead of the resultant path
  std::uint64_t max_field = 1ull << 24;     // largest q^n accepted
  int threads = 1;
};

/// Normalized, sorted, duplicate-free points of Gamma(F_{q^n}).
std::vector<Point4> enumerate_gamma(const Pencil& P, int n, const GammaOptions& opt = {});

struct PointCounts {
  std::uint64_t q = 0;
  std::vector<std::uint64_t> N;  // N[n] for n = 1..K; N[0] unused
  int requested = 0;             // K asked for; K() may be smaller because of the field cap

  int K() const { return static_cast<int>(N.size()) - 1; }
};

struct CountOptions {
  std::uint64_t field_cap = 1ull << 18;  // stop before q^n exceeds this
  int threads = 1;
};

/// Largest n <= K with q^n <= field_cap.
int count_depth(std::uint64_t q, int K, std::uint64_t field_cap);

PointCounts count_sequence(const Pencil& P, int K, const CountOptions& opt = {});

struct DegreeSpectrum {
  std::vector<std::int64_t> a;  // a[d] for d = 1..D_max; a[0] unused
  int D_max() const { return static_cast<int>(a.size()) - 1; }
};

/// Moebius inversion; throws InternalCountError on a non-integral or negative entry.
DegreeSpectrum spectrum(const PointCounts& C);

struct IndexBound {
  std::int64_t g_obs = 0;
  std::vector<int> witness_degrees;  // all d with a[d] > 0
};
IndexBound index_bound(const DegreeSpectrum& S);

enum class Status { Certified, UpToBound };
const char* status_name(Status s);

struct Condition {
  bool holds = false;
  Status status = Status::UpToBound;
  std::optional<int> witness;  // degree of a closed point proving the condition
};

struct Theorem5Report {
  Condition cond_iii, cond_iv, cond_v;
  int D_max = 0;
  std::int64_t g_obs = 0;
  // Any certified condition gives (i) and (ii): X(F_q(t)) and Gamma(F') nonempty.
  bool implies_i_ii = false;
};

/// Throws NotCubic (degree != 3) or Char3.
Theorem5Report theorem5_conditions(const DegreeSpectrum& S, int degree, std::uint64_t characteristic);

enum class Pattern {
  TripleConjugateLines,   // 3(1+1+1)
  DoubleLinesPlusLines,   // 2(1+1+1) + (1+1+1)
  ConicsPlusLines,        // (2+2+2) + (1+1+1)
  ThreeLineTriples,       // (1+1+1) + (1+1+1) + (1+1+1)
  NineLines,              // (1+...+1), 9 times
  ConjugateCubics,        // (3+3+3)
  IntegralComponent,
  Unknown,
};
const char* pattern_name(Pattern p);

struct ComponentOrbit {
  int degree;        // degree of each geometric component
  int orbit;         // Frobenius orbit size
  int multiplicity;  // multiplicity in Gamma (not visible from counts)
};

struct PatternConstraint {
  Pattern pattern;
  std::vector<ComponentOrbit> components;
  int singular_field_degree;  // extension over which the singular locus splits
  std::string intersection_note;
  /// Predicted number of geometric components defined over F_{q^n}.
  int predicted_c(int n) const;
};

const std::vector<PatternConstraint>& pattern_constraints();

struct SplittingReport {
  std::vector<Pattern> matched;              // all consistent patterns; {Unknown} when none fit
  std::vector<int> trusted_n;
  std::vector<std::int64_t> c;               // c_n for each trusted n
  std::vector<double> residual;              // |N_n / q^n - c_n|
  std::vector<ComponentOrbit> orbit_structure;  // of the first matched pattern
  std::string note;
};

constexpr double kTrustThreshold = 1600.0;

SplittingReport classify_splitting(const PointCounts& C);

}  // namespace pencil::gamma
