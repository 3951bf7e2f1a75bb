#pragma once

// Constructed pencils with known structure, shared by the tests, the
// acceptance suite and the instance generator.

#include <random>

#include "pencil/gamma.hpp"

namespace pencil::fixtures {

using forms::Matrix4;
using forms::MPoly;
using gf::Elem;
using gf::FieldPtr;
using Rng = std::mt19937_64;

/// Uniformly random coefficients on every monomial of degree d (nonzero result).
MPoly random_form(const FieldPtr& K, int d, Rng& rng, int nvars = 4);
Matrix4 random_invertible(const gf::Field& K, Rng& rng);

/// Product of the conjugates of a form over an extension of K, as a form over K.
MPoly norm_form(const MPoly& l, const FieldPtr& K);

/// Linear form over F_{q^m} whose m conjugates are linearly independent.
MPoly independent_linear_form(const FieldPtr& K, int m, Rng& rng);

/// Random coordinate change and random invertible change of pencil basis.
std::pair<MPoly, MPoly> disguise(const MPoly& f, const MPoly& g, Rng& rng);

/// f is the norm of a cubic-extension linear form (three conjugate planes); g
/// is chosen so that Gamma splits as the requested pattern. Supported:
/// TripleConjugateLines, DoubleLinesPlusLines, ConicsPlusLines,
/// ThreeLineTriples, ConjugateCubics, and NineLines over F_2 only (a
/// Frobenius orbit of nine lines on a smooth cubic surface).
std::pair<MPoly, MPoly> splitting_fixture(gamma::Pattern pattern, const FieldPtr& K, Rng& rng);

}  // namespace pencil::fixtures
