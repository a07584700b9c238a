// Independent cross-checks used only by the test suite. Each oracle reaches
// its answer by a different route than the library (exact rational
// arithmetic, exact linear algebra, or black-box root bracketing) so that
// agreement is meaningful.
#pragma once

#include <vector>

#include "steklov/spectra.hpp"

namespace steklov::oracle {

// Wigner 3j symbol evaluated with exact rational arithmetic: the square of
// the symbol is a rational number, computed with big integers and converted
// to double only at the very end.
double wigner_3j_exact(int l1, int l2, int l3, int m1, int m2, int m3);

// Dimension of the space of degree-l harmonic polynomials in d variables,
// obtained as the kernel dimension of the Laplacian acting on the monomial
// basis of homogeneous polynomials, via fraction-free Gaussian elimination.
long harmonic_dimension_exact(int l, int d);

// Steklov eigenvalues of degree n on a ball or annulus, found by bracketing
// sign changes of the boundary-condition determinant of the radial ansatz
// and bisecting. Returns all roots found in [lo, hi], ascending.
std::vector<double> radial_modes_by_bisection(const DomainSpec& domain, int n,
                                              double lo, double hi);

}  // namespace steklov::oracle
