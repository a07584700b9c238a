// harmonics.hpp — orthonormal spherical-harmonic bases on S^{d-1} (d = 2, 3),
// their triple-product integrals, and quadrature rules that integrate
// products of harmonics exactly.
//
// Conventions (fixed throughout the project):
//
//  d = 3  complex basis:  Y_l^m(theta, phi) =
//             sqrt((2l+1)(l-m)!/(4 pi (l+m)!)) P_l^m(cos theta) e^{i m phi},
//         m = -l..l, with the Condon-Shortley phase inside P_l^m, so that
//         conj(Y_l^m) = (-1)^m Y_l^{-m}.
//  d = 3  real basis:     m = 0 zonal; m > 0 cosine-type; m < 0 sine-type:
//             R_{l,0} = Y_l^0,
//             R_{l,m}  = (Y_l^{-m} + (-1)^m Y_l^m)/sqrt(2)   (m > 0),
//             R_{l,-m} = i (Y_l^{-m} - (-1)^m Y_l^m)/sqrt(2) (m > 0).
//  d = 2  complex basis:  Y_0^1 = 1/sqrt(2 pi);  for l >= 1,
//             Y_l^1 = e^{-i l theta}/sqrt(2 pi),  Y_l^2 = e^{+i l theta}/sqrt(2 pi),
//         so conj(Y_l^1) = Y_l^2. Valid m: l = 0 -> {1}; l >= 1 -> {1, 2}.
//  d = 2  real basis:     R_{0,1} = 1/sqrt(2 pi);  for l >= 1,
//             R_{l,1} = cos(l theta)/sqrt(pi),  R_{l,2} = sin(l theta)/sqrt(pi).
//
// All bases are orthonormal in L^2(S^{d-1}) with the unweighted surface
// measure; angles are (theta) for d = 2 and (theta = polar from +z,
// phi = azimuth) for d = 3.

#pragma once

#include <array>
#include <complex>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace steklov {

using Complex = std::complex<double>;

// Index (degree l, order m) of one basis element. The admissible m range
// depends on the dimension and basis; see the header comment.
struct HarmonicIndex {
  int l = 0;
  int m = 0;

  friend bool operator==(const HarmonicIndex&, const HarmonicIndex&) = default;
  friend auto operator<=>(const HarmonicIndex&, const HarmonicIndex&) = default;
};

enum class Basis { ComplexStandard, Real };

// Coefficient table of a function on S^{d-1} expanded in one of the bases.
// std::map keeps deterministic (l, m) iteration order for reproducible output.
using CoeffMap = std::map<HarmonicIndex, Complex>;

// Dimension of the space of spherical harmonics of degree l on S^{d-1}:
// N_{0,d} = 1 and N_{l,d} = (d+2l-2)(d+l-3)! / (l! (d-2)!) for l >= 1.
long multiplicity(int l, int d);

// Surface area of the unit sphere S^{d-1}: omega_{d-1} = 2 pi^{d/2} / Gamma(d/2).
double sphere_area(int d);

// True when (l, m) addresses a basis element of S^{d-1} in the given basis.
bool valid_index(HarmonicIndex idx, int d, Basis basis);

// Value of one basis element. `angles` has 1 entry (theta) for d = 2 and
// 2 entries (theta, phi) for d = 3. Real-basis values are returned with a
// zero imaginary part. Throws std::invalid_argument on a bad index.
Complex eval_harmonic(HarmonicIndex idx, int d, std::span<const double> angles,
                      Basis basis);

// Value together with the first angular derivatives (enough to form surface
// gradients: grad_S f = f_theta e_theta + f_phi/sin(theta) e_phi for d = 3,
// and f_theta e_theta for d = 2, where e_* are unit vectors).
struct HarmonicJet {
  Complex value{};
  Complex d_theta{};
  Complex d_phi{};  // plain partial d/d phi (not divided by sin theta); 0 for d = 2
};
HarmonicJet eval_harmonic_jet(HarmonicIndex idx, int d,
                              std::span<const double> angles, Basis basis);

// Fully normalized associated Legendre table at a fixed polar angle:
// value(l, m) = sqrt((2l+1)(l-m)!/(4 pi (l+m)!)) P_l^m(cos theta) for
// 0 <= m <= l <= lmax (Condon-Shortley phase included), dtheta = d/d theta.
// Computed with the standard stable (l - m)-upward recurrence and the
// derivative ladder d/dtheta Ybar_l^m =
//   [sqrt((l-m)(l+m+1)) Ybar_l^{m+1} - sqrt((l+m)(l-m+1)) Ybar_l^{m-1}] / 2.
struct LegendreTable {
  int lmax = 0;
  Eigen::MatrixXd value;   // (lmax+1) x (lmax+1), lower triangle used
  Eigen::MatrixXd dtheta;  // same layout
};
LegendreTable normalized_legendre(int lmax, double theta);

// Quadrature on S^{d-1} that integrates any product of basis elements with
// total degree <= D exactly (to roundoff). d = 2: uniform trapezoid with
// >= 2D+2 nodes. d = 3: Gauss-Legendre in cos(theta) with >= D+1 nodes
// tensored with a uniform azimuthal grid of >= 2D+2 nodes. Node counts are
// fixed by D alone (never adaptive). Weights sum to sphere_area(d).
struct QuadratureRule {
  int dim = 0;
  int degree = 0;
  std::vector<std::array<double, 2>> angles;  // (theta, phi); phi = 0 for d = 2
  std::vector<double> weights;
};
QuadratureRule sphere_quadrature(int d, int D);

// integral over S^{d-1} of Y_a conj(Y_b) Y_c (complex-standard basis).
// ClosedForm uses the exponent-sum selection rule for d = 2 and the
// Wigner-3j (Gaunt) expression for d = 3; Quadrature integrates with a rule
// of degree l_a + l_b + l_c. The two routes agree to ~1e-12 and are kept as
// mutual cross-checks.
enum class TripleProductMethod { Quadrature, ClosedForm };
Complex triple_product(HarmonicIndex a, HarmonicIndex b, HarmonicIndex c,
                       int d, TripleProductMethod method);

// Wigner 3j symbol (l1 l2 l3; m1 m2 m3) for integer arguments, evaluated via
// the Racah single-sum formula in log-gamma arithmetic with explicit sign
// tracking (stable for the degree ranges used here, l <= ~30).
double wigner_3j(int l1, int l2, int l3, int m1, int m2, int m3);

// Basis changes for coefficient tables of *real-valued* functions.
// to_complex_coefficients: real-basis table (imaginary parts must vanish) ->
// complex-standard table satisfying the reality condition
// (d = 3: conj(a_{l,m}) = (-1)^m a_{l,-m}; d = 2: conj(a_{l,1}) = a_{l,2}).
// to_real_coefficients inverts it and throws std::invalid_argument when the
// input violates the reality condition beyond `reality_tol` (relative to the
// largest coefficient magnitude, floored at 1).
CoeffMap to_complex_coefficients(const CoeffMap& real_coeffs, int d,
                                 double reality_tol = 1e-12);
CoeffMap to_real_coefficients(const CoeffMap& complex_coeffs, int d,
                              double reality_tol = 1e-12);

// Max |deviation| from the reality condition of a complex-basis table
// (0 for an empty table). Used by the transforms and by field validation.
double reality_defect(const CoeffMap& complex_coeffs, int d);

}  // namespace steklov
