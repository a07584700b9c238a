// perturbation.hpp — eigenvalue-multiplicity-perturbation (EMP) matrices:
// the first-order response of a Steklov eigenvalue of a ball or annulus to
// a normal boundary deformation, plus criticality classification.
//
// A deformation is described per boundary sphere by the Fourier-Laplace
// coefficients a_{l,m} of its outward-from-the-origin radial displacement
// density V_n on that sphere (a real-valued function; the inner boundary's
// orientation flip is built into the assembly formulas below).
//
// For a target eigenvalue with degree n, eigenspace dimension p, and
// orthonormal eigenbasis u_1..u_p, the p x p Hermitian matrix
//
//   ball:    M_ij = sum_{l even, l <= 2n} sum_m a_{l,m,ro} B(l, ro)
//                      * I(Y_n^i, Y_n^j, Y_l^m),
//            B(l, r) = -(l(l+d-2)/2 + n) / r^2,
//   annulus: M_ij = sum_{l,m} [a_{l,m,ro} A(ro, l) - a_{l,m,ri} A(ri, l)]
//                      * I(Y_n^i, Y_n^j, Y_l^m),
//            A(r, l)  = f(r)^2 r^{d-3} (n(n+d-2) - l(l+d-2)/2 - r^2 mu^2
//                        -+ (d-1) r mu)   [- at r_o, + at r_i],
//
// with I(a, b, c) = integral of Y_a conj(Y_b) Y_c over S^{d-1} and f the
// unit-boundary-norm radial profile, has as eigenvalues exactly the one-sided
// t-derivatives at t = 0 of the (reordered) perturbed eigenvalue branches.
// Odd degrees l and degrees l > 2n never contribute (parity / triangle
// selection rules) and are skipped.
//
// Trace identities (valid for every d >= 2):
//   ball:    tr M = -a_{0,ro} n N_{n,d} / (r_o sqrt(omega_{d-1}))
//   annulus: tr M = [a_{0,ro} A(r_o, 0) - a_{0,ri} A(r_i, 0)]
//                    * N_{n,d} / sqrt(omega_{d-1})
// where a_{0,r} is the coefficient of the constant harmonic (zero iff the
// deformation preserves volume at first order on that boundary).

#pragma once

#include <vector>

#include <Eigen/Core>

#include "steklov/harmonics.hpp"
#include "steklov/spectra.hpp"

namespace steklov {

struct DeformationField {
  int dim = 2;
  Basis basis = Basis::ComplexStandard;
  CoeffMap outer;  // coefficients on the outer boundary sphere
  CoeffMap inner;  // coefficients on the inner boundary sphere (annuli only)

  // Largest coefficient magnitude across both boundaries, floored at 1;
  // the reference scale for zero/reality tolerances.
  double coefficient_scale() const;

  // Max deviation from the real-valuedness condition across both boundaries
  // (complex basis: conjugation symmetry; real basis: imaginary parts).
  double reality_defect_max() const;

  // True when the constant-harmonic coefficient on the given boundary
  // vanishes (|a_0| <= tol * coefficient_scale()): volume is preserved at
  // first order by that boundary's displacement.
  bool volume_preserving(bool outer_boundary, double tol = 1e-10) const;

  // Same field with complex-standard coefficient tables.
  DeformationField to_complex(double reality_tol = 1e-12) const;

  friend bool operator==(const DeformationField&, const DeformationField&) = default;
};

struct EmpMatrix {
  Eigen::MatrixXcd matrix;            // p x p, Hermitian
  std::vector<double> eigenvalues;    // ascending
  SteklovEigen eigen;                 // the target eigenvalue
  Basis basis = Basis::ComplexStandard;  // eigenspace basis used for rows/cols
  double trace() const;
};

struct Subdifferential {
  double lo = 0.0;
  double hi = 0.0;
};

struct Classification {
  Subdifferential subdifferential;  // [min, max] of the EMP eigenvalues
  bool critical = false;            // 0 in [lo, hi] (within tolerance)
  bool trace_zero = false;
  bool zero_matrix = false;         // all entries below tolerance
  bool strict_saddle_pair = false;  // trace_zero && !zero_matrix: the
                                    // perturbation strictly increases the
                                    // top branch and decreases the bottom one
  const char* label() const { return critical ? "CRITICAL" : "NOT_CRITICAL"; }
};

// Ball diagonal/off-diagonal weight B(l, r) for target degree n.
double ball_entry_factor(int l, double r, int n, int d);

// Annulus weight A(r, l) at the outer (outer_boundary = true) or inner
// boundary for the target eigenvalue `eigen`.
double annulus_entry_factor(const DomainSpec& domain, const SteklovEigen& eigen,
                            bool outer_boundary, int l);

// Assemble the EMP matrix of `eigen` under `field`. d must be 2 or 3.
// ClosedForm uses the d = 2 selection rule / d = 3 Wigner-3j expressions and
// requires complex-standard field coefficients; Quadrature integrates the
// triple products numerically in the field's own basis (complex or real) and
// is kept as an independent cross-check of the closed forms.
EmpMatrix emp_matrix(const DomainSpec& domain, const SteklovEigen& eigen,
                     const DeformationField& field,
                     TripleProductMethod method = TripleProductMethod::ClosedForm);

// Explicit 2 x 2 closed form for d = 2 targets with degree n >= 1
// (disk and annulus); must equal the general assembly to roundoff.
Eigen::MatrixXcd emp_matrix_closed_2d(const DomainSpec& domain,
                                      const SteklovEigen& eigen,
                                      const DeformationField& field);

// Trace identity (any d >= 2); must match emp_matrix(...).trace() for d = 2, 3.
double emp_trace_formula(const DomainSpec& domain, const SteklovEigen& eigen,
                         const DeformationField& field);

// Subdifferential of the eigenvalue under the deformation plus the
// criticality labels. `zero_tol` is relative to the field coefficient scale.
Classification subdifferential_and_classify(const EmpMatrix& emp,
                                            const DeformationField& field,
                                            double zero_tol = 1e-10);

// For a d = 2 annulus target with degree n >= 1: given inner-boundary
// coefficients supported on degree 2n, returns the deformation whose outer
// coefficients a_{2n,m,ro} = a_{2n,m,ri} * A(r_i, 2n) / A(r_o, 2n) cancel the
// EMP matrix identically. Throws if A(r_o, 2n) vanishes or the input carries
// degrees other than 2n.
DeformationField cancellation_coefficients(const DomainSpec& domain,
                                           const SteklovEigen& eigen,
                                           const CoeffMap& inner_coeffs);

}  // namespace steklov
