// spectra.hpp — closed-form Steklov spectra of balls and concentric annuli
// in R^d (d >= 2).
//
// The Steklov problem on a domain Omega: Delta u = 0 in Omega,
// du/dn = sigma u on the boundary. Eigenfunctions separate as
// u = f(r) Y(theta) with Y a degree-l spherical harmonic; every eigenvalue
// therefore carries a degree l and (for annuli) a branch k in {1, 2}.
//
//  Ball of radius r_o:    sigma = l / r_o, multiplicity N_{l,d},
//                         f(r) = r_o^{-(d-1)/2} (r/r_o)^l.
//  Annulus r_i < r < r_o: for l = 0, mu_{0,1} = 0 and
//                           mu_{0,2} = -(r_i+r_o)/(r_i r_o ln(r_i/r_o))        (d = 2)
//                           mu_{0,2} = (d-2)(r_o^{d-1}+r_i^{d-1}) /
//                                      (r_i r_o (r_o^{d-2}-r_i^{d-2}))         (d >= 3);
//                         for l >= 1 the two roots of
//                           mu^2 - B mu + l(l+d-2)/(r_i r_o) = 0,
//                           B = [(l+d-2)(r_o^{2l+d-1}+r_i^{2l+d-1})
//                                + l r_i r_o (r_o^{2l+d-3}+r_i^{2l+d-3})]
//                               / (r_i r_o (r_o^{2l+d-2} - r_i^{2l+d-2})).
//
// Radial profiles are normalized so the eigenfunction f(r) Y has unit L^2
// norm over the whole boundary: sum over boundary spheres of
// r^{d-1} f(r)^2 = 1, and are sign-fixed so f(r_o) > 0.

#pragma once

#include <utility>
#include <vector>

namespace steklov {

enum class DomainKind { Ball, Annulus };

struct DomainSpec {
  DomainKind kind = DomainKind::Ball;
  int dim = 2;
  double r_outer = 1.0;
  double r_inner = 0.0;  // 0 for balls

  // Throws std::invalid_argument unless dim >= 2, r_outer > 0, and
  // (annulus) 0 < r_inner < r_outer / (ball) r_inner == 0.
  void validate() const;
  bool is_annulus() const { return kind == DomainKind::Annulus; }
  double min_radius() const { return is_annulus() ? r_inner : r_outer; }

  friend bool operator==(const DomainSpec&, const DomainSpec&) = default;
};

// Radial factor of a separated Steklov eigenfunction:
// f(r) = c_pow r^l + c_neg r^{-(d+l-2)} + c_log ln(r) + c_const.
// (The log term appears only for d = 2, l = 0; the constant slot holds
// degenerate powers so eval never forms r^0 ambiguities.)
struct RadialProfile {
  int dim = 2;
  int degree = 0;
  double c_pow = 0.0;
  double c_neg = 0.0;
  double c_log = 0.0;
  double c_const = 0.0;

  double eval(double r) const;
  double deriv(double r) const;
};

struct SteklovEigen {
  double value = 0.0;
  int degree = 0;     // spherical-harmonic degree l
  int branch = 1;     // 1 for balls; 1 (lower) or 2 (upper) for annuli
  long multiplicity = 1;
  long index = 0;     // position of the first copy in the ascending spectrum
  RadialProfile profile;
};

// Eigenvalue of the ball with harmonic degree n (sigma = n/r_outer).
SteklovEigen ball_eigen(const DomainSpec& domain, int n);

// The (mu_{n,1}, mu_{n,2}) pair of the annulus, ascending.
// For n = 0 this is (0, mu_{0,2}).
std::pair<SteklovEigen, SteklovEigen> annulus_eigen(const DomainSpec& domain,
                                                    int n);

// First `count` eigenvalues repeated by multiplicity, ascending. The degree
// cutoff is chosen so that the smallest omitted eigenvalue provably exceeds
// the last returned one (annulus lower bound mu_{n,1} >= n(1-q)/(2 r_o),
// q = r_i/r_o). Values coinciding within 1e-9*max(1,|value|) are merged into
// one entry with summed multiplicity (annotated by the lowest degree) and
// share the index of the first slot of the merged block.
std::vector<SteklovEigen> enumerate_spectrum(const DomainSpec& domain,
                                             int count);

}  // namespace steklov
