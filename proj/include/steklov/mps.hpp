// mps.hpp — method of particular solutions for Steklov eigenvalues of
// deformed balls and annuli, and slope extraction at t = 0 for comparison
// against the first-order matrix predictions.
//
// The domain boundary is the graph R(x) = r + t V(x) over each unperturbed
// boundary sphere of radius r, where V is the real deformation density held
// in a DeformationField. Trial functions are harmonic polynomials
// r^l Y_{l,m} (plus the singular family r^{-(l+d-2)} Y_{l,m} and, for d = 2,
// l = 0, log r on annuli) up to degree L in the real harmonic basis. Values
// and outward normal derivatives are collocated on each boundary:
//
//   B[p, c] = u_c(x_p),   A[p, c] = grad u_c(x_p) . n(x_p),
//
//   n = (1, -R_theta / R, -R_phi / (R sin theta)) / sqrt(1 + |grad_S R|^2/R^2)
//
// in the spherical frame (e_r, e_theta, e_phi), with the sign flipped on the
// inner boundary so n always points out of the domain. The generalized
// least-squares pencil A c = sigma B c is reduced by an eigendecomposition of
// B^T B (columns of A and B are pre-scaled to unit B-column norm; modes with
// eigenvalue <= rank_cutoff * max are discarded), and the reduced, symmetrized
// operator is diagonalized. Discrete eigenvalues with sigma <= L / r_min are
// trusted ("resolved"); larger ones are reported but flagged.
//
// branch_sweep repeats the solve over a grid of amplitudes t and returns the
// lowest branches sorted ascending per t; slopes_at_zero fits one-sided
// quadratics through the two smallest |t| on each side of 0 to estimate the
// one-sided derivatives of a chosen eigenvalue window at t = 0.

#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "steklov/perturbation.hpp"
#include "steklov/spectra.hpp"

namespace steklov {

struct MpsConfig {
  int degree_max = 7;     // L: highest harmonic degree in the trial basis
  int outer_points = 0;   // collocation points on the outer boundary; 0 = auto
  int inner_points = 0;   // collocation points on the inner boundary; 0 = auto
  double oversampling = 2.0;  // auto point count = ceil(oversampling * columns)
  double rank_cutoff = 1e-12;  // relative eigenvalue cutoff in B^T B
  int branch_count = 20;       // branches retained by branch_sweep
  std::vector<double> t_grid;  // amplitudes; empty = default_t_grid()

  void validate() const;

  friend bool operator==(const MpsConfig&, const MpsConfig&) = default;
};

// +-{0.002, 0.004, 0.006, 0.008, 0.01, 0.0125, 0.015, 0.0175, 0.02} and 0.
std::vector<double> default_t_grid();

// Deterministic collocation angles on S^{d-1}. d = 2: uniform. d = 3: the
// staircase equal-area construction when it hits the requested count exactly,
// otherwise a Fibonacci spiral with exactly `count` points.
std::vector<std::array<double, 2>> collocation_angles(int d, int count);

// One column of the trial basis.
struct TrialColumn {
  HarmonicIndex idx;
  // 0: r^l; 1: r^{-(l+d-2)} (d = 2, l = 0: log r). Family 1 on annuli only.
  int family = 0;
};

struct TrialBasis {
  int dim = 2;
  int degree_max = 0;
  std::vector<TrialColumn> columns;
};

TrialBasis trial_basis(const DomainSpec& domain, int degree_max);

// Radial factor of a trial column and its derivative at radius r > 0.
double trial_radial(const TrialColumn& col, int d, double r);
double trial_radial_deriv(const TrialColumn& col, int d, double r);

// Geometry of one collocated boundary point of R = r + t V.
struct BoundaryPoint {
  std::array<double, 2> angles{};  // (theta, phi); phi unused for d = 2
  double radius = 0.0;             // R
  double d_theta = 0.0;            // dR/dtheta
  double d_phi = 0.0;              // dR/dphi (0 for d = 2)
};

// Evaluate the perturbed boundary over the given angles. Throws when the
// radius drops to 0 or below.
std::vector<BoundaryPoint> perturbed_boundary(
    const DomainSpec& domain, const DeformationField& field,
    bool outer_boundary, double t,
    std::span<const std::array<double, 2>> angles);

// Collocated value and normal-derivative matrices (outer rows first).
struct MpsSystem {
  TrialBasis basis;
  Eigen::MatrixXd values;             // B
  Eigen::MatrixXd normal_derivatives; // A
  double min_radius = 0.0;            // min sampled distance to the origin
  std::vector<std::string> warnings;  // e.g. under-collocated boundaries
};

MpsSystem assemble_system(const DomainSpec& domain,
                          const DeformationField& field, double t,
                          const MpsConfig& config);

struct MpsResult {
  std::vector<double> eigenvalues;  // ascending, all retained modes
  int resolved_count = 0;   // prefix with sigma <= degree_max / min_radius
  int rank = 0;             // modes kept out of basis.columns.size()
  TrialBasis basis;
  Eigen::MatrixXd coefficients;  // columns.size() x eigenvalues.size()
  // Largest |Im|/max(1,|Re|) over the reduced eigenvalues; nonzero values
  // measure how far the collocated problem is from a symmetric pencil.
  double max_relative_imag = 0.0;
  std::vector<std::string> warnings;
};

MpsResult solve_steklov(const DomainSpec& domain, const DeformationField& field,
                        double t, const MpsConfig& config);

struct BranchSweep {
  std::vector<double> t_values;  // ascending; contains 0
  Eigen::MatrixXd eigenvalues;   // t_values.size() x branch_count, ascending rows
  std::vector<int> resolved_counts;  // per t, clipped to branch_count
  std::vector<std::string> warnings;
};

BranchSweep branch_sweep(const DomainSpec& domain,
                         const DeformationField& field,
                         const MpsConfig& config);

struct SlopeEstimate {
  int branch = 0;             // absolute branch index in the sweep
  double value_at_zero = 0.0;
  double left = 0.0;          // one-sided derivative at t = 0-
  double right = 0.0;         // one-sided derivative at t = 0+
};

// One-sided slopes of the branches carrying `eigen` (branch indices
// eigen.index .. eigen.index + multiplicity - 1). Requires at least two
// positive and two negative amplitudes plus t = 0 in the sweep; fits a
// quadratic through t = 0 and the two smallest |t| per side. Throws when the
// window is not isolated over that stencil: a neighboring branch whose
// movement times 10 exceeds its gap to the window, or a window branch moving
// more than half the smaller gap, indicates crossings that corrupt
// sorted-order slopes.
std::vector<SlopeEstimate> slopes_at_zero(const BranchSweep& sweep,
                                          const SteklovEigen& eigen);

}  // namespace steklov
