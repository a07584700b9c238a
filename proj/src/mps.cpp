#include "steklov/mps.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <iomanip>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "steklov/harmonics.hpp"

namespace steklov {

namespace {

constexpr double kPi = std::numbers::pi;

struct ScalarJet {
  double value = 0.0;
  double d_theta = 0.0;
  double d_phi = 0.0;
};

ScalarJet field_jet(const CoeffMap& coeffs, int d, Basis basis,
                    std::span<const double> angles) {
  Complex v{}, dt{}, dp{};
  for (const auto& [key, c] : coeffs) {
    const HarmonicJet jet = eval_harmonic_jet(key, d, angles, basis);
    v += c * jet.value;
    dt += c * jet.d_theta;
    dp += c * jet.d_phi;
  }
  return {v.real(), dt.real(), dp.real()};
}

void check_field(const DomainSpec& domain, const DeformationField& field) {
  if (field.dim != domain.dim)
    throw std::invalid_argument(
        "deformation field dimension does not match the domain");
  if (!domain.is_annulus() && !field.inner.empty())
    throw std::invalid_argument(
        "inner-boundary coefficients supplied for a ball domain");
  if (field.reality_defect_max() > 1e-10 * field.coefficient_scale())
    throw std::invalid_argument(
        "deformation field must describe a real-valued displacement");
}

// Derivative at 0 of the quadratic through (0, f0), (t1, f1), (t2, f2).
double fitted_slope(double t1, double f1, double t2, double f2, double f0) {
  return (t2 * t2 * (f1 - f0) - t1 * t1 * (f2 - f0)) /
         (t1 * t2 * (t2 - t1));
}

}  // namespace

void MpsConfig::validate() const {
  if (degree_max < 1)
    throw std::invalid_argument("MpsConfig: degree_max must be >= 1");
  if (outer_points < 0 || inner_points < 0)
    throw std::invalid_argument("MpsConfig: point counts must be >= 0");
  if (!(oversampling > 0.0))
    throw std::invalid_argument("MpsConfig: oversampling must be positive");
  if (!(rank_cutoff > 0.0) || rank_cutoff >= 1.0)
    throw std::invalid_argument("MpsConfig: rank_cutoff must lie in (0, 1)");
  if (branch_count < 1)
    throw std::invalid_argument("MpsConfig: branch_count must be >= 1");
  for (double t : t_grid)
    if (!std::isfinite(t))
      throw std::invalid_argument("MpsConfig: t grid entries must be finite");
}

std::vector<double> default_t_grid() {
  const std::vector<double> plus = {0.002, 0.004,  0.006, 0.008,  0.01,
                                    0.0125, 0.015, 0.0175, 0.02};
  std::vector<double> grid;
  for (auto it = plus.rbegin(); it != plus.rend(); ++it) grid.push_back(-*it);
  grid.push_back(0.0);
  grid.insert(grid.end(), plus.begin(), plus.end());
  return grid;
}

std::vector<std::array<double, 2>> collocation_angles(int d, int count) {
  if (count < 1)
    throw std::invalid_argument("collocation_angles: count must be >= 1");
  std::vector<std::array<double, 2>> angles;
  if (d == 2) {
    angles.reserve(count);
    for (int j = 0; j < count; ++j)
      angles.push_back({2.0 * kPi * j / count, 0.0});
    return angles;
  }
  if (d != 3)
    throw std::invalid_argument("collocation_angles: d must be 2 or 3");

  // Staircase equal-area placement: rings of equal latitude width, each ring
  // holding as many equally spaced points as its circumference allows.
  const double cell_area = 4.0 * kPi / count;
  const double cell_side = std::sqrt(cell_area);
  const int rings = std::max(1, static_cast<int>(std::lround(kPi / cell_side)));
  const double ring_width = kPi / rings;
  const double step_phi = cell_area / ring_width;
  for (int i = 0; i < rings; ++i) {
    const double theta = kPi * (i + 0.5) / rings;
    const int slots = std::max(
        1, static_cast<int>(std::lround(2.0 * kPi * std::sin(theta) / step_phi)));
    for (int j = 0; j < slots; ++j)
      angles.push_back({theta, 2.0 * kPi * j / slots});
  }
  if (static_cast<int>(angles.size()) == count) return angles;

  // The staircase count rarely matches exactly; fall back to a Fibonacci
  // spiral, which hits any requested count.
  angles.clear();
  angles.reserve(count);
  const double golden_angle = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / count;
    const double theta = std::acos(std::clamp(z, -1.0, 1.0));
    const double phi = std::fmod(i * golden_angle, 2.0 * kPi);
    angles.push_back({theta, phi < 0.0 ? phi + 2.0 * kPi : phi});
  }
  return angles;
}

TrialBasis trial_basis(const DomainSpec& domain, int degree_max) {
  domain.validate();
  if (degree_max < 1)
    throw std::invalid_argument("trial_basis: degree_max must be >= 1");
  if (domain.dim != 2 && domain.dim != 3)
    throw std::invalid_argument("trial_basis: d must be 2 or 3");

  TrialBasis basis;
  basis.dim = domain.dim;
  basis.degree_max = degree_max;
  const bool annulus = domain.is_annulus();
  auto emit = [&](HarmonicIndex idx) {
    basis.columns.push_back({idx, 0});
    if (annulus) basis.columns.push_back({idx, 1});
  };
  for (int l = 0; l <= degree_max; ++l) {
    if (domain.dim == 2) {
      emit({l, 1});
      if (l >= 1) emit({l, 2});
    } else {
      for (int m = -l; m <= l; ++m) emit({l, m});
    }
  }
  return basis;
}

double trial_radial(const TrialColumn& col, int d, double r) {
  if (r <= 0.0) throw std::invalid_argument("trial_radial: r must be positive");
  if (col.family == 0) return std::pow(r, col.idx.l);
  if (d == 2 && col.idx.l == 0) return std::log(r);
  return std::pow(r, -(col.idx.l + d - 2));
}

double trial_radial_deriv(const TrialColumn& col, int d, double r) {
  if (r <= 0.0)
    throw std::invalid_argument("trial_radial_deriv: r must be positive");
  if (col.family == 0) {
    if (col.idx.l == 0) return 0.0;
    return col.idx.l * std::pow(r, col.idx.l - 1);
  }
  if (d == 2 && col.idx.l == 0) return 1.0 / r;
  const int e = col.idx.l + d - 2;
  return -e * std::pow(r, -(e + 1));
}

std::vector<BoundaryPoint> perturbed_boundary(
    const DomainSpec& domain, const DeformationField& field,
    bool outer_boundary, double t,
    std::span<const std::array<double, 2>> angles) {
  domain.validate();
  if (!outer_boundary && !domain.is_annulus())
    throw std::invalid_argument(
        "perturbed_boundary: ball domains have no inner boundary");
  const double r = outer_boundary ? domain.r_outer : domain.r_inner;
  const CoeffMap& coeffs = outer_boundary ? field.outer : field.inner;
  const int d = domain.dim;

  std::vector<BoundaryPoint> points;
  points.reserve(angles.size());
  for (const auto& ang : angles) {
    const std::span<const double> a(ang.data(), d == 2 ? 1 : 2);
    const ScalarJet v = field_jet(coeffs, d, field.basis, a);
    BoundaryPoint p;
    p.angles = ang;
    p.radius = r + t * v.value;
    p.d_theta = t * v.d_theta;
    p.d_phi = t * v.d_phi;
    if (p.radius <= 0.0)
      throw std::runtime_error(
          "perturbed boundary reaches the origin (radius <= 0); reduce |t|");
    points.push_back(p);
  }
  return points;
}

MpsSystem assemble_system(const DomainSpec& domain,
                          const DeformationField& field, double t,
                          const MpsConfig& config) {
  config.validate();
  domain.validate();
  check_field(domain, field);

  MpsSystem sys;
  sys.basis = trial_basis(domain, config.degree_max);
  const int d = domain.dim;
  const auto n_cols = static_cast<Eigen::Index>(sys.basis.columns.size());

  auto auto_count = [&](int requested) {
    if (requested > 0) return requested;
    return static_cast<int>(
        std::ceil(config.oversampling * static_cast<double>(n_cols)));
  };
  // Each boundary must carry at least its share of the ansatz coefficients;
  // below twice that share the pencil is usable but flagged.
  const auto share =
      n_cols / static_cast<Eigen::Index>(domain.is_annulus() ? 2 : 1);
  auto check_count = [&](const char* name, int count) {
    if (count < share)
      throw std::invalid_argument(
          std::string(name) + " collocation count " + std::to_string(count) +
          " is below the per-boundary coefficient share " +
          std::to_string(share));
    if (count < 2 * share)
      sys.warnings.push_back(
          std::string(name) + " collocation count " + std::to_string(count) +
          " is below twice the per-boundary coefficient share " +
          std::to_string(share) + "; eigenvalues may be unreliable");
  };
  const int outer_count = auto_count(config.outer_points);
  check_count("outer", outer_count);

  std::vector<BoundaryPoint> points =
      perturbed_boundary(domain, field, true, t,
                         collocation_angles(d, outer_count));
  const auto n_outer = static_cast<Eigen::Index>(points.size());
  if (domain.is_annulus()) {
    const int inner_count = auto_count(config.inner_points);
    check_count("inner", inner_count);
    const auto inner_pts = perturbed_boundary(
        domain, field, false, t, collocation_angles(d, inner_count));
    double outer_min = points.front().radius, inner_max = 0.0;
    for (const auto& p : points) outer_min = std::min(outer_min, p.radius);
    for (const auto& p : inner_pts) inner_max = std::max(inner_max, p.radius);
    if (outer_min <= inner_max)
      throw std::runtime_error(
          "perturbed boundaries touch or cross (outer radius dips to " +
          std::to_string(outer_min) + ", inner rises to " +
          std::to_string(inner_max) + "); reduce |t|");
    points.insert(points.end(), inner_pts.begin(), inner_pts.end());
  }

  const auto n_rows = static_cast<Eigen::Index>(points.size());
  sys.values.resize(n_rows, n_cols);
  sys.normal_derivatives.resize(n_rows, n_cols);
  sys.min_radius = points.front().radius;

  for (Eigen::Index p = 0; p < n_rows; ++p) {
    const BoundaryPoint& pt = points[p];
    sys.min_radius = std::min(sys.min_radius, pt.radius);
    const std::span<const double> ang(pt.angles.data(), d == 2 ? 1 : 2);
    const double R = pt.radius;
    const double sin_theta = d == 3 ? std::sin(pt.angles[0]) : 1.0;
    const double grad_ratio_sq =
        (pt.d_theta * pt.d_theta +
         (d == 3 ? pt.d_phi * pt.d_phi / (sin_theta * sin_theta) : 0.0)) /
        (R * R);
    const double inv_norm = 1.0 / std::sqrt(1.0 + grad_ratio_sq);
    const double orientation = p < n_outer ? 1.0 : -1.0;

    for (Eigen::Index c = 0; c < n_cols; ++c) {
      const TrialColumn& col = sys.basis.columns[c];
      const HarmonicJet jet = eval_harmonic_jet(col.idx, d, ang, Basis::Real);
      const double y = jet.value.real();
      const double y_theta = jet.d_theta.real();
      const double y_phi = jet.d_phi.real();
      const double f = trial_radial(col, d, R);
      const double fp = trial_radial_deriv(col, d, R);

      sys.values(p, c) = f * y;
      double numerator = fp * y - (f / (R * R)) * y_theta * pt.d_theta;
      if (d == 3)
        numerator -=
            (f / (R * R)) * y_phi * pt.d_phi / (sin_theta * sin_theta);
      sys.normal_derivatives(p, c) = orientation * numerator * inv_norm;
    }
  }
  return sys;
}

MpsResult solve_steklov(const DomainSpec& domain, const DeformationField& field,
                        double t, const MpsConfig& config) {
  const MpsSystem sys = assemble_system(domain, field, t, config);
  const Eigen::Index n_cols = sys.values.cols();
  const Eigen::Index n_rows = sys.values.rows();

  MpsResult result;
  result.basis = sys.basis;
  result.warnings = sys.warnings;
  if (n_rows < n_cols)
    result.warnings.push_back(
        "collocation rows (" + std::to_string(n_rows) +
        ") fewer than the trial columns (" + std::to_string(n_cols) +
        "); the pencil is rank-deficient");

  // Scale columns to unit value-matrix norm; a right-diagonal scaling leaves
  // the pencil's eigenvalues unchanged but tames the spread between the
  // regular and singular radial families.
  Eigen::VectorXd scale(n_cols);
  for (Eigen::Index c = 0; c < n_cols; ++c) {
    const double norm = sys.values.col(c).norm();
    scale(c) = norm > 0.0 ? 1.0 / norm : 1.0;
  }
  const Eigen::MatrixXd values = sys.values * scale.asDiagonal();
  const Eigen::MatrixXd derivs = sys.normal_derivatives * scale.asDiagonal();

  const Eigen::MatrixXd gram = values.transpose() * values;
  const Eigen::MatrixXd cross = values.transpose() * derivs;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gram_eig(gram);
  if (gram_eig.info() != Eigen::Success)
    throw std::runtime_error("value-matrix Gram eigendecomposition failed");
  const double lambda_max = gram_eig.eigenvalues().maxCoeff();
  if (!(lambda_max > 0.0))
    throw std::runtime_error("value matrix is identically zero");

  const double cutoff = config.rank_cutoff * lambda_max;
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < n_cols; ++i)
    if (gram_eig.eigenvalues()(i) > cutoff) kept.push_back(i);
  const auto rank = static_cast<Eigen::Index>(kept.size());
  if (rank == 0) throw std::runtime_error("value matrix has numerical rank 0");

  Eigen::MatrixXd whitener(n_cols, rank);
  for (Eigen::Index k = 0; k < rank; ++k)
    whitener.col(k) = gram_eig.eigenvectors().col(kept[k]) /
                      std::sqrt(gram_eig.eigenvalues()(kept[k]));

  // The reduced matrix is not exactly symmetric (point sums over boundaries
  // of different densities are not the symmetric boundary integral), but its
  // eigenvalues are exact whenever the trial space contains the
  // eigenfunctions, so it is solved as a general real matrix and ordered by
  // real part.  Forcing symmetry here would trade that exactness for a
  // discretization-sized bias.
  const Eigen::MatrixXd reduced = whitener.transpose() * cross * whitener;
  Eigen::EigenSolver<Eigen::MatrixXd> eig(reduced);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("reduced eigenvalue solve failed");

  std::vector<Eigen::Index> order(static_cast<size_t>(rank));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) {
                     return eig.eigenvalues()(a).real() <
                            eig.eigenvalues()(b).real();
                   });

  result.rank = static_cast<int>(rank);
  result.eigenvalues.resize(static_cast<size_t>(rank));
  result.coefficients.resize(n_cols, rank);
  double worst_imag = 0.0;
  for (Eigen::Index k = 0; k < rank; ++k) {
    const std::complex<double> value = eig.eigenvalues()(order[k]);
    result.eigenvalues[static_cast<size_t>(k)] = value.real();
    result.coefficients.col(k) =
        scale.asDiagonal() *
        (whitener * eig.eigenvectors().col(order[k]).real());
    worst_imag = std::max(
        worst_imag,
        std::abs(value.imag()) / std::max(1.0, std::abs(value.real())));
  }
  result.max_relative_imag = worst_imag;

  const double threshold = config.degree_max / sys.min_radius;
  result.resolved_count = static_cast<int>(
      std::upper_bound(result.eigenvalues.begin(), result.eigenvalues.end(),
                       threshold) -
      result.eigenvalues.begin());
  return result;
}

BranchSweep branch_sweep(const DomainSpec& domain,
                         const DeformationField& field,
                         const MpsConfig& config) {
  config.validate();
  std::vector<double> grid =
      config.t_grid.empty() ? default_t_grid() : config.t_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (std::find(grid.begin(), grid.end(), 0.0) == grid.end())
    throw std::invalid_argument("branch_sweep: t grid must contain 0");

  BranchSweep sweep;
  sweep.t_values = grid;
  const auto n_t = static_cast<Eigen::Index>(grid.size());
  sweep.eigenvalues.resize(n_t, config.branch_count);
  sweep.resolved_counts.resize(grid.size());

  std::set<std::string> seen;
  double worst_imag = 0.0;
  for (Eigen::Index i = 0; i < n_t; ++i) {
    const MpsResult res = solve_steklov(domain, field, grid[i], config);
    if (static_cast<int>(res.eigenvalues.size()) < config.branch_count)
      throw std::runtime_error(
          "trial space yields only " + std::to_string(res.eigenvalues.size()) +
          " modes; lower branch_count or raise degree_max");
    for (int b = 0; b < config.branch_count; ++b)
      sweep.eigenvalues(i, b) = res.eigenvalues[b];
    sweep.resolved_counts[i] = std::min(res.resolved_count, config.branch_count);
    worst_imag = std::max(worst_imag, res.max_relative_imag);
    for (const auto& w : res.warnings)
      if (seen.insert(w).second) sweep.warnings.push_back(w);
  }
  if (worst_imag > 1e-8) {
    std::ostringstream msg;
    msg << "reduced eigenproblem developed complex pairs (largest relative "
           "imaginary part "
        << std::scientific << std::setprecision(1) << worst_imag
        << "); branch values near close crossings carry that uncertainty";
    sweep.warnings.push_back(msg.str());
  }
  return sweep;
}

std::vector<SlopeEstimate> slopes_at_zero(const BranchSweep& sweep,
                                          const SteklovEigen& eigen) {
  const auto n_t = static_cast<Eigen::Index>(sweep.t_values.size());
  const Eigen::Index n_branches = sweep.eigenvalues.cols();
  const auto lo = static_cast<Eigen::Index>(eigen.index);
  const Eigen::Index hi = lo + eigen.multiplicity - 1;
  if (hi >= n_branches)
    throw std::invalid_argument(
        "slopes_at_zero: eigenvalue window extends past branch_count; "
        "increase branch_count");

  Eigen::Index zero = -1;
  std::vector<Eigen::Index> positive, negative;  // sorted by |t| ascending
  for (Eigen::Index i = 0; i < n_t; ++i) {
    if (sweep.t_values[i] == 0.0) zero = i;
    else if (sweep.t_values[i] > 0.0) positive.push_back(i);
  }
  for (Eigen::Index i = n_t - 1; i >= 0; --i)
    if (sweep.t_values[i] < 0.0) negative.push_back(i);
  if (zero < 0)
    throw std::invalid_argument("slopes_at_zero: sweep lacks t = 0");
  if (positive.size() < 2 || negative.size() < 2)
    throw std::invalid_argument(
        "slopes_at_zero: need at least two amplitudes on each side of 0");

  const std::array<Eigen::Index, 5> stencil = {zero, positive[0], positive[1],
                                               negative[0], negative[1]};
  for (Eigen::Index s : stencil)
    if (sweep.resolved_counts[s] <= hi)
      throw std::runtime_error(
          "slopes_at_zero: window branches unresolved at t = " +
          std::to_string(sweep.t_values[s]) +
          "; raise degree_max or collocation counts");

  auto movement = [&](Eigen::Index b) {
    double m = 0.0;
    for (Eigen::Index s : stencil)
      m = std::max(m, std::abs(sweep.eigenvalues(s, b) -
                               sweep.eigenvalues(zero, b)));
    return m;
  };
  const double inf = std::numeric_limits<double>::infinity();
  const double gap_lo =
      lo > 0 ? sweep.eigenvalues(zero, lo) - sweep.eigenvalues(zero, lo - 1)
             : inf;
  const double gap_hi = hi + 1 < n_branches
                            ? sweep.eigenvalues(zero, hi + 1) -
                                  sweep.eigenvalues(zero, hi)
                            : inf;
  if (lo > 0 && 10.0 * movement(lo - 1) >= gap_lo)
    throw std::runtime_error(
        "slopes_at_zero: branch below the window moves into it over the "
        "stencil; refine the t grid near 0");
  if (hi + 1 < n_branches && 10.0 * movement(hi + 1) >= gap_hi)
    throw std::runtime_error(
        "slopes_at_zero: branch above the window moves into it over the "
        "stencil; refine the t grid near 0");
  const double min_gap = std::min(gap_lo, gap_hi);
  for (Eigen::Index b = lo; b <= hi; ++b)
    if (movement(b) >= 0.5 * min_gap)
      throw std::runtime_error(
          "slopes_at_zero: window branches move across half the spectral gap "
          "over the stencil; refine the t grid near 0");

  std::vector<SlopeEstimate> out;
  for (Eigen::Index b = lo; b <= hi; ++b) {
    SlopeEstimate est;
    est.branch = static_cast<int>(b);
    est.value_at_zero = sweep.eigenvalues(zero, b);
    est.right = fitted_slope(
        sweep.t_values[positive[0]], sweep.eigenvalues(positive[0], b),
        sweep.t_values[positive[1]], sweep.eigenvalues(positive[1], b),
        est.value_at_zero);
    est.left = fitted_slope(
        sweep.t_values[negative[0]], sweep.eigenvalues(negative[0], b),
        sweep.t_values[negative[1]], sweep.eigenvalues(negative[1], b),
        est.value_at_zero);
    out.push_back(est);
  }
  return out;
}

}  // namespace steklov
