#include "steklov/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <set>
#include <stdexcept>
#include <utility>

#include <Eigen/Eigenvalues>

namespace steklov {

namespace {

// Indices of an orthonormal basis of the degree-n eigenspace, in the row/
// column order used by the EMP matrix.
std::vector<HarmonicIndex> eigenspace_indices(int n, int d) {
  std::vector<HarmonicIndex> out;
  if (d == 2) {
    if (n == 0) {
      out.push_back({0, 1});
    } else {
      out.push_back({n, 1});
      out.push_back({n, 2});
    }
  } else {
    for (int m = -n; m <= n; ++m) out.push_back({n, m});
  }
  return out;
}

void check_inputs(const DomainSpec& domain, const SteklovEigen& eigen,
                  const DeformationField& field) {
  domain.validate();
  if (field.dim != domain.dim)
    throw std::invalid_argument(
        "deformation field dimension does not match the domain");
  if (eigen.profile.dim != domain.dim)
    throw std::invalid_argument(
        "eigenvalue does not belong to this domain (dimension mismatch)");
  if (!domain.is_annulus() && !field.inner.empty())
    throw std::invalid_argument(
        "inner-boundary coefficients supplied for a ball domain");
  const double defect = field.reality_defect_max();
  if (defect > 1e-10 * field.coefficient_scale())
    throw std::invalid_argument(
        "deformation field must describe a real-valued displacement "
        "(reality defect " +
        std::to_string(defect) + ")");
}

// Combined per-harmonic weight: outer contribution minus inner contribution.
Complex combined_coefficient(const DomainSpec& domain,
                             const SteklovEigen& eigen,
                             const DeformationField& field, HarmonicIndex key) {
  Complex c{0.0, 0.0};
  if (auto it = field.outer.find(key); it != field.outer.end()) {
    const double w =
        domain.is_annulus()
            ? annulus_entry_factor(domain, eigen, /*outer_boundary=*/true,
                                   key.l)
            : ball_entry_factor(key.l, domain.r_outer, eigen.degree,
                                domain.dim);
    c += it->second * w;
  }
  if (domain.is_annulus()) {
    if (auto it = field.inner.find(key); it != field.inner.end()) {
      const double w =
          annulus_entry_factor(domain, eigen, /*outer_boundary=*/false, key.l);
      c -= it->second * w;
    }
  }
  return c;
}

std::set<HarmonicIndex> field_support(const DeformationField& field) {
  std::set<HarmonicIndex> keys;
  for (const auto& [k, v] : field.outer) keys.insert(k);
  for (const auto& [k, v] : field.inner) keys.insert(k);
  return keys;
}

}  // namespace

double DeformationField::coefficient_scale() const {
  double scale = 1.0;
  for (const auto& [k, v] : outer) scale = std::max(scale, std::abs(v));
  for (const auto& [k, v] : inner) scale = std::max(scale, std::abs(v));
  return scale;
}

double DeformationField::reality_defect_max() const {
  auto defect = [&](const CoeffMap& coeffs) {
    if (basis == Basis::Real) {
      double worst = 0.0;
      for (const auto& [k, v] : coeffs)
        worst = std::max(worst, std::abs(v.imag()));
      return worst;
    }
    return reality_defect(coeffs, dim);
  };
  return std::max(defect(outer), defect(inner));
}

bool DeformationField::volume_preserving(bool outer_boundary,
                                         double tol) const {
  const HarmonicIndex constant{0, dim == 2 ? 1 : 0};
  const CoeffMap& coeffs = outer_boundary ? outer : inner;
  auto it = coeffs.find(constant);
  if (it == coeffs.end()) return true;
  return std::abs(it->second) <= tol * coefficient_scale();
}

DeformationField DeformationField::to_complex(double reality_tol) const {
  if (basis == Basis::ComplexStandard) return *this;
  DeformationField out;
  out.dim = dim;
  out.basis = Basis::ComplexStandard;
  out.outer = to_complex_coefficients(outer, dim, reality_tol);
  out.inner = to_complex_coefficients(inner, dim, reality_tol);
  return out;
}

double EmpMatrix::trace() const {
  double t = 0.0;
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) t += matrix(i, i).real();
  return t;
}

double ball_entry_factor(int l, double r, int n, int d) {
  if (l < 0 || n < 0 || d < 2 || r <= 0.0)
    throw std::invalid_argument("ball_entry_factor: bad arguments");
  return -(0.5 * l * (l + d - 2) + n) / (r * r);
}

double annulus_entry_factor(const DomainSpec& domain, const SteklovEigen& eigen,
                            bool outer_boundary, int l) {
  domain.validate();
  if (!domain.is_annulus())
    throw std::invalid_argument("annulus_entry_factor: domain is not an annulus");
  if (l < 0) throw std::invalid_argument("annulus_entry_factor: l < 0");
  const int d = domain.dim;
  const int n = eigen.degree;
  const double mu = eigen.value;
  const double r = outer_boundary ? domain.r_outer : domain.r_inner;
  const double f = eigen.profile.eval(r);
  const double orientation = outer_boundary ? -1.0 : 1.0;
  const double bracket = n * (n + d - 2) - 0.5 * l * (l + d - 2) -
                         r * r * mu * mu + orientation * (d - 1) * r * mu;
  return f * f * std::pow(r, d - 3) * bracket;
}

EmpMatrix emp_matrix(const DomainSpec& domain, const SteklovEigen& eigen,
                     const DeformationField& field,
                     TripleProductMethod method) {
  check_inputs(domain, eigen, field);
  if (domain.dim != 2 && domain.dim != 3)
    throw std::invalid_argument(
        "EMP matrix assembly is implemented for d = 2 and d = 3 "
        "(the trace formula covers all d >= 2)");
  if (method == TripleProductMethod::ClosedForm &&
      field.basis != Basis::ComplexStandard)
    throw std::invalid_argument(
        "closed-form EMP assembly requires complex-standard coefficients; "
        "convert with DeformationField::to_complex()");

  const int d = domain.dim;
  const int n = eigen.degree;
  const Basis basis = field.basis;
  const auto space = eigenspace_indices(n, d);
  const auto p = static_cast<Eigen::Index>(space.size());
  if (p != eigen.multiplicity)
    throw std::invalid_argument("eigenvalue multiplicity is inconsistent");

  // Per-harmonic combined weights. The closed-form route drops degrees that
  // the selection rules annihilate; the quadrature route keeps every term so
  // that it stays an independent check (those integrals come out zero).
  std::vector<std::pair<HarmonicIndex, Complex>> terms;
  int lmax = 0;
  for (const HarmonicIndex& key : field_support(field)) {
    if (!valid_index(key, d, basis))
      throw std::invalid_argument("deformation field has an invalid index");
    if (method == TripleProductMethod::ClosedForm &&
        (key.l % 2 != 0 || key.l > 2 * n))
      continue;
    const Complex c = combined_coefficient(domain, eigen, field, key);
    if (c == Complex{0.0, 0.0}) continue;
    terms.emplace_back(key, c);
    lmax = std::max(lmax, key.l);
  }

  EmpMatrix out;
  out.eigen = eigen;
  out.basis = basis;
  out.matrix = Eigen::MatrixXcd::Zero(p, p);

  if (method == TripleProductMethod::ClosedForm) {
    for (const auto& [key, c] : terms)
      for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < p; ++j)
          out.matrix(i, j) +=
              c * triple_product(space[i], space[j], key, d, method);
  } else if (!terms.empty()) {
    const QuadratureRule rule = sphere_quadrature(d, 2 * n + lmax);
    const auto nodes = static_cast<Eigen::Index>(rule.weights.size());
    Eigen::MatrixXcd basis_vals(nodes, p);
    for (Eigen::Index q = 0; q < nodes; ++q) {
      const std::span<const double> ang(rule.angles[q].data(), d == 2 ? 1 : 2);
      for (Eigen::Index i = 0; i < p; ++i)
        basis_vals(q, i) = eval_harmonic(space[i], d, ang, basis);
    }
    for (const auto& [key, c] : terms) {
      for (Eigen::Index q = 0; q < nodes; ++q) {
        const std::span<const double> ang(rule.angles[q].data(),
                                          d == 2 ? 1 : 2);
        const Complex field_val =
            rule.weights[q] * eval_harmonic(key, d, ang, basis);
        for (Eigen::Index i = 0; i < p; ++i)
          for (Eigen::Index j = 0; j < p; ++j)
            out.matrix(i, j) += c * field_val * basis_vals(q, i) *
                                std::conj(basis_vals(q, j));
      }
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(out.matrix);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("EMP eigenvalue computation failed to converge");
  out.eigenvalues.assign(solver.eigenvalues().data(),
                         solver.eigenvalues().data() + p);
  return out;
}

Eigen::MatrixXcd emp_matrix_closed_2d(const DomainSpec& domain,
                                      const SteklovEigen& eigen,
                                      const DeformationField& field) {
  check_inputs(domain, eigen, field);
  if (domain.dim != 2)
    throw std::invalid_argument("emp_matrix_closed_2d: domain must be planar");
  if (eigen.degree < 1)
    throw std::invalid_argument(
        "emp_matrix_closed_2d: target degree must be >= 1 (2 x 2 eigenspace)");
  if (field.basis != Basis::ComplexStandard)
    throw std::invalid_argument(
        "emp_matrix_closed_2d requires complex-standard coefficients");

  const int n = eigen.degree;
  const double inv_norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  const Complex diag =
      combined_coefficient(domain, eigen, field, {0, 1}) * inv_norm;
  Eigen::MatrixXcd m(2, 2);
  m(0, 0) = diag;
  m(1, 1) = diag;
  m(0, 1) = combined_coefficient(domain, eigen, field, {2 * n, 2}) * inv_norm;
  m(1, 0) = combined_coefficient(domain, eigen, field, {2 * n, 1}) * inv_norm;
  return m;
}

double emp_trace_formula(const DomainSpec& domain, const SteklovEigen& eigen,
                         const DeformationField& field) {
  check_inputs(domain, eigen, field);
  const DeformationField complex_field = field.to_complex();
  const int d = domain.dim;
  const int n = eigen.degree;
  const HarmonicIndex constant{0, d == 2 ? 1 : 0};
  const double mult = static_cast<double>(multiplicity(n, d));
  const double root_area = std::sqrt(sphere_area(d));

  auto coeff = [&](const CoeffMap& coeffs) {
    auto it = coeffs.find(constant);
    return it == coeffs.end() ? Complex{0.0, 0.0} : it->second;
  };
  Complex a_outer = coeff(complex_field.outer);
  if (domain.is_annulus()) {
    const Complex a_inner = coeff(complex_field.inner);
    const double w_o = annulus_entry_factor(domain, eigen, true, 0);
    const double w_i = annulus_entry_factor(domain, eigen, false, 0);
    return ((a_outer * w_o - a_inner * w_i) * mult / root_area).real();
  }
  return (-a_outer * static_cast<double>(n) * mult /
          (domain.r_outer * root_area))
      .real();
}

Classification subdifferential_and_classify(const EmpMatrix& emp,
                                            const DeformationField& field,
                                            double zero_tol) {
  if (emp.eigenvalues.empty())
    throw std::invalid_argument("EMP matrix has no eigenvalues");
  const double eps = zero_tol * field.coefficient_scale();

  Classification out;
  out.subdifferential.lo = emp.eigenvalues.front();
  out.subdifferential.hi = emp.eigenvalues.back();
  out.critical =
      out.subdifferential.lo <= eps && out.subdifferential.hi >= -eps;

  double trace = 0.0;
  for (double v : emp.eigenvalues) trace += v;
  out.trace_zero = std::abs(trace) <= eps;
  out.zero_matrix = emp.matrix.size() == 0 ||
                    emp.matrix.cwiseAbs().maxCoeff() <= eps;
  out.strict_saddle_pair = out.trace_zero && !out.zero_matrix;
  return out;
}

DeformationField cancellation_coefficients(const DomainSpec& domain,
                                           const SteklovEigen& eigen,
                                           const CoeffMap& inner_coeffs) {
  domain.validate();
  if (domain.dim != 2 || !domain.is_annulus())
    throw std::invalid_argument(
        "cancellation_coefficients: needs a planar annulus");
  if (eigen.degree < 1)
    throw std::invalid_argument(
        "cancellation_coefficients: target degree must be >= 1");

  const int l = 2 * eigen.degree;
  for (const auto& [key, value] : inner_coeffs) {
    if (key.l != l)
      throw std::invalid_argument(
          "cancellation_coefficients: inner coefficients must be supported "
          "on degree 2n = " +
          std::to_string(l));
    if (!valid_index(key, 2, Basis::ComplexStandard))
      throw std::invalid_argument(
          "cancellation_coefficients: invalid harmonic index");
  }

  const double w_inner = annulus_entry_factor(domain, eigen, false, l);
  const double w_outer = annulus_entry_factor(domain, eigen, true, l);
  if (std::abs(w_outer) <= 1e-14 * std::max(1.0, std::abs(w_inner)))
    throw std::invalid_argument(
        "cancellation_coefficients: outer boundary weight vanishes for this "
        "eigenvalue; no finite outer coefficients cancel the inner ones");

  DeformationField out;
  out.dim = 2;
  out.basis = Basis::ComplexStandard;
  out.inner = inner_coeffs;
  const double ratio = w_inner / w_outer;
  for (const auto& [key, value] : inner_coeffs) out.outer[key] = value * ratio;
  return out;
}

}  // namespace steklov
