#include "steklov/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "steklov/harmonics.hpp"

namespace steklov {

namespace {

double merge_tol(double value) { return 1e-9 * std::max(1.0, std::abs(value)); }

// Rigorous lower bound for the annulus eigenvalues of degree n >= 1:
// mu_{n,1} mu_{n,2} = n(n+d-2)/(r_i r_o) and mu_{n,2} <= B with
// B <= 2[(n+d-2) + n q]/(r_i (1-q^2)), giving
// mu_{n,1} >= P/B >= n (1-q)/(2 r_o). Used for provably complete cutoffs.
double degree_lower_bound(const DomainSpec& dom, int n) {
  const double q = dom.r_inner / dom.r_outer;
  return n * (1.0 - q) / (2.0 * dom.r_outer);
}

struct BranchValue {
  double value;
  int degree;
  int branch;
  long mult;
};

// Raw (value, degree, branch) eigenvalues of the annulus at degree n,
// without profiles or indices; shared by indexing and enumeration.
std::pair<double, double> annulus_values(const DomainSpec& dom, int n) {
  const double ri = dom.r_inner, ro = dom.r_outer;
  const int d = dom.dim;
  if (n == 0) {
    double mu2;
    if (d == 2)
      mu2 = -(ri + ro) / (ri * ro * std::log(ri / ro));
    else
      mu2 = (d - 2.0) * (std::pow(ro, d - 1) + std::pow(ri, d - 1)) /
            (ri * ro * (std::pow(ro, d - 2) - std::pow(ri, d - 2)));
    return {0.0, mu2};
  }
  const double B =
      ((n + d - 2.0) * (std::pow(ro, 2 * n + d - 1) + std::pow(ri, 2 * n + d - 1)) +
       n * ri * ro * (std::pow(ro, 2 * n + d - 3) + std::pow(ri, 2 * n + d - 3))) /
      (ri * ro * (std::pow(ro, 2 * n + d - 2) - std::pow(ri, 2 * n + d - 2)));
  const double P = n * (n + d - 2.0) / (ri * ro);
  const double disc = B * B - 4.0 * P;
  if (disc < 0.0)
    throw std::runtime_error("annulus eigenvalue discriminant is negative");
  // Large root directly, small root via the product to avoid cancellation.
  const double mu2 = 0.5 * (B + std::sqrt(disc));
  return {P / mu2, mu2};
}

// Count of spectrum slots (with multiplicity) strictly below `value`,
// i.e. the ascending index of the first slot equal to `value`.
long count_below(const DomainSpec& dom, double value) {
  const double tol = merge_tol(value);
  long count = 0;
  if (!dom.is_annulus()) {
    for (int n = 0; n / dom.r_outer < value - tol; ++n)
      count += multiplicity(n, dom.dim);
    return count;
  }
  for (int n = 0;; ++n) {
    if (n >= 1 && degree_lower_bound(dom, n) > value + tol) break;
    const auto [mu1, mu2] = annulus_values(dom, n);
    if (mu1 < value - tol) count += multiplicity(n, dom.dim);
    if (mu2 < value - tol) count += multiplicity(n, dom.dim);
  }
  return count;
}

// Unit-boundary-norm normalization: divide the profile by
// sqrt(sum over boundary spheres of r^{d-1} f(r)^2) and fix f(r_outer) > 0.
void normalize_profile(RadialProfile& p, const DomainSpec& dom) {
  double norm2 = std::pow(dom.r_outer, dom.dim - 1) *
                 p.eval(dom.r_outer) * p.eval(dom.r_outer);
  if (dom.is_annulus())
    norm2 += std::pow(dom.r_inner, dom.dim - 1) *
             p.eval(dom.r_inner) * p.eval(dom.r_inner);
  double c = std::sqrt(norm2);
  if (c == 0.0) throw std::runtime_error("degenerate radial profile");
  if (p.eval(dom.r_outer) < 0.0) c = -c;
  p.c_pow /= c;
  p.c_neg /= c;
  p.c_log /= c;
  p.c_const /= c;
}

RadialProfile annulus_profile(const DomainSpec& dom, int n, double mu) {
  const double ri = dom.r_inner, ro = dom.r_outer;
  const int d = dom.dim;
  RadialProfile p;
  p.dim = d;
  p.degree = n;
  if (mu == 0.0) {
    p.c_const = 1.0;  // constant eigenfunction
  } else if (n == 0 && d == 2) {
    // f = a + b ln r with the outer condition f'(r_o) = mu f(r_o);
    // the inner condition holds automatically at the eigenvalue.
    p.c_log = 1.0;
    p.c_const = 1.0 / (mu * ro) - std::log(ro);
  } else {
    // f = a r^n + b r^{-(d+n-2)} solving both Steklov boundary conditions.
    const double a =
        (d + n - 2.0) * (std::pow(ro, -(d + n - 1)) - std::pow(ri, -(d + n - 1))) +
        mu * (std::pow(ro, -(d + n - 2)) + std::pow(ri, -(d + n - 2)));
    const double b = n * (std::pow(ro, n - 1) - std::pow(ri, n - 1)) -
                     mu * (std::pow(ro, n) + std::pow(ri, n));
    if (n == 0) {
      p.c_const = a;  // r^0 slot
      p.c_neg = b;
    } else {
      p.c_pow = a;
      p.c_neg = b;
    }
  }
  normalize_profile(p, dom);
  return p;
}

}  // namespace

void DomainSpec::validate() const {
  if (dim < 2) throw std::invalid_argument("domain dimension must be >= 2");
  if (!(r_outer > 0.0))
    throw std::invalid_argument("outer radius must be positive");
  if (kind == DomainKind::Annulus) {
    if (!(r_inner > 0.0 && r_inner < r_outer))
      throw std::invalid_argument(
          "annulus radii must satisfy 0 < r_inner < r_outer");
  } else if (r_inner != 0.0) {
    throw std::invalid_argument("ball domains must have r_inner == 0");
  }
}

double RadialProfile::eval(double r) const {
  double v = c_const;
  if (c_pow != 0.0) v += c_pow * std::pow(r, degree);
  if (c_neg != 0.0) v += c_neg * std::pow(r, -(dim + degree - 2));
  if (c_log != 0.0) v += c_log * std::log(r);
  return v;
}

double RadialProfile::deriv(double r) const {
  double v = 0.0;
  if (c_pow != 0.0 && degree != 0)
    v += c_pow * degree * std::pow(r, degree - 1);
  if (c_neg != 0.0 && dim + degree - 2 != 0)
    v -= c_neg * (dim + degree - 2) * std::pow(r, -(dim + degree - 1));
  if (c_log != 0.0) v += c_log / r;
  return v;
}

SteklovEigen ball_eigen(const DomainSpec& domain, int n) {
  domain.validate();
  if (domain.is_annulus())
    throw std::invalid_argument("ball_eigen requires a ball domain");
  if (n < 0) throw std::invalid_argument("degree must be >= 0");

  SteklovEigen e;
  e.value = n / domain.r_outer;
  e.degree = n;
  e.branch = 1;
  e.multiplicity = multiplicity(n, domain.dim);
  e.index = 0;
  for (int j = 0; j < n; ++j) e.index += multiplicity(j, domain.dim);

  e.profile.dim = domain.dim;
  e.profile.degree = n;
  const double c =
      std::pow(domain.r_outer, -(domain.dim - 1) / 2.0 - n);
  if (n == 0)
    e.profile.c_const = c;
  else
    e.profile.c_pow = c;
  return e;
}

std::pair<SteklovEigen, SteklovEigen> annulus_eigen(const DomainSpec& domain,
                                                    int n) {
  domain.validate();
  if (!domain.is_annulus())
    throw std::invalid_argument("annulus_eigen requires an annulus domain");
  if (n < 0) throw std::invalid_argument("degree must be >= 0");

  const auto [mu1, mu2] = annulus_values(domain, n);
  auto make = [&](double mu, int branch) {
    SteklovEigen e;
    e.value = mu;
    e.degree = n;
    e.branch = branch;
    e.multiplicity = multiplicity(n, domain.dim);
    e.index = count_below(domain, mu);
    e.profile = annulus_profile(domain, n, mu);
    return e;
  };
  return {make(mu1, 1), make(mu2, 2)};
}

std::vector<SteklovEigen> enumerate_spectrum(const DomainSpec& domain,
                                             int count) {
  domain.validate();
  if (count <= 0) throw std::invalid_argument("count must be positive");

  // Collect candidate (value, degree, branch) triples for degrees 0..n_max,
  // growing n_max until the enumeration is provably complete.
  std::vector<BranchValue> all;
  int n_max = 4;
  for (;;) {
    all.clear();
    long total = 0;
    for (int n = 0; n <= n_max; ++n) {
      const long mult = multiplicity(n, domain.dim);
      if (domain.is_annulus()) {
        const auto [mu1, mu2] = annulus_values(domain, n);
        all.push_back({mu1, n, 1, mult});
        all.push_back({mu2, n, 2, mult});
        total += 2 * mult;
      } else {
        all.push_back({n / domain.r_outer, n, 1, mult});
        total += mult;
      }
    }
    if (total < count) {
      n_max *= 2;
      continue;
    }
    std::sort(all.begin(), all.end(),
              [](const BranchValue& a, const BranchValue& b) {
                return a.value < b.value;
              });
    long acc = 0;
    double last = 0.0;
    for (const auto& bv : all) {
      acc += bv.mult;
      if (acc >= count) {
        last = bv.value;
        break;
      }
    }
    // Every omitted degree must lie provably above the last returned value.
    const bool complete =
        domain.is_annulus()
            ? degree_lower_bound(domain, n_max + 1) > last + merge_tol(last)
            : (n_max + 1) / domain.r_outer > last;
    if (complete) break;
    ++n_max;
  }

  // Merge coincident values, then expand by multiplicity with shared indices.
  std::vector<SteklovEigen> out;
  long cursor = 0;
  size_t i = 0;
  while (i < all.size() && static_cast<long>(out.size()) < count) {
    size_t j = i + 1;
    long group_mult = all[i].mult;
    while (j < all.size() &&
           all[j].value - all[i].value <= merge_tol(all[i].value)) {
      group_mult += all[j].mult;
      ++j;
    }
    SteklovEigen e;
    e.value = all[i].value;
    e.degree = all[i].degree;
    e.branch = all[i].branch;
    e.multiplicity = group_mult;
    e.index = cursor;
    e.profile = domain.is_annulus()
                    ? annulus_profile(domain, all[i].degree, all[i].value)
                    : ball_eigen(domain, all[i].degree).profile;
    for (long r = 0; r < group_mult && static_cast<long>(out.size()) < count;
         ++r)
      out.push_back(e);
    cursor += group_mult;
    i = j;
  }
  return out;
}

}  // namespace steklov
