#include "steklov/harmonics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace steklov {

namespace {

constexpr double kPi = std::numbers::pi;

[[noreturn]] void bad_index(HarmonicIndex idx, int d) {
  throw std::invalid_argument("harmonic index (l=" + std::to_string(idx.l) +
                              ", m=" + std::to_string(idx.m) +
                              ") is not valid for d=" + std::to_string(d));
}

void check_dim(int d) {
  if (d < 2) throw std::invalid_argument("dimension must be >= 2");
}

// Exact binomial coefficient, safe for the modest ranges used here.
long long binomial(long long n, long long k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long long r = 1;
  for (long long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Log-factorial with a growing cache; wigner_3j is called in hot loops.
double log_factorial(int n) {
  static std::vector<double> cache{0.0, 0.0};
  while (static_cast<int>(cache.size()) <= n)
    cache.push_back(cache.back() + std::log(static_cast<double>(cache.size())));
  return cache[n];
}

// Signed azimuthal frequency of a d = 2 complex basis element:
// Y_l^1 ~ e^{-il theta}, Y_l^2 ~ e^{+il theta}.
int circle_exponent(HarmonicIndex idx) {
  if (idx.l == 0) return 0;
  return idx.m == 1 ? -idx.l : idx.l;
}

// Gauss-Legendre nodes/weights on [-1, 1] (Newton iteration on P_n; the
// classical symmetric construction, deterministic for fixed n).
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

}  // namespace

long multiplicity(int l, int d) {
  check_dim(d);
  if (l < 0) throw std::invalid_argument("degree must be >= 0");
  if (l == 0) return 1;
  // Equivalent to (d+2l-2)(d+l-3)!/(l!(d-2)!): dim of degree-l harmonics.
  return binomial(d + l - 1, l) - binomial(d + l - 3, l - 2);
}

double sphere_area(int d) {
  check_dim(d);
  return 2.0 * std::pow(kPi, d / 2.0) / std::tgamma(d / 2.0);
}

bool valid_index(HarmonicIndex idx, int d, Basis basis) {
  if (idx.l < 0) return false;
  if (d == 2) {
    if (idx.l == 0) return idx.m == 1;
    return idx.m == 1 || idx.m == 2;
  }
  if (d == 3) return std::abs(idx.m) <= idx.l;
  (void)basis;  // identical index ranges in both bases
  return false;
}

LegendreTable normalized_legendre(int lmax, double theta) {
  LegendreTable t;
  t.lmax = lmax;
  t.value = Eigen::MatrixXd::Zero(lmax + 1, lmax + 1);
  t.dtheta = Eigen::MatrixXd::Zero(lmax + 1, lmax + 1);
  const double ct = std::cos(theta), st = std::sin(theta);

  t.value(0, 0) = 1.0 / std::sqrt(4.0 * kPi);
  for (int m = 1; m <= lmax; ++m)
    t.value(m, m) =
        -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * st * t.value(m - 1, m - 1);
  for (int m = 0; m < lmax; ++m)
    t.value(m + 1, m) = std::sqrt(2.0 * m + 3.0) * ct * t.value(m, m);
  for (int m = 0; m <= lmax; ++m) {
    for (int l = m + 2; l <= lmax; ++l) {
      const double a =
          std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - m * m));
      const double b = std::sqrt(
          ((l - 1.0) * (l - 1.0) - m * m) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
      t.value(l, m) = a * (ct * t.value(l - 1, m) - b * t.value(l - 2, m));
    }
  }

  // d/dtheta ladder; the m = 0 column uses Ybar_l^{-1} = -Ybar_l^{1}.
  for (int l = 0; l <= lmax; ++l) {
    for (int m = 0; m <= l; ++m) {
      double up = (m + 1 <= l)
                      ? std::sqrt((l - m) * (l + m + 1.0)) * t.value(l, m + 1)
                      : 0.0;
      double down;
      if (m == 0)
        down = (l >= 1) ? std::sqrt(l * (l + 1.0)) * (-t.value(l, 1)) : 0.0;
      else
        down = std::sqrt((l + m) * (l - m + 1.0)) * t.value(l, m - 1);
      t.dtheta(l, m) = 0.5 * (up - down);
    }
  }
  return t;
}

HarmonicJet eval_harmonic_jet(HarmonicIndex idx, int d,
                              std::span<const double> angles, Basis basis) {
  check_dim(d);
  if (!valid_index(idx, d, basis)) bad_index(idx, d);

  HarmonicJet jet;
  if (d == 2) {
    if (angles.size() < 1)
      throw std::invalid_argument("d=2 evaluation needs one angle");
    const double th = angles[0];
    const int l = idx.l;
    if (basis == Basis::ComplexStandard) {
      if (l == 0) {
        jet.value = 1.0 / std::sqrt(2.0 * kPi);
      } else {
        const int e = circle_exponent(idx);
        jet.value = std::polar(1.0 / std::sqrt(2.0 * kPi), e * th);
        jet.d_theta = Complex(0.0, static_cast<double>(e)) * jet.value;
      }
    } else {
      if (l == 0) {
        jet.value = 1.0 / std::sqrt(2.0 * kPi);
      } else if (idx.m == 1) {
        jet.value = std::cos(l * th) / std::sqrt(kPi);
        jet.d_theta = -l * std::sin(l * th) / std::sqrt(kPi);
      } else {
        jet.value = std::sin(l * th) / std::sqrt(kPi);
        jet.d_theta = l * std::cos(l * th) / std::sqrt(kPi);
      }
    }
    return jet;
  }

  if (d != 3)
    throw std::invalid_argument(
        "explicit harmonic bases are provided for d = 2 and d = 3 only");
  if (angles.size() < 2)
    throw std::invalid_argument("d=3 evaluation needs (theta, phi)");
  const double th = angles[0], ph = angles[1];
  const int l = idx.l, m = idx.m, am = std::abs(m);
  const LegendreTable t = normalized_legendre(l, th);
  const double v = t.value(l, am), dv = t.dtheta(l, am);

  if (basis == Basis::ComplexStandard) {
    // Y_l^{-|m|} = (-1)^{|m|} conj(Y_l^{|m|}) => sign (-1)^m for m < 0.
    const double s = (m < 0 && (am % 2 == 1)) ? -1.0 : 1.0;
    const Complex az = std::polar(1.0, m * ph);
    jet.value = s * v * az;
    jet.d_theta = s * dv * az;
    jet.d_phi = Complex(0.0, static_cast<double>(m)) * jet.value;
  } else {
    const double csm = (am % 2 == 1) ? -1.0 : 1.0;  // (-1)^{|m|}
    if (m == 0) {
      jet.value = v;
      jet.d_theta = dv;
    } else if (m > 0) {
      const double f = std::sqrt(2.0) * csm;
      jet.value = f * v * std::cos(m * ph);
      jet.d_theta = f * dv * std::cos(m * ph);
      jet.d_phi = -f * v * m * std::sin(m * ph);
    } else {
      const double f = std::sqrt(2.0) * csm;
      jet.value = f * v * std::sin(am * ph);
      jet.d_theta = f * dv * std::sin(am * ph);
      jet.d_phi = f * v * am * std::cos(am * ph);
    }
  }
  return jet;
}

Complex eval_harmonic(HarmonicIndex idx, int d, std::span<const double> angles,
                      Basis basis) {
  return eval_harmonic_jet(idx, d, angles, basis).value;
}

QuadratureRule sphere_quadrature(int d, int D) {
  check_dim(d);
  if (D < 0) throw std::invalid_argument("quadrature degree must be >= 0");
  QuadratureRule rule;
  rule.dim = d;
  rule.degree = D;
  if (d == 2) {
    const int n = 2 * D + 2;
    const double w = 2.0 * kPi / n;
    for (int k = 0; k < n; ++k) {
      rule.angles.push_back({2.0 * kPi * k / n, 0.0});
      rule.weights.push_back(w);
    }
    return rule;
  }
  if (d != 3)
    throw std::invalid_argument("quadrature rules are provided for d = 2, 3");
  const int n_polar = D + 1, n_az = 2 * D + 2;
  std::vector<double> x, w;
  gauss_legendre(n_polar, x, w);
  const double waz = 2.0 * kPi / n_az;
  for (int i = 0; i < n_polar; ++i) {
    const double th = std::acos(x[i]);
    for (int j = 0; j < n_az; ++j) {
      rule.angles.push_back({th, 2.0 * kPi * j / n_az});
      rule.weights.push_back(w[i] * waz);
    }
  }
  return rule;
}

double wigner_3j(int l1, int l2, int l3, int m1, int m2, int m3) {
  if (m1 + m2 + m3 != 0) return 0.0;
  if (std::abs(m1) > l1 || std::abs(m2) > l2 || std::abs(m3) > l3) return 0.0;
  if (l3 < std::abs(l1 - l2) || l3 > l1 + l2) return 0.0;

  const int kmin = std::max({0, l2 - l3 - m1, l1 - l3 + m2});
  const int kmax = std::min({l1 + l2 - l3, l1 - m1, l2 + m2});
  if (kmin > kmax) return 0.0;

  const double pre =
      0.5 * (log_factorial(l1 + l2 - l3) + log_factorial(l1 - l2 + l3) +
             log_factorial(-l1 + l2 + l3) - log_factorial(l1 + l2 + l3 + 1) +
             log_factorial(l1 + m1) + log_factorial(l1 - m1) +
             log_factorial(l2 + m2) + log_factorial(l2 - m2) +
             log_factorial(l3 + m3) + log_factorial(l3 - m3));

  // Sum the Racah series around its largest term to limit cancellation noise.
  std::vector<double> logs(kmax - kmin + 1);
  double logmax = -1e300;
  for (int k = kmin; k <= kmax; ++k) {
    logs[k - kmin] = -(log_factorial(k) + log_factorial(l1 + l2 - l3 - k) +
                       log_factorial(l1 - m1 - k) + log_factorial(l2 + m2 - k) +
                       log_factorial(l3 - l2 + m1 + k) +
                       log_factorial(l3 - l1 - m2 + k));
    logmax = std::max(logmax, logs[k - kmin]);
  }
  double sum = 0.0;
  for (int k = kmin; k <= kmax; ++k) {
    const double term = std::exp(logs[k - kmin] - logmax);
    sum += (k % 2 == 0) ? term : -term;
  }
  const int phase_exp = ((l1 - l2 - m3) % 2 + 2) % 2;
  const double phase = phase_exp == 0 ? 1.0 : -1.0;
  return phase * sum * std::exp(pre + logmax);
}

Complex triple_product(HarmonicIndex a, HarmonicIndex b, HarmonicIndex c,
                       int d, TripleProductMethod method) {
  check_dim(d);
  for (auto idx : {a, b, c})
    if (!valid_index(idx, d, Basis::ComplexStandard)) bad_index(idx, d);

  if (method == TripleProductMethod::ClosedForm) {
    if (d == 2) {
      const int e = circle_exponent(a) - circle_exponent(b) + circle_exponent(c);
      return e == 0 ? Complex(1.0 / std::sqrt(2.0 * kPi), 0.0) : Complex(0.0);
    }
    if (d == 3) {
      // Gaunt integral with the middle factor conjugated:
      // (-1)^{m_b} sqrt((2l_a+1)(2l_b+1)(2l_c+1)/(4 pi))
      //   * (l_a l_b l_c; 0 0 0) (l_a l_b l_c; m_a -m_b m_c).
      const double g =
          std::sqrt((2.0 * a.l + 1.0) * (2.0 * b.l + 1.0) * (2.0 * c.l + 1.0) /
                    (4.0 * kPi)) *
          wigner_3j(a.l, b.l, c.l, 0, 0, 0) *
          wigner_3j(a.l, b.l, c.l, a.m, -b.m, c.m);
      const double sign = (b.m % 2 == 0) ? 1.0 : -1.0;
      return Complex(sign * g, 0.0);
    }
    throw std::invalid_argument("closed-form triple products cover d = 2, 3");
  }

  const QuadratureRule rule = sphere_quadrature(d, a.l + b.l + c.l);
  Complex acc = 0.0;
  for (size_t k = 0; k < rule.angles.size(); ++k) {
    std::span<const double> ang(rule.angles[k].data(), 2);
    acc += rule.weights[k] * eval_harmonic(a, d, ang, Basis::ComplexStandard) *
           std::conj(eval_harmonic(b, d, ang, Basis::ComplexStandard)) *
           eval_harmonic(c, d, ang, Basis::ComplexStandard);
  }
  return acc;
}

namespace {

double coeff_scale(const CoeffMap& m) {
  double s = 1.0;
  for (const auto& [k, v] : m) s = std::max(s, std::abs(v));
  return s;
}

Complex map_get(const CoeffMap& m, HarmonicIndex idx) {
  auto it = m.find(idx);
  return it == m.end() ? Complex(0.0) : it->second;
}

}  // namespace

double reality_defect(const CoeffMap& coeffs, int d) {
  check_dim(d);
  double defect = 0.0;
  for (const auto& [idx, v] : coeffs) {
    if (d == 2) {
      if (idx.l == 0) {
        defect = std::max(defect, std::abs(v.imag()));
      } else {
        const HarmonicIndex partner{idx.l, idx.m == 1 ? 2 : 1};
        defect = std::max(defect,
                          std::abs(std::conj(v) - map_get(coeffs, partner)));
      }
    } else {
      const double sign = (idx.m % 2 == 0) ? 1.0 : -1.0;
      const HarmonicIndex partner{idx.l, -idx.m};
      defect = std::max(
          defect, std::abs(std::conj(v) - sign * map_get(coeffs, partner)));
    }
  }
  return defect;
}

CoeffMap to_complex_coefficients(const CoeffMap& real_coeffs, int d,
                                 double reality_tol) {
  check_dim(d);
  const double tol = reality_tol * coeff_scale(real_coeffs);
  CoeffMap out;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (const auto& [idx, v] : real_coeffs) {
    if (!valid_index(idx, d, Basis::Real)) bad_index(idx, d);
    if (std::abs(v.imag()) > tol)
      throw std::invalid_argument(
          "real-basis coefficient has a nonzero imaginary part");
    const double b = v.real();
    if (d == 2) {
      if (idx.l == 0) {
        out[{0, 1}] += b;
      } else if (idx.m == 1) {  // cos(l theta)/sqrt(pi)
        out[{idx.l, 1}] += b * inv_sqrt2;
        out[{idx.l, 2}] += b * inv_sqrt2;
      } else {  // sin(l theta)/sqrt(pi)
        out[{idx.l, 1}] += Complex(0.0, b * inv_sqrt2);
        out[{idx.l, 2}] += Complex(0.0, -b * inv_sqrt2);
      }
    } else {
      const int l = idx.l, m = idx.m, am = std::abs(m);
      const double cs = (am % 2 == 1) ? -1.0 : 1.0;  // (-1)^m
      if (m == 0) {
        out[{l, 0}] += b;
      } else if (m > 0) {  // cosine-type
        out[{l, -am}] += b * inv_sqrt2;
        out[{l, am}] += cs * b * inv_sqrt2;
      } else {  // sine-type
        out[{l, -am}] += Complex(0.0, b * inv_sqrt2);
        out[{l, am}] += Complex(0.0, -cs * b * inv_sqrt2);
      }
    }
  }
  return out;
}

CoeffMap to_real_coefficients(const CoeffMap& complex_coeffs, int d,
                              double reality_tol) {
  check_dim(d);
  for (const auto& [idx, v] : complex_coeffs)
    if (!valid_index(idx, d, Basis::ComplexStandard)) bad_index(idx, d);
  const double tol = reality_tol * coeff_scale(complex_coeffs);
  if (reality_defect(complex_coeffs, d) > tol)
    throw std::invalid_argument(
        "coefficient table violates the reality condition");

  CoeffMap out;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (const auto& [idx, v] : complex_coeffs) {
    if (d == 2) {
      if (idx.l == 0) {
        out[{0, 1}] = v.real();
      } else if (idx.m == 1) {  // pair handled once, from the m = 1 slot
        const Complex a2 = map_get(complex_coeffs, {idx.l, 2});
        out[{idx.l, 1}] = ((v + a2) * inv_sqrt2).real();
        out[{idx.l, 2}] = (Complex(0.0, -1.0) * (v - a2) * inv_sqrt2).real();
      }
    } else {
      const int l = idx.l, m = idx.m, am = std::abs(m);
      if (m == 0) {
        out[{l, 0}] = v.real();
      } else if (m < 0) {  // pair handled once, from the -|m| slot
        const double cs = (am % 2 == 1) ? -1.0 : 1.0;
        const Complex ap = map_get(complex_coeffs, {l, am});
        out[{l, am}] = ((v + cs * ap) * inv_sqrt2).real();
        out[{l, -am}] = (Complex(0.0, -1.0) * (v - cs * ap) * inv_sqrt2).real();
      }
    }
  }
  return out;
}

}  // namespace steklov
