// Physical parameters, the Rosen-Morse potential, the Pekeris-type
// replacement of 1/r^2, and the reduction of the radial equations to the
// dimensionless hypergeometric form
//
//   z(1-z) F'' + (1-z) F' - (beta1 z^2 - beta2 z + eps^2) / (z(1-z)) F = 0,
//   z = -exp(-2 alpha r).
//
// Both symmetry limits are written as
//
//   -F'' + L/r^2 F + g Sigma(r) F = k^2 F
//
// with L = kappa(kappa+1), g = (Mc^2 + E - C_s)/(hbar c)^2 for spin symmetry
// and L = kappa(kappa-1), g = -(Mc^2 - E + C_ps)/(hbar c)^2 for pseudospin
// symmetry. With A = L/r_e^2, substituting z and multiplying through by
// (1-z)^2/(4 alpha^2) gives
//
//   eps^2 = (A D0 + g V2 - k^2) / (4 alpha^2)
//   beta1 = (A (D0 - D1 + D2) - g V2 - k^2) / (4 alpha^2)
//   beta2 = (A (2 D0 - D1) - 4 g V1 - 2 k^2) / (4 alpha^2)
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "rmdirac/error.hpp"

namespace rmdirac {

enum class Symmetry { spin, pseudospin };

inline std::string_view to_string(Symmetry s) {
  return s == Symmetry::spin ? "spin" : "pseudospin";
}

inline std::optional<Symmetry> parse_symmetry(std::string_view s) {
  if (s == "spin") return Symmetry::spin;
  if (s == "pseudospin") return Symmetry::pseudospin;
  return std::nullopt;
}

/// Input record. Energies are given as Mc^2-like quantities in the same unit
/// as hbar_c's energy part; lengths in hbar_c's length unit.
struct PhysicalParams {
  double M = 5.0;
  double hbar_c = 1.0;
  double alpha = 0.25;
  double V1 = 3.0;
  double V2 = 0.5;
  double r_e = 2.5;
  int kappa = 1;
  double C_s = 0.0;
  double C_ps = 0.0;

  friend bool operator==(const PhysicalParams&, const PhysicalParams&) = default;

  /// Throws parameter_error naming the first offending field.
  void validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(M) || !(M > 0)) throw parameter_error("field 'M' must be positive");
    if (!finite(hbar_c) || !(hbar_c > 0)) throw parameter_error("field 'hbar_c' must be positive");
    if (!finite(alpha) || !(alpha > 0)) throw parameter_error("field 'alpha' must be positive");
    if (!finite(r_e) || !(r_e > 0)) throw parameter_error("field 'r_e' must be positive");
    if (!finite(V1)) throw parameter_error("field 'V1' must be finite");
    if (!finite(V2)) throw parameter_error("field 'V2' must be finite");
    if (!finite(C_s)) throw parameter_error("field 'C_s' must be finite");
    if (!finite(C_ps)) throw parameter_error("field 'C_ps' must be finite");
    if (kappa == 0) throw parameter_error("field 'kappa' must be a nonzero integer");
  }
};

/// Sigma(r) = Delta(r): -4 V1 u/(1+u)^2 + V2 (1-u)/(1+u), u = exp(-2 alpha r).
inline double sigma(double r, const PhysicalParams& p) {
  const double u = std::exp(-2.0 * p.alpha * r);
  const double s = 1.0 + u;
  return -4.0 * p.V1 * u / (s * s) + p.V2 * (1.0 - u) / s;
}

inline double z_of_r(double r, double alpha) { return -std::exp(-2.0 * alpha * r); }

inline double r_of_z(double z, double alpha) { return -std::log(-z) / (2.0 * alpha); }

/// Coefficients of 1/r^2 ~ (1/r_e^2)[D0 - D1 y + D2 y^2], y = 1/(1+exp(2 alpha r)).
struct PekerisCoeffs {
  double D0 = 0.0;
  double D1 = 0.0;
  double D2 = 0.0;
  double condition = 1.0;  // 1-norm condition number of the matching system
};

inline double pekeris_inverse_square(double r, double alpha, double r_e, const PekerisCoeffs& d) {
  const double y = 1.0 / (1.0 + std::exp(2.0 * alpha * r));
  return (d.D0 - d.D1 * y + d.D2 * y * y) / (r_e * r_e);
}

namespace detail {

using mat3 = std::array<std::array<double, 3>, 3>;

inline double norm1(const mat3& a) {
  double best = 0.0;
  for (int j = 0; j < 3; ++j) {
    double col = 0.0;
    for (int i = 0; i < 3; ++i) col += std::abs(a[i][j]);
    best = std::max(best, col);
  }
  return best;
}

inline double det3(const mat3& a) {
  return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
         a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
         a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

inline mat3 inverse3(const mat3& a, double det) {
  mat3 inv{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const int i1 = (j + 1) % 3, i2 = (j + 2) % 3;
      const int j1 = (i + 1) % 3, j2 = (i + 2) % 3;
      inv[i][j] = (a[i1][j1] * a[i2][j2] - a[i1][j2] * a[i2][j1]) / det;
    }
  }
  return inv;
}

}  // namespace detail

/// Ill-conditioned matching systems (large alpha*r_e) are rejected above this.
inline constexpr double pekeris_condition_limit = 1e12;

/// Solves for (D0, D1, D2) so the approximant matches 1/r^2 and its first two
/// r-derivatives at r_e. Rows are scaled by r_e^0, r_e^1, r_e^2 so the system
/// is dimensionless.
inline PekerisCoeffs pekeris_coeffs(double alpha, double r_e) {
  if (!(alpha > 0) || !(r_e > 0) || !std::isfinite(alpha) || !std::isfinite(r_e)) {
    throw parameter_error("pekeris_coeffs: alpha and r_e must be positive");
  }
  const double y = 1.0 / (1.0 + std::exp(2.0 * alpha * r_e));
  const double y1 = -2.0 * alpha * y * (1.0 - y);
  const double y2 = 4.0 * alpha * alpha * y * (1.0 - y) * (1.0 - 2.0 * y);
  const detail::mat3 a{{{1.0, -y, y * y},
                        {0.0, -y1 * r_e, 2.0 * y * y1 * r_e},
                        {0.0, -y2 * r_e * r_e, (2.0 * y1 * y1 + 2.0 * y * y2) * r_e * r_e}}};
  const std::array<double, 3> rhs{1.0, -2.0, 6.0};
  const double det = detail::det3(a);
  if (det == 0.0 || !std::isfinite(det)) {
    throw numerical_error("pekeris_coeffs: singular matching system (condition = inf)");
  }
  const auto inv = detail::inverse3(a, det);
  const double cond = detail::norm1(a) * detail::norm1(inv);
  if (!(cond < pekeris_condition_limit)) {
    throw numerical_error("pekeris_coeffs: ill-conditioned matching system, condition = " +
                          std::to_string(cond) + " (alpha*r_e = " + std::to_string(alpha * r_e) + ")");
  }
  // Block-triangular: the last two rows fix (D1, D2), the first then gives D0.
  const double m11 = a[1][1], m12 = a[1][2], m21 = a[2][1], m22 = a[2][2];
  const double d2x2 = m11 * m22 - m12 * m21;
  const double D1 = (rhs[1] * m22 - m12 * rhs[2]) / d2x2;
  const double D2 = (m11 * rhs[2] - m21 * rhs[1]) / d2x2;
  const double D0 = rhs[0] + y * D1 - y * y * D2;
  return {D0, D1, D2, cond};
}

/// The energy-dependent pieces of the radial equation, as polynomials in E:
/// g(E) = g0 + g1 E, k^2(E) = k0 + k1 E + k2 E^2, and A = L / r_e^2.
struct CouplingPolynomials {
  double centrifugal = 0.0;  // A
  double g0 = 0.0, g1 = 0.0;
  double k0 = 0.0, k1 = 0.0, k2 = 0.0;
};

inline CouplingPolynomials coupling_polynomials(const PhysicalParams& p, Symmetry s) {
  const double h2 = p.hbar_c * p.hbar_c;
  const double kap = p.kappa;
  CouplingPolynomials c;
  if (s == Symmetry::spin) {
    c.centrifugal = kap * (kap + 1.0) / (p.r_e * p.r_e);
    c.g0 = (p.M - p.C_s) / h2;
    c.g1 = 1.0 / h2;
    c.k0 = (-p.M * p.M + p.C_s * p.M) / h2;
    c.k1 = -p.C_s / h2;
    c.k2 = 1.0 / h2;
  } else {
    c.centrifugal = kap * (kap - 1.0) / (p.r_e * p.r_e);
    c.g0 = -(p.M + p.C_ps) / h2;
    c.g1 = 1.0 / h2;
    c.k0 = (-p.M * p.M - p.C_ps * p.M) / h2;
    c.k1 = -p.C_ps / h2;
    c.k2 = 1.0 / h2;
  }
  return c;
}

/// Named intermediates at one energy.
struct Couplings {
  double centrifugal = 0.0;  // A = L / r_e^2
  double coupling = 0.0;     // g, multiplies Sigma(r)
  double separation = 0.0;   // k^2
};

inline Couplings couplings(const PhysicalParams& p, double E, Symmetry s) {
  const auto c = coupling_polynomials(p, s);
  return {c.centrifugal, c.g0 + c.g1 * E, c.k0 + (c.k1 + c.k2 * E) * E};
}

/// Dimensionless coefficients of the hypergeometric-form equation at one
/// (E, kappa, symmetry). delta_plus is NaN when its radicand is negative.
struct ReducedCoeffs {
  double eps_sq = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double delta_plus = std::numeric_limits<double>::quiet_NaN();
  std::complex<double> sqrt_beta1;

  double radicand() const { return 0.25 + beta1 - beta2 + eps_sq; }
  bool bound() const { return eps_sq > 0.0; }
  bool exponents_real() const { return radicand() >= 0.0; }
  double epsilon() const { return std::sqrt(eps_sq); }

  void require_bound_exponents() const {
    if (!bound()) throw domain_error("eps^2 <= 0: energy is not in the bound-state window");
    if (!exponents_real()) {
      throw complex_exponent_error("1/4 + beta1 - beta2 + eps^2 < 0: delta exponent is complex");
    }
  }

  friend bool operator==(const ReducedCoeffs& a, const ReducedCoeffs& b) {
    auto same = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
    return a.eps_sq == b.eps_sq && a.beta1 == b.beta1 && a.beta2 == b.beta2 &&
           same(a.delta_plus, b.delta_plus) && a.sqrt_beta1 == b.sqrt_beta1;
  }
};

/// Builds the derived quantities (delta_plus, sqrt(beta1)) from a raw triple.
inline ReducedCoeffs make_coeffs(double eps_sq, double beta1, double beta2) {
  ReducedCoeffs c;
  c.eps_sq = eps_sq;
  c.beta1 = beta1;
  c.beta2 = beta2;
  const double rad = c.radicand();
  if (rad >= 0.0) c.delta_plus = 0.5 + std::sqrt(rad);
  c.sqrt_beta1 = beta1 >= 0.0 ? std::complex<double>(std::sqrt(beta1), 0.0)
                              : std::complex<double>(0.0, std::sqrt(-beta1));
  return c;
}

inline ReducedCoeffs map_coeffs(const PhysicalParams& p, double E, Symmetry s, const PekerisCoeffs& d) {
  const Couplings c = couplings(p, E, s);
  const double scale = 4.0 * p.alpha * p.alpha;
  const double A = c.centrifugal, g = c.coupling, k2 = c.separation;
  const double eps_sq = (A * d.D0 + g * p.V2 - k2) / scale;
  const double beta1 = (A * (d.D0 - d.D1 + d.D2) - g * p.V2 - k2) / scale;
  const double beta2 = (A * (2.0 * d.D0 - d.D1) - 4.0 * g * p.V1 - 2.0 * k2) / scale;
  return make_coeffs(eps_sq, beta1, beta2);
}

struct EnergyWindow {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool contains(double E) const { return E > lo && E < hi; }
};

/// eps^2(E) as a quadratic qa E^2 + qb E + qc.
struct EpsQuadratic {
  double qa = 0.0, qb = 0.0, qc = 0.0;
  double operator()(double E) const { return (qa * E + qb) * E + qc; }
};

inline EpsQuadratic eps_quadratic(const PhysicalParams& p, Symmetry s, const PekerisCoeffs& d) {
  const auto c = coupling_polynomials(p, s);
  const double scale = 4.0 * p.alpha * p.alpha;
  return {-c.k2 / scale, (c.g1 * p.V2 - c.k1) / scale,
          (c.centrifugal * d.D0 + c.g0 * p.V2 - c.k0) / scale};
}

/// Open energy interval where eps^2(E) > 0, intersected with E > -Mc^2 (spin)
/// or E < +Mc^2 (pseudospin). Empty when eps^2 has no real roots.
inline std::optional<EnergyWindow> bound_window(const PhysicalParams& p, Symmetry s,
                                                const PekerisCoeffs& d) {
  const EpsQuadratic q = eps_quadratic(p, s, d);
  const double disc = q.qb * q.qb - 4.0 * q.qa * q.qc;
  if (!(disc > 0.0)) return std::nullopt;
  // Cancellation-free roots.
  const double sq = std::sqrt(disc);
  const double t = -0.5 * (q.qb + std::copysign(sq, q.qb));
  double r1 = t / q.qa;
  double r2 = t != 0.0 ? q.qc / t : -r1;
  if (r1 > r2) std::swap(r1, r2);
  EnergyWindow w{r1, r2};
  if (s == Symmetry::spin) {
    w.lo = std::max(w.lo, -p.M);
  } else {
    w.hi = std::min(w.hi, p.M);
  }
  if (!(w.lo < w.hi)) return std::nullopt;
  return w;
}

/// Parameter image of the spin problem under kappa -> kappa+1, C_ps = -C_s,
/// V -> -V. The pseudospin equation at -E then coincides with the spin
/// equation at E.
inline PhysicalParams duality_image(const PhysicalParams& spin) {
  PhysicalParams q = spin;
  q.kappa = spin.kappa + 1;
  q.C_ps = -spin.C_s;
  q.V1 = -spin.V1;
  q.V2 = -spin.V2;
  return q;
}

}  // namespace rmdirac

namespace rmdirac {

/// Finite-difference residual of
///   z(1-z) F'' + (1-z) F' - (beta1 z^2 - beta2 z + eps^2)/(z(1-z)) F
/// at `samples` equispaced interior points z in (-1, 0), divided by max|F| over
/// the same points. `f` maps long double z to long double F(z).
template <class Fn>
double transformed_ode_residual(Fn&& f, const ReducedCoeffs& c, int samples = 50,
                                long double step = 1e-5L) {
  if (samples < 1) throw parameter_error("transformed_ode_residual: samples must be positive");
  long double worst = 0.0L;
  long double fmax = 0.0L;
  for (int i = 0; i < samples; ++i) {
    const long double z = -1.0L + static_cast<long double>(i + 1) / (samples + 1);
    const long double fm = f(z - step);
    const long double f0 = f(z);
    const long double fp = f(z + step);
    const long double d1 = (fp - fm) / (2.0L * step);
    const long double d2 = (fp - 2.0L * f0 + fm) / (step * step);
    const long double q = (c.beta1 * z - c.beta2) * z + c.eps_sq;
    const long double r = z * (1.0L - z) * d2 + (1.0L - z) * d1 - q / (z * (1.0L - z)) * f0;
    worst = std::max(worst, std::abs(r));
    fmax = std::max(fmax, std::abs(f0));
  }
  if (fmax == 0.0L) throw numerical_error("transformed_ode_residual: function vanishes on all samples");
  return static_cast<double>(worst / fmax);
}

}  // namespace rmdirac
