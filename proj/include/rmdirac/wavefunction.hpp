// Closed-form radial component
//
//   F(r) = exp(-2 alpha eps r) (1 + exp(-2 alpha r))^(-eps - sqrt(beta1))
//          * 2F1(eps + delta+ + sqrt(beta1), eps - delta+ + sqrt(beta1) + 1; 2 eps + 1;
//                1/(exp(2 alpha r) + 1)),
//
// the series-termination (Jacobi polynomial) form it is compared against, and
// tabulation, normalization and node counting on a radial grid. The constant
// phase (-1)^eps of z^eps is dropped throughout.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "rmdirac/level.hpp"
#include "rmdirac/model.hpp"
#include "rmdirac/special.hpp"

namespace rmdirac {

using special::wide_complex;

/// Imaginary residue tolerated when beta1 < 0 makes the arithmetic complex.
inline constexpr double imag_leak_tolerance = 1e-10;

/// 2F1 parameters and exponents of the closed form, kept at long-double
/// precision so that c - b = conj(a) holds exactly when beta1 < 0.
struct ClosedForm {
  special::WideHypParams hyp;
  long double eps = 0.0L;
  wide_complex prefactor_exponent;  // -eps - sqrt(beta1)
  long double phase_rate = 0.0L;    // Im sqrt(beta1)
};

inline ClosedForm closed_form(const ReducedCoeffs& c) {
  c.require_bound_exponents();
  const long double eps = std::sqrt(static_cast<long double>(c.eps_sq));
  const long double dp = static_cast<long double>(c.delta_plus);
  const wide_complex sb(c.sqrt_beta1.real(), c.sqrt_beta1.imag());
  ClosedForm f;
  f.eps = eps;
  f.hyp.c = 2.0L * eps + 1.0L;
  f.hyp.a = wide_complex(eps + dp) + sb;
  if (sb.imag() == 0.0L) {
    f.hyp.b = wide_complex(eps - dp + sb.real() + 1.0L, 0.0L);
  } else {
    // sqrt(beta1) is purely imaginary: b = c - conj(a), formed so the relation
    // survives rounding and the (1-z)^(-a) 2F1 product stays real.
    f.hyp.b = wide_complex(f.hyp.c - (eps + dp), sb.imag());
  }
  f.prefactor_exponent = -wide_complex(eps) - sb;
  f.phase_rate = sb.imag();
  return f;
}

namespace detail {

// u = exp(-2 alpha r) = -z, pow_eps = |z|^eps.
inline wide_complex closed_form_value(const ClosedForm& f, long double u, long double pow_eps,
                                      const special::SeriesOptions& opt) {
  const long double w = u / (1.0L + u);
  const auto h = special::gauss_2f1_wide(f.hyp, w, opt);
  return pow_eps * special::detail::wide_pow(1.0L + u, f.prefactor_exponent) * h.value;
}

inline long double checked_real(const wide_complex& v, const wide_complex& scale_ref) {
  const long double scale = std::abs(v) + std::abs(scale_ref);
  if (std::abs(v.imag()) > imag_leak_tolerance * scale) {
    throw numerical_error("closed-form component: imaginary leak " +
                          std::to_string(static_cast<double>(std::abs(v.imag()))) +
                          " exceeds tolerance");
  }
  return v.real();
}

}  // namespace detail

/// Closed-form component as a function of z in [-1, 0), extended precision.
inline long double eval_component_z(const ClosedForm& f, long double z,
                                    const special::SeriesOptions& opt = {}) {
  const long double u = -z;
  const long double pow_eps = std::pow(u, f.eps);
  const wide_complex v = detail::closed_form_value(f, u, pow_eps, opt);
  return detail::checked_real(v, special::detail::wide_pow(1.0L + u, f.prefactor_exponent) * pow_eps);
}

/// Closed-form component at radius r for raw coefficients.
inline double eval_component(const PhysicalParams& p, const ReducedCoeffs& c, double r,
                             const special::SeriesOptions& opt = {}) {
  if (!(r >= 0.0)) throw domain_error("eval_component: r must be >= 0");
  const ClosedForm f = closed_form(c);
  const long double two_ar = 2.0L * p.alpha * static_cast<long double>(r);
  const long double u = std::exp(-two_ar);
  const long double pow_eps = std::exp(-two_ar * f.eps);
  const wide_complex v = detail::closed_form_value(f, u, pow_eps, opt);
  return static_cast<double>(
      detail::checked_real(v, special::detail::wide_pow(1.0L + u, f.prefactor_exponent) * pow_eps));
}

inline double eval_component(const PhysicalParams& p, const EnergyLevel& level, double r,
                             const special::SeriesOptions& opt = {}) {
  return eval_component(p, level.coeffs, r, opt);
}

/// Series-termination form |z|^eps (1-z)^delta+ P_n^{(2 eps, 2 delta+ - 1)}(1 - 2z).
inline long double eval_nu_component_z(const ReducedCoeffs& c, int n_r, long double z) {
  c.require_bound_exponents();
  const long double eps = std::sqrt(static_cast<long double>(c.eps_sq));
  const long double dp = c.delta_plus;
  const long double poly = special::jacobi_p<long double>(n_r, 2.0L * eps, 2.0L * dp - 1.0L, 1.0L - 2.0L * z);
  return std::pow(-z, eps) * std::pow(1.0L - z, dp) * poly;
}

inline double eval_nu_component(const PhysicalParams& p, const ReducedCoeffs& c, int n_r, double r) {
  if (!(r >= 0.0)) throw domain_error("eval_nu_component: r must be >= 0");
  c.require_bound_exponents();
  const long double two_ar = 2.0L * p.alpha * static_cast<long double>(r);
  const long double u = std::exp(-two_ar);
  const long double eps = std::sqrt(static_cast<long double>(c.eps_sq));
  const long double dp = c.delta_plus;
  const long double poly =
      special::jacobi_p<long double>(n_r, 2.0L * eps, 2.0L * dp - 1.0L, 1.0L + 2.0L * u);
  return static_cast<double>(std::exp(-two_ar * eps) * std::pow(1.0L + u, dp) * poly);
}

inline double eval_nu_component(const PhysicalParams& p, const NuCandidate& cand, double r) {
  return eval_nu_component(p, cand.coeffs, cand.n_r, r);
}

/// Sampled radial component.
struct WavefunctionTable {
  std::vector<double> r;
  std::vector<double> values;
  double norm = 0.0;  // trapezoidal integral of value^2 before scaling
  int nodes = 0;
  double boundary0 = 0.0;     // |value(r_min)| / max|value|
  double boundary_inf = 0.0;  // |value(r_max)| / max|value|
};

inline constexpr double node_noise_band = 1e-9;

inline double trapezoid_norm(const std::vector<double>& r, const std::vector<double>& v) {
  double s = 0.0;
  for (std::size_t i = 1; i < r.size(); ++i) {
    s += 0.5 * (r[i] - r[i - 1]) * (v[i] * v[i] + v[i - 1] * v[i - 1]);
  }
  return s;
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Strict sign changes among samples, skipping |value| < 1e-9 max.
inline int count_nodes(const WavefunctionTable& t) {
  const double band = node_noise_band * max_abs(t.values);
  int nodes = 0;
  int last_sign = 0;
  for (double v : t.values) {
    if (std::abs(v) <= band) continue;
    const int s = v > 0 ? 1 : -1;
    if (last_sign != 0 && s != last_sign) ++nodes;
    last_sign = s;
  }
  return nodes;
}

inline WavefunctionTable make_table(std::vector<double> r, std::vector<double> values) {
  if (r.size() != values.size() || r.size() < 2) {
    throw parameter_error("make_table: grid and values must have equal length >= 2");
  }
  WavefunctionTable t;
  t.r = std::move(r);
  t.values = std::move(values);
  t.norm = trapezoid_norm(t.r, t.values);
  const double m = max_abs(t.values);
  t.boundary0 = m > 0 ? std::abs(t.values.front()) / m : 0.0;
  t.boundary_inf = m > 0 ? std::abs(t.values.back()) / m : 0.0;
  t.nodes = count_nodes(t);
  return t;
}

/// Scales to unit trapezoidal norm, positive on the first lobe.
inline WavefunctionTable normalize(const WavefunctionTable& t) {
  const double norm = trapezoid_norm(t.r, t.values);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw parameter_error("normalize: table has zero norm");
  }
  const double band = node_noise_band * max_abs(t.values);
  double sign = 1.0;
  for (double v : t.values) {
    if (std::abs(v) > band) {
      sign = v > 0 ? 1.0 : -1.0;
      break;
    }
  }
  const double scale = sign / std::sqrt(norm);
  std::vector<double> v(t.values.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = t.values[i] * scale;
  WavefunctionTable out = make_table(t.r, std::move(v));
  out.norm = norm;  // integral before this scaling
  return out;
}

struct GridOptions {
  int points = 2048;     // floor; raised to keep >= 32 points per decay length
  double stretch = 1.5;  // > 0 clusters points toward r = 0
  double r_max = 0.0;    // 0: default_r_max
  bool adaptive = true;
};

// The tail decays as exp(-2 alpha eps r) only beyond the potential's range,
// so the 30 decay lengths are counted from r_e + 5/alpha, not from 0.
inline double default_r_max(const PhysicalParams& p, double eps) {
  return std::max(p.r_e + 5.0 / p.alpha + 30.0 / (2.0 * p.alpha * eps), 10.0 * p.r_e);
}

inline int grid_points(const GridOptions& g, double r_max, double decay_rate) {
  if (!g.adaptive) return g.points;
  // widest step of the stretched grid is about r_max * s e^s / (e^s - 1) / (n - 1)
  const double s = g.stretch;
  const double widest = s > 0 ? s * std::exp(s) / std::expm1(s) : 1.0;
  const double need = 1.0 + 32.0 * widest * r_max * decay_rate * 1.01;
  return std::max(g.points, static_cast<int>(std::ceil(need)));
}

/// r_i = r_max (exp(lambda t_i) - 1)/(exp(lambda) - 1), t uniform in [0, 1].
inline std::vector<double> radial_grid(double r_max, int points, double stretch) {
  if (points < 2) throw parameter_error("radial_grid: need at least two points");
  if (!(r_max > 0)) throw parameter_error("radial_grid: r_max must be positive");
  std::vector<double> r(static_cast<std::size_t>(points));
  const double denom = stretch > 0 ? std::expm1(stretch) : 1.0;
  for (int i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / (points - 1);
    r[static_cast<std::size_t>(i)] = stretch > 0 ? r_max * std::expm1(stretch * t) / denom : r_max * t;
  }
  r.back() = r_max;
  return r;
}

inline WavefunctionTable tabulate(const PhysicalParams& p, const ReducedCoeffs& c,
                                  const GridOptions& g = {}, const special::SeriesOptions& opt = {}) {
  const double eps = c.epsilon();
  const double r_max = g.r_max > 0 ? g.r_max : default_r_max(p, eps);
  std::vector<double> r = radial_grid(r_max, grid_points(g, r_max, 2.0 * p.alpha * eps), g.stretch);
  std::vector<double> v(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) v[i] = eval_component(p, c, r[i], opt);
  return make_table(std::move(r), std::move(v));
}

inline WavefunctionTable tabulate(const PhysicalParams& p, const EnergyLevel& level,
                                  const GridOptions& g = {}, const special::SeriesOptions& opt = {}) {
  return tabulate(p, level.coeffs, g, opt);
}

inline WavefunctionTable tabulate_nu(const PhysicalParams& p, const NuCandidate& cand,
                                     const GridOptions& g = {}) {
  const double eps = cand.coeffs.epsilon();
  const double r_max = g.r_max > 0 ? g.r_max : default_r_max(p, eps);
  std::vector<double> r = radial_grid(r_max, grid_points(g, r_max, 2.0 * p.alpha * eps), g.stretch);
  std::vector<double> v(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) v[i] = eval_nu_component(p, cand, r[i]);
  return make_table(std::move(r), std::move(v));
}

// Finite differences at step 1e-5 amplify series truncation noise by 1e10, so
// residual checks sum the series to full accumulator precision.
inline constexpr special::SeriesOptions residual_series{20000, 1e-24};

inline double closed_form_ode_residual(const ReducedCoeffs& c, int samples = 50,
                                       const special::SeriesOptions& opt = residual_series) {
  const ClosedForm f = closed_form(c);
  return transformed_ode_residual([&](long double z) { return eval_component_z(f, z, opt); }, c, samples);
}

inline double nu_ode_residual(const NuCandidate& cand, int samples = 50) {
  return transformed_ode_residual(
      [&](long double z) { return eval_nu_component_z(cand.coeffs, cand.n_r, z); }, cand.coeffs, samples);
}

/// Boundary evidence for a series-termination candidate.
inline RefutationRecord refutation_record(const PhysicalParams& p, const NuCandidate& cand,
                                          const GridOptions& g = {}) {
  const WavefunctionTable t = tabulate_nu(p, cand, g);
  const double m = max_abs(t.values);
  RefutationRecord rec;
  rec.n_r = cand.n_r;
  rec.E_nu = cand.E;
  rec.boundary_value = t.boundary0;
  const double eps = cand.coeffs.epsilon();
  const double dp = cand.coeffs.delta_plus;
  rec.analytic_boundary =
      m > 0 ? std::abs(std::pow(2.0, dp) * special::jacobi_p(cand.n_r, 2.0 * eps, 2.0 * dp - 1.0, 3.0)) / m
            : 0.0;
  rec.ode_residual = nu_ode_residual(cand);
  rec.ode_ok = rec.ode_residual <= ode_residual_tolerance;
  rec.verdict = rec.boundary_value > refutation_violation_threshold;
  return rec;
}

}  // namespace rmdirac
