// Shooting eigensolver for the radial equation
//
//   F'' = [A P(r) + g(E) Sigma(r) - k^2(E)] F,   F(0) = F(inf) = 0,
//
// with P(r) the Pekeris replacement of 1/r^2 (or 1/r^2 itself on request).
// The potential depends on E through g and k^2, so the eigenproblem is
// nonlinear in E; eigenvalues are located as sign changes of a normalized
// Wronskian between an outward and an inward RK4 solution.
//
// Independent of the hypergeometric closed form: only model.hpp is used.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "rmdirac/level.hpp"
#include "rmdirac/model.hpp"
#include "rmdirac/spectrum.hpp"
#include "rmdirac/wavefunction.hpp"

namespace rmdirac {

struct ShootConfig {
  double r_min = 0.0;
  double r_max = 0.0;        // 0: match + max(10 r_e, 30/(2 alpha eps(E)))
  int steps = 4000;          // RK4 steps per integration segment
  double match_point = 0.0;  // 0: r_e
  bool exact_centrifugal = false;
  int renormalize_every = 100;
  int n_grid = 512;
  double endpoint_guard = 1e-6;
  double bisection_rel = 1e-12;
  double wronskian_tol = 1e-9;
};

namespace detail {

struct RadialOperator {
  double A = 0.0;  // L / r_e^2 (Pekeris) or L (exact)
  double g = 0.0;
  double k2 = 0.0;
  bool exact = false;
  const PhysicalParams* p = nullptr;
  const PekerisCoeffs* d = nullptr;

  double operator()(double r) const {
    const double cent = exact ? A / (r * r) : A * (d->D0 - d->D1 / (1.0 + std::exp(2.0 * p->alpha * r)) +
                                                   d->D2 / ((1.0 + std::exp(2.0 * p->alpha * r)) *
                                                            (1.0 + std::exp(2.0 * p->alpha * r))));
    return cent + g * sigma(r, *p) - k2;
  }
};

struct State {
  double f = 0.0;
  double df = 0.0;
};

// Integrates y'' = W(r) y from r0 to r1 in `steps` RK4 steps; `visit(r, state,
// scale)` is called at every node with the cumulative rescaling applied so far.
template <class Visit>
State integrate(const RadialOperator& W, State s, double r0, double r1, int steps, int renorm,
                double length_scale, Visit&& visit) {
  const double h = (r1 - r0) / steps;
  double log_scale = 0.0;
  visit(r0, s, log_scale);
  for (int i = 0; i < steps; ++i) {
    const double r = r0 + i * h;
    const double w0 = W(r), wm = W(r + 0.5 * h), w1 = W(r + h);
    const double k1f = s.df, k1d = w0 * s.f;
    const double k2f = s.df + 0.5 * h * k1d, k2d = wm * (s.f + 0.5 * h * k1f);
    const double k3f = s.df + 0.5 * h * k2d, k3d = wm * (s.f + 0.5 * h * k2f);
    const double k4f = s.df + h * k3d, k4d = w1 * (s.f + h * k3f);
    s.f += h / 6.0 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f);
    s.df += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    if (renorm > 0 && (i + 1) % renorm == 0) {
      const double m = std::max(std::abs(s.f), length_scale * std::abs(s.df));
      if (m > 0 && std::isfinite(m)) {
        s.f /= m;
        s.df /= m;
        log_scale += std::log(m);
      }
    }
    if (!std::isfinite(s.f) || !std::isfinite(s.df)) {
      throw integration_error("shooting: non-finite amplitude at r = " + std::to_string(r + h));
    }
    visit(r + h, s, log_scale);
  }
  return s;
}

struct Geometry {
  double r_min, match, r_mid, r_max;
};

inline Geometry geometry(const PhysicalParams& p, double eps, const ShootConfig& cfg) {
  Geometry g;
  g.r_min = cfg.exact_centrifugal ? std::max(cfg.r_min, 1e-4 * p.r_e) : cfg.r_min;
  g.match = cfg.match_point > 0 ? cfg.match_point : p.r_e;
  g.r_max = cfg.r_max > 0 ? cfg.r_max : g.match + std::max(10.0 * p.r_e, 30.0 / (2.0 * p.alpha * eps));
  // Fine segment over the structured part of the potential, coarse tail beyond.
  g.r_mid = std::min(g.r_max, g.match + std::max(5.0 * p.r_e, 10.0 / (2.0 * p.alpha)));
  if (!(g.r_min < g.match && g.match < g.r_max)) {
    throw parameter_error("ShootConfig: need r_min < match_point < r_max");
  }
  return g;
}

inline RadialOperator radial_operator(const PhysicalParams& p, double E, Symmetry s, const PekerisCoeffs& d,
                                      bool exact) {
  const Couplings c = couplings(p, E, s);
  RadialOperator W;
  W.A = exact ? c.centrifugal * p.r_e * p.r_e : c.centrifugal;
  W.g = c.coupling;
  W.k2 = c.separation;
  W.exact = exact;
  W.p = &p;
  W.d = &d;
  return W;
}

// Regular solution start: F = 0, F' = 1 at r = 0 for the bounded Pekeris
// form; Frobenius r^(l+1) behaviour for the exact 1/r^2 term.
inline State outward_start(const PhysicalParams& p, Symmetry s, double r0, bool exact) {
  if (!exact) return {0.0, 1.0};
  // L = l(l+1); F ~ r^(l+1) near the origin.
  const int k = p.kappa;
  const double ex = s == Symmetry::spin ? std::max(k + 1, -k) : std::max(k, 1 - k);
  return {std::pow(r0, ex), ex * std::pow(r0, ex - 1.0)};
}

struct ShootOutcome {
  double wronskian = 0.0;
  State out;
  State in;
};

inline ShootOutcome shoot(const PhysicalParams& p, double E, Symmetry s, const PekerisCoeffs& d,
                          const ShootConfig& cfg) {
  const ReducedCoeffs c = map_coeffs(p, E, s, d);
  if (!c.bound()) throw domain_error("shoot: E is outside the bound window (eps^2 <= 0)");
  const double eps = c.epsilon();
  const Geometry g = geometry(p, eps, cfg);
  const RadialOperator W = radial_operator(p, E, s, d, cfg.exact_centrifugal);
  const double ls = p.r_e;
  auto none = [](double, const State&, double) {};
  const State out = integrate(W, outward_start(p, s, g.r_min, cfg.exact_centrifugal), g.r_min, g.match,
                              cfg.steps, cfg.renormalize_every, ls, none);
  const double kappa_decay = 2.0 * p.alpha * eps;
  State in{1.0, -kappa_decay};
  if (g.r_mid < g.r_max) in = integrate(W, in, g.r_max, g.r_mid, cfg.steps, cfg.renormalize_every, ls, none);
  in = integrate(W, in, g.r_mid, g.match, cfg.steps, cfg.renormalize_every, ls, none);
  const double no = std::hypot(out.f, ls * out.df);
  const double ni = std::hypot(in.f, ls * in.df);
  ShootOutcome o;
  o.out = out;
  o.in = in;
  o.wronskian = ls * (out.f * in.df - in.f * out.df) / (no * ni);
  return o;
}

}  // namespace detail

/// Normalized Wronskian mismatch at the match point, in [-1, 1].
inline double shoot_residual(const PhysicalParams& p, double E, Symmetry s, const PekerisCoeffs& d,
                             const ShootConfig& cfg = {}) {
  if (cfg.steps < 2000) throw parameter_error("ShootConfig: steps must be >= 2000");
  return detail::shoot(p, E, s, d, cfg).wronskian;
}

struct OracleResult {
  std::vector<double> eigenvalues;  // ascending
  std::vector<double> marginal;
  std::vector<Bracket> brackets;    // parallel to eigenvalues
};

inline OracleResult oracle_solve(const PhysicalParams& p, Symmetry s, const PekerisCoeffs& d,
                                 const EnergyWindow& window, const ShootConfig& cfg = {}) {
  if (cfg.steps < 2000) throw parameter_error("ShootConfig: steps must be >= 2000");
  const auto f = [&](double E) {
    if (!inside_guard(p, s, E)) throw domain_error("oracle: E outside guard rails");
    return detail::shoot(p, E, s, d, cfg).wronskian;
  };
  const BracketScan scan = scan_sign_changes(f, window, cfg.n_grid, cfg.endpoint_guard);
  OracleResult out;
  const double margin = 10.0 * cfg.endpoint_guard * window.width();
  for (const Bracket& br : scan.brackets) {
    const double E = bisect(f, br, cfg.bisection_rel * window.width(), cfg.wronskian_tol);
    if (E - window.lo <= margin || window.hi - E <= margin) {
      out.marginal.push_back(E);
      continue;
    }
    out.eigenvalues.push_back(E);
    out.brackets.push_back(br);
  }
  return out;
}

inline std::vector<double> oracle_eigenvalues(const PhysicalParams& p, Symmetry s, const PekerisCoeffs& d,
                                              const EnergyWindow& window, const ShootConfig& cfg = {}) {
  return oracle_solve(p, s, d, window, cfg).eigenvalues;
}

/// Refines one eigenvalue inside `bracket` with the given step count.
inline double oracle_refine(const PhysicalParams& p, Symmetry s, const PekerisCoeffs& d,
                            const EnergyWindow& window, const Bracket& bracket, const ShootConfig& cfg) {
  const auto f = [&](double E) { return detail::shoot(p, E, s, d, cfg).wronskian; };
  return bisect(f, bracket, cfg.bisection_rel * window.width(), cfg.wronskian_tol);
}

struct ConvergenceReport {
  double E_n = 0.0, E_2n = 0.0, E_4n = 0.0;
  double order = 0.0;       // log2(|E_n - E_2n| / |E_2n - E_4n|)
  double rel_change = 0.0;  // |E_n - E_2n| / |E_2n|
};

inline ConvergenceReport grid_convergence(const PhysicalParams& p, Symmetry s, const PekerisCoeffs& d,
                                          const EnergyWindow& window, const Bracket& bracket,
                                          ShootConfig cfg) {
  ConvergenceReport r;
  cfg.bisection_rel = std::min(cfg.bisection_rel, 1e-14);
  cfg.wronskian_tol = 0.0;
  r.E_n = oracle_refine(p, s, d, window, bracket, cfg);
  cfg.steps *= 2;
  r.E_2n = oracle_refine(p, s, d, window, bracket, cfg);
  cfg.steps *= 2;
  r.E_4n = oracle_refine(p, s, d, window, bracket, cfg);
  r.order = std::log2(std::abs(r.E_n - r.E_2n) / std::abs(r.E_2n - r.E_4n));
  r.rel_change = std::abs(r.E_n - r.E_2n) / std::abs(r.E_2n);
  return r;
}

/// Oracle eigenfunction on the integration nodes, inward branch scaled to
/// match the outward branch at the match point, normalized.
inline WavefunctionTable oracle_eigenfunction(const PhysicalParams& p, double E, Symmetry s,
                                              const PekerisCoeffs& d, const ShootConfig& cfg = {}) {
  const ReducedCoeffs c = map_coeffs(p, E, s, d);
  if (!c.bound()) throw domain_error("oracle_eigenfunction: E outside the bound window");
  const detail::Geometry g = detail::geometry(p, c.epsilon(), cfg);
  const detail::RadialOperator W = detail::radial_operator(p, E, s, d, cfg.exact_centrifugal);
  const double ls = p.r_e;

  std::vector<double> r_out, f_out, ls_out;
  const detail::State out =
      detail::integrate(W, detail::outward_start(p, s, g.r_min, cfg.exact_centrifugal), g.r_min, g.match,
                        cfg.steps, cfg.renormalize_every, ls, [&](double r, const detail::State& st, double lsc) {
                          r_out.push_back(r);
                          f_out.push_back(st.f);
                          ls_out.push_back(lsc);
                        });
  std::vector<double> r_in, f_in, ls_in;
  auto rec = [&](double r, const detail::State& st, double lsc) {
    r_in.push_back(r);
    f_in.push_back(st.f);
    ls_in.push_back(lsc);
  };
  detail::State in{1.0, -2.0 * p.alpha * c.epsilon()};
  double tail_log = 0.0;
  if (g.r_mid < g.r_max) {
    in = detail::integrate(W, in, g.r_max, g.r_mid, cfg.steps, cfg.renormalize_every, ls, rec);
    tail_log = ls_in.back();
    // Renormalization restarts in the next segment; carry the offset.
    r_in.pop_back();
    f_in.pop_back();
    ls_in.pop_back();
  }
  const std::size_t first_near = r_in.size();
  detail::integrate(W, in, g.r_mid, g.match, cfg.steps, cfg.renormalize_every, ls, rec);
  for (std::size_t i = first_near; i < ls_in.size(); ++i) ls_in[i] += tail_log;

  // Physical amplitude at a node is f * exp(log_scale); both branches are
  // referenced to their value at the match point.
  const double out_m = f_out.back();
  const double out_log = ls_out.back();
  const double in_m = f_in.back();
  const double in_log = ls_in.back();
  std::vector<double> r, v;
  r.reserve(r_out.size() + r_in.size());
  v.reserve(r_out.size() + r_in.size());
  for (std::size_t i = 0; i < r_out.size(); ++i) {
    r.push_back(r_out[i]);
    v.push_back(f_out[i] * std::exp(ls_out[i] - out_log) / out_m);
  }
  for (std::size_t j = r_in.size() - 1; j-- > 0;) {  // skip the match node, ascending r
    r.push_back(r_in[j]);
    v.push_back(f_in[j] * std::exp(ls_in[j] - in_log) / in_m);
  }
  (void)out;
  return normalize(make_table(std::move(r), std::move(v)));
}

/// Residual of the hypergeometric-form equation with coefficients recomputed
/// from (p, level.E, s, d), applied to the closed form built from level.coeffs.
inline double ode_residual(const PhysicalParams& p, const EnergyLevel& level, Symmetry s, const PekerisCoeffs& d,
                           int samples = 50) {
  const ReducedCoeffs truth = map_coeffs(p, level.E, s, d);
  const ClosedForm f = closed_form(level.coeffs);
  return transformed_ode_residual([&](long double z) { return eval_component_z(f, z, residual_series); }, truth, samples);
}

}  // namespace rmdirac
