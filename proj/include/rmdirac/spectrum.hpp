// Bound-state energies from the quantization condition
//
//   2F1(eps + delta+ + sqrt(beta1), eps - delta+ + sqrt(beta1) + 1; 2 eps + 1; 1/2) = 0,
//
// i.e. F(r = 0) = 0 for the closed-form component, and the series-termination
// energies sqrt(beta1) = eps + delta+ + n_r at which the hypergeometric factor
// collapses to a Jacobi polynomial.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rmdirac/level.hpp"
#include "rmdirac/model.hpp"
#include "rmdirac/special.hpp"
#include "rmdirac/wavefunction.hpp"

namespace rmdirac {

struct SpectrumOptions {
  special::SeriesOptions series;
  double tol_q = 1e-10;
  int n_grid = 512;
  double endpoint_guard = 1e-6;  // eta / window width
  double bisection_rel = 1e-12;  // final bracket width / window width
  GridOptions grid;              // tables used for node counting
  double beta2_scale = 1.0;      // fault injection only; verify must then fail
};

/// Quantization value from raw coefficients. For beta1 >= 0 this is the 2F1
/// at 1/2 itself. For beta1 < 0 the 2F1 carries the exact phase
/// 2^(i Im sqrt(beta1)); it is removed before the real part is taken. The
/// leftover imaginary part is rounding residue of the complex series and does
/// not vanish where Re does, so it is bounded against |Re| plus the series'
/// leading term (1), not against |Re| alone.
inline double quantization_value(const ReducedCoeffs& c, const special::SeriesOptions& opt = {}) {
  const ClosedForm f = closed_form(c);
  const auto h = special::gauss_2f1_wide(f.hyp, 0.5L, opt);
  wide_complex v = h.value;
  if (f.phase_rate != 0.0L) {
    const long double ph = -f.phase_rate * std::log(2.0L);
    v *= wide_complex(std::cos(ph), std::sin(ph));
    if (std::abs(v.imag()) > imag_leak_tolerance * (std::abs(v.real()) + 1.0L)) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "quantization_value: imaginary leak %.3Le with real part %.3Le", std::abs(v.imag()),
                    v.real());
      throw numerical_error(buf);
    }
  }
  return static_cast<double>(v.real());
}

inline bool inside_guard(const PhysicalParams& p, Symmetry s, double E) {
  return s == Symmetry::spin ? E > -p.M : E < p.M;
}

inline double quantization_value(const PhysicalParams& p, double E, Symmetry s, const PekerisCoeffs& d,
                                 const special::SeriesOptions& opt = {}) {
  const ReducedCoeffs c = map_coeffs(p, E, s, d);
  if (!c.bound() || !inside_guard(p, s, E)) {
    throw domain_error("quantization_value: E = " + std::to_string(E) + " is outside the bound window");
  }
  return quantization_value(c, opt);
}

namespace detail {

inline ReducedCoeffs spectrum_coeffs(const PhysicalParams& p, double E, Symmetry s, const PekerisCoeffs& d,
                                     const SpectrumOptions& opt) {
  ReducedCoeffs c = map_coeffs(p, E, s, d);
  if (opt.beta2_scale != 1.0) c = make_coeffs(c.eps_sq, c.beta1, c.beta2 * opt.beta2_scale);
  return c;
}

inline std::function<double(double)> quantization_fn(const PhysicalParams& p, Symmetry s, const PekerisCoeffs& d,
                                                     const SpectrumOptions& opt) {
  if (opt.beta2_scale == 1.0) return [&, s](double E) { return quantization_value(p, E, s, d, opt.series); };
  return [&, s](double E) {
    const ReducedCoeffs c = spectrum_coeffs(p, E, s, d, opt);
    if (!c.bound() || !inside_guard(p, s, E)) throw domain_error("quantization_value: E outside the bound window");
    return quantization_value(c, opt.series);
  };
}

}  // namespace detail

struct BracketScan {
  std::vector<Bracket> brackets;
  std::vector<double> failed;  // grid energies where evaluation threw
  std::vector<std::string> failures;
};

/// Uniform scan of f over [lo + eta, hi - eta]; pairs of consecutive
/// successful samples with strictly opposite signs are returned.
inline BracketScan scan_sign_changes(const std::function<double(double)>& f, const EnergyWindow& w,
                                     int n_grid, double endpoint_guard) {
  if (n_grid < 16) throw parameter_error("bracket scan: n_grid must be >= 16");
  const double eta = endpoint_guard * w.width();
  const double a = w.lo + eta;
  const double b = w.hi - eta;
  BracketScan scan;
  std::optional<std::pair<double, double>> prev;
  for (int i = 0; i < n_grid; ++i) {
    const double E = a + (b - a) * static_cast<double>(i) / (n_grid - 1);
    double v = 0.0;
    try {
      v = f(E);
    } catch (const error& e) {
      scan.failed.push_back(E);
      scan.failures.emplace_back(e.what());
      continue;
    }
    if (prev && ((prev->second < 0.0 && v > 0.0) || (prev->second > 0.0 && v < 0.0))) {
      scan.brackets.push_back({prev->first, E});
    }
    if (v != 0.0) prev = std::make_pair(E, v);
  }
  if (static_cast<int>(scan.failed.size()) == n_grid) {
    throw numerical_error("bracket scan: evaluation failed at every grid point (" + scan.failures.front() + ")");
  }
  return scan;
}

inline BracketScan bracket_roots(const PhysicalParams& p, Symmetry s, const PekerisCoeffs& d,
                                 const EnergyWindow& window, int n_grid, const SpectrumOptions& opt = {}) {
  return scan_sign_changes(detail::quantization_fn(p, s, d, opt), window, n_grid, opt.endpoint_guard);
}

/// Bisection on a sign-changing bracket. Stops once the bracket is below
/// `width_tol` and |f(mid)| <= `value_tol`, or when the bracket can no longer
/// be split in double precision.
inline double bisect(const std::function<double(double)>& f, Bracket br, double width_tol,
                     double value_tol, double* value_at_root = nullptr) {
  double lo = br.lo, hi = br.hi;
  double flo = f(lo);
  const double fhi = f(hi);
  if (!((flo < 0 && fhi > 0) || (flo > 0 && fhi < 0))) {
    throw bracketing_error("bisect: no sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (!std::isfinite(fm)) {
      throw bracketing_error("bisect: non-finite value at E = " + std::to_string(mid));
    }
    if (hi - lo <= width_tol && std::abs(fm) <= value_tol) {
      if (value_at_root) *value_at_root = fm;
      return mid;
    }
    if (mid <= lo || mid >= hi || fm == 0.0) {
      if (value_at_root) *value_at_root = fm;
      return mid;
    }
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  const double mid = 0.5 * (lo + hi);
  if (value_at_root) *value_at_root = f(mid);
  return mid;
}

inline EnergyLevel refine_root(const PhysicalParams& p, Symmetry s, const PekerisCoeffs& d,
                               const EnergyWindow& window, const Bracket& bracket,
                               const SpectrumOptions& opt = {}) {
  const auto f = detail::quantization_fn(p, s, d, opt);
  double q = 0.0;
  const double E = bisect(f, bracket, opt.bisection_rel * window.width(), opt.tol_q, &q);
  EnergyLevel level;
  level.kappa = p.kappa;
  level.symmetry = s;
  level.E = E;
  level.coeffs = detail::spectrum_coeffs(p, E, s, d, opt);
  level.q_residual = std::abs(q);
  level.bracket = bracket;
  const double margin = 10.0 * opt.endpoint_guard * window.width();
  level.marginal = (E - window.lo) <= margin || (window.hi - E) <= margin;
  return level;
}

struct SpectrumResult {
  std::optional<EnergyWindow> window;
  std::vector<EnergyLevel> levels;    // ascending E, n_r = node count
  std::vector<EnergyLevel> marginal;  // roots pinned to a window edge
  BracketScan scan;
};

inline SpectrumResult solve_spectrum(const PhysicalParams& p, Symmetry s, const PekerisCoeffs& d,
                                     const SpectrumOptions& opt = {}) {
  p.validate();
  SpectrumResult out;
  out.window = bound_window(p, s, d);
  if (!out.window) return out;
  out.scan = bracket_roots(p, s, d, *out.window, opt.n_grid, opt);
  int ordinal = 0;
  for (const Bracket& br : out.scan.brackets) {
    EnergyLevel level = refine_root(p, s, d, *out.window, br, opt);
    level.n_r = ordinal++;
    if (level.marginal) {
      out.marginal.push_back(level);
      continue;
    }
    level.n_r = tabulate(p, level, opt.grid, opt.series).nodes;
    out.levels.push_back(level);
  }
  std::sort(out.levels.begin(), out.levels.end(),
            [](const EnergyLevel& a, const EnergyLevel& b) { return a.E < b.E; });
  return out;
}

inline std::vector<EnergyLevel> enumerate_levels(const PhysicalParams& p, Symmetry s, const PekerisCoeffs& d,
                                                 const SpectrumOptions& opt = {}) {
  return solve_spectrum(p, s, d, opt).levels;
}

struct TerminationResult {
  std::vector<NuCandidate> candidates;  // sorted by (n_r, E)
  std::vector<std::string> notes;       // one entry per n_r without a root
};

/// T(E) = sqrt(beta1) - eps - delta+; nullopt where beta1 < 0, eps^2 <= 0 or
/// delta+ is complex.
inline std::optional<double> termination_offset(const ReducedCoeffs& c) {
  if (!(c.beta1 >= 0.0) || !c.bound() || !c.exponents_real()) return std::nullopt;
  return std::sqrt(c.beta1) - c.epsilon() - c.delta_plus;
}

inline TerminationResult termination_spectrum(const PhysicalParams& p, Symmetry s, const PekerisCoeffs& d,
                                              int n_r_max, const SpectrumOptions& opt = {}) {
  if (n_r_max < 0) throw parameter_error("termination_spectrum: n_r_max must be >= 0");
  p.validate();
  TerminationResult out;
  const auto window = bound_window(p, s, d);
  if (!window) {
    for (int n = 0; n <= n_r_max; ++n) out.notes.push_back("n_r=" + std::to_string(n) + ": empty bound window");
    return out;
  }
  const int n_grid = 4 * opt.n_grid;
  const double eta = opt.endpoint_guard * window->width();
  const double a = window->lo + eta, b = window->hi - eta;
  std::vector<std::pair<double, double>> samples;  // (E, T) where defined
  samples.reserve(static_cast<std::size_t>(n_grid));
  for (int i = 0; i < n_grid; ++i) {
    const double E = a + (b - a) * static_cast<double>(i) / (n_grid - 1);
    if (!inside_guard(p, s, E)) continue;
    if (auto t = termination_offset(map_coeffs(p, E, s, d))) samples.emplace_back(E, *t);
  }
  for (int n = 0; n <= n_r_max; ++n) {
    const auto g = [&](double E) {
      const auto t = termination_offset(map_coeffs(p, E, s, d));
      if (!t) throw numerical_error("termination offset undefined");
      return *t - n;
    };
    bool found = false;
    for (std::size_t i = 1; i < samples.size(); ++i) {
      const double g0 = samples[i - 1].second - n, g1 = samples[i].second - n;
      if (!((g0 < 0 && g1 > 0) || (g0 > 0 && g1 < 0))) continue;
      // Consecutive defined samples only; a gap means the sub-window is broken.
      const double spacing = (b - a) / (n_grid - 1);
      if (samples[i].first - samples[i - 1].first > 1.5 * spacing) continue;
      const double E = bisect(g, {samples[i - 1].first, samples[i].first},
                              opt.bisection_rel * window->width(), 1e-13);
      out.candidates.push_back({n, E, map_coeffs(p, E, s, d)});
      found = true;
    }
    if (!found) {
      out.notes.push_back("n_r=" + std::to_string(n) + ": sqrt(beta1) = eps + delta+ + n_r has no root in the window");
    }
  }
  return out;
}

}  // namespace rmdirac
