// Gauss hypergeometric function, Euler/Pfaff transformations, Jacobi
// polynomials and log-gamma.
//
// The 2F1 series is summed in an extended accumulator (__float128 when the
// compiler provides it, long double otherwise). At z = 1/2 with parameters of
// size 20..70 the partial sums cancel by up to ten orders of magnitude, which
// double arithmetic cannot absorb.
#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <type_traits>

#include "rmdirac/error.hpp"

namespace rmdirac::special {

using complex = std::complex<double>;
using wide_complex = std::complex<long double>;

#if defined(__SIZEOF_FLOAT128__) && !defined(RMDIRAC_NO_FLOAT128)
using accumulator_real = __float128;
#else
using accumulator_real = long double;
#endif

/// Parameter triple (a, b; c) of 2F1. a and b may be arbitrary complex
/// numbers; c is real and must not be a nonpositive integer.
struct HypParams {
  complex a;
  complex b;
  double c = 1.0;
};

/// True when a, b are both real or form a complex-conjugate pair, i.e. when the
/// series has real coefficients for real z.
inline bool is_real_or_conjugate(const HypParams& p, double tol = 1e-14) {
  const double scale = 1.0 + std::abs(p.a) + std::abs(p.b);
  const bool real = std::abs(p.a.imag()) <= tol * scale && std::abs(p.b.imag()) <= tol * scale;
  const bool conj = std::abs(p.a - std::conj(p.b)) <= tol * scale;
  return real || conj;
}

/// HypParams carried at long-double precision, so relations such as
/// c - b = conj(a) can be represented exactly.
struct WideHypParams {
  wide_complex a;
  wide_complex b;
  long double c = 1.0L;
};

inline WideHypParams widen(const HypParams& p) {
  return {wide_complex(p.a.real(), p.a.imag()), wide_complex(p.b.real(), p.b.imag()),
          static_cast<long double>(p.c)};
}

struct EvalResult {
  complex value;
  double imag_leak = 0.0;  // |Im value|
  int terms_used = 0;
  bool converged = false;
};

struct SeriesOptions {
  int max_terms = 10000;
  double rtol = 1e-12;
};

inline bool is_nonpositive_integer(double c, double tol = 1e-12) {
  return c <= tol && std::abs(c - std::round(c)) <= tol;
}

inline void validate(const WideHypParams& p) {
  if (!std::isfinite(p.c) || is_nonpositive_integer(static_cast<double>(p.c))) {
    throw parameter_error("2F1: c must not be zero or a negative integer (c = " +
                          std::to_string(static_cast<double>(p.c)) + ")");
  }
  if (!std::isfinite(p.a.real()) || !std::isfinite(p.a.imag()) || !std::isfinite(p.b.real()) ||
      !std::isfinite(p.b.imag())) {
    throw parameter_error("2F1: non-finite parameter");
  }
}

inline void validate(const HypParams& p) { validate(widen(p)); }

/// ln Γ(x) for x > 0.
inline double ln_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw domain_error("ln_gamma: argument must be positive and finite");
  }
  return std::lgamma(x);
}

namespace detail {

// Minimal complex type over the accumulator; std::complex is unspecified for
// non-standard floating types.
template <class Real>
struct cplx {
  Real re{0};
  Real im{0};

  friend cplx operator+(cplx x, cplx y) { return {x.re + y.re, x.im + y.im}; }
  friend cplx operator*(cplx x, cplx y) {
    return {x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re};
  }
  friend cplx operator*(cplx x, Real s) { return {x.re * s, x.im * s}; }
  friend cplx operator/(cplx x, Real s) { return {x.re / s, x.im / s}; }
};

template <class Real>
inline Real abs_real(Real x) {
  return x < 0 ? -x : x;
}

// Magnitude bound cheap enough to use per term: max(|re|, |im|) is within a
// factor sqrt(2) of |.|, which is all a stopping rule needs.
template <class Real>
inline Real cheap_abs(const cplx<Real>& x) {
  const Real r = abs_real(x.re);
  const Real i = abs_real(x.im);
  return r > i ? r : i;
}

template <class Real>
constexpr Real unit_roundoff() {
  if constexpr (std::is_floating_point_v<Real>) {
    return std::numeric_limits<Real>::epsilon();
  } else {
    return static_cast<Real>(1.9259299443872359e-34L);  // binary128, 2^-112
  }
}

template <class Real>
struct SeriesSum {
  wide_complex value;
  int terms_used = 0;
  bool converged = false;
};

// Direct power series sum_k (a)_k (b)_k / ((c)_k k!) z^k.
template <class Real>
SeriesSum<Real> power_series(const WideHypParams& p, long double z, const SeriesOptions& opt) {
  const cplx<Real> a{static_cast<Real>(p.a.real()), static_cast<Real>(p.a.imag())};
  const cplx<Real> b{static_cast<Real>(p.b.real()), static_cast<Real>(p.b.imag())};
  const Real c = static_cast<Real>(p.c);
  const Real zz = static_cast<Real>(z);
  const Real eps = unit_roundoff<Real>();
  const Real rtol = static_cast<Real>(opt.rtol);

  cplx<Real> term{1, 0};
  cplx<Real> sum{1, 0};
  Real max_term = 1;
  SeriesSum<Real> out;
  if (z == 0.0L) {
    out.value = {1.0L, 0.0L};
    out.terms_used = 1;
    out.converged = true;
    return out;
  }
  int consecutive_small = 0;
  Real prev_t = 1;
  for (int k = 0; k < opt.max_terms; ++k) {
    const Real kk = static_cast<Real>(k);
    const cplx<Real> ak{a.re + kk, a.im};
    const cplx<Real> bk{b.re + kk, b.im};
    term = (term * ak * bk) * (zz / ((c + kk) * (kk + 1)));
    sum = sum + term;
    const Real t = cheap_abs(term);
    if (t > max_term) max_term = t;
    if (t == 0) {  // terminating series
      out.terms_used = k + 2;
      out.converged = true;
      break;
    }
    const Real s = cheap_abs(sum);
    const Real floor = eps * max_term;
    const Real ref = s > floor ? s : floor;
    // The remainder is about t r/(1-r) for term ratio r, which exceeds t once
    // z > 1/2; the last term alone understates the error there.
    const Real r = t / prev_t;
    prev_t = t;
    const bool tail_small = r < 1 && t * r <= rtol * ref * (1 - r);
    // Require two consecutive small terms so a transiently tiny term (a
    // parameter passing near a negative integer) does not stop the sum.
    if (t <= rtol * ref && tail_small) {
      if (++consecutive_small >= 2) {
        out.terms_used = k + 2;
        out.converged = true;
        break;
      }
    } else {
      consecutive_small = 0;
    }
  }
  if (!out.converged) out.terms_used = opt.max_terms;
  out.value = {static_cast<long double>(sum.re), static_cast<long double>(sum.im)};
  return out;
}

inline wide_complex wide_pow(long double base, const wide_complex& exponent) {
  // base > 0
  const long double lb = std::log(base);
  const long double mag = std::exp(static_cast<long double>(exponent.real()) * lb);
  const long double ph = static_cast<long double>(exponent.imag()) * lb;
  return {mag * std::cos(ph), mag * std::sin(ph)};
}

}  // namespace detail

struct WideResult {
  wide_complex value;
  int terms_used = 0;
};

/// 2F1(a, b; c; z) in extended precision for z in (-1, 1). Throws
/// convergence_error when the series does not settle within max_terms.
inline WideResult gauss_2f1_wide(const WideHypParams& p, long double z,
                                 const SeriesOptions& opt = {}) {
  validate(p);
  if (!(z > -1.0L && z < 1.0L)) {
    throw domain_error("2F1: argument outside (-1, 1)");
  }
  if (z < -0.5L) {
    // Pfaff: 2F1(a,b;c;z) = (1-z)^(-a) 2F1(a, c-b; c; z/(z-1)), image in (1/3, 1/2)
    const WideHypParams mapped{p.a, wide_complex(p.c) - p.b, p.c};
    const long double w = z / (z - 1.0L);
    auto s = detail::power_series<accumulator_real>(mapped, w, opt);
    if (!s.converged) throw convergence_error("2F1 (Pfaff branch) did not converge", s.terms_used);
    return {detail::wide_pow(1.0L - z, -p.a) * s.value, s.terms_used};
  }
  auto s = detail::power_series<accumulator_real>(p, z, opt);
  if (!s.converged) throw convergence_error("2F1 power series did not converge", s.terms_used);
  return {s.value, s.terms_used};
}

/// 2F1(a, b; c; z) for real z in (-1, 1): direct series for |z| <= 1/2, Pfaff
/// map for z < -1/2, guarded direct series on [1/2, 1).
inline EvalResult gauss_2f1(const HypParams& p, double z, const SeriesOptions& opt = {}) {
  const WideResult w = gauss_2f1_wide(widen(p), static_cast<long double>(z), opt);
  EvalResult r;
  r.value = complex(static_cast<double>(w.value.real()), static_cast<double>(w.value.imag()));
  r.imag_leak = std::abs(r.value.imag());
  r.terms_used = w.terms_used;
  r.converged = true;
  return r;
}

/// Parameters of an identity 2F1(p; z) = (1-z)^exponent 2F1(params; ·).
struct Transformed {
  HypParams params;
  complex exponent;
};

/// Euler: 2F1(a,b;c;z) = (1-z)^(c-a-b) 2F1(c-a, c-b; c; z).
inline Transformed apply_euler(const HypParams& p) {
  validate(p);
  const complex c(p.c);
  return {{c - p.a, c - p.b, p.c}, c - p.a - p.b};
}

struct PfaffTransformed {
  HypParams params;
  double argument = 0.0;
  complex exponent;
};

/// Pfaff: 2F1(a,b;c;z) = (1-z)^(-a) 2F1(a, c-b; c; z/(z-1)).
inline PfaffTransformed apply_pfaff(const HypParams& p, double z) {
  validate(p);
  if (!(z < 1.0)) throw domain_error("apply_pfaff: z must be < 1");
  return {{p.a, complex(p.c) - p.b, p.c}, z / (z - 1.0), -p.a};
}

/// P_n^{(mu,nu)}(x) by the three-term recurrence in n.
template <class Real = double>
Real jacobi_p(int n, Real mu, Real nu, Real x) {
  if (n < 0) throw parameter_error("jacobi_p: negative degree");
  if (!(mu > -1) || !(nu > -1)) throw parameter_error("jacobi_p: mu and nu must exceed -1");
  if (n == 0) return Real(1);
  Real prev = 1;
  Real cur = (mu - nu) / 2 + (mu + nu + 2) * x / 2;
  const Real ab = mu + nu;
  for (int k = 2; k <= n; ++k) {
    const Real kk = k;
    const Real s = 2 * kk + ab;
    const Real a1 = 2 * kk * (kk + ab) * (s - 2);
    const Real a2 = (s - 1) * (mu * mu - nu * nu);
    const Real a3 = (s - 2) * (s - 1) * s;
    const Real a4 = 2 * (kk + mu - 1) * (kk + nu - 1) * s;
    const Real next = ((a2 + a3 * x) * cur - a4 * prev) / a1;
    prev = cur;
    cur = next;
  }
  return cur;
}

}  // namespace rmdirac::special
