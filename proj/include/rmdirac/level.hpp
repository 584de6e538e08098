#pragma once

#include <string>

#include "rmdirac/model.hpp"

namespace rmdirac {

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

/// One bound state of the quantization condition.
struct EnergyLevel {
  int n_r = 0;  // node count of the closed-form component
  int kappa = 0;
  Symmetry symmetry = Symmetry::spin;
  double E = 0.0;
  ReducedCoeffs coeffs;
  double q_residual = 0.0;  // |quantization value| at E
  Bracket bracket;
  bool marginal = false;  // root within the endpoint guard band of the window
};

/// A series-termination (Jacobi-polynomial) candidate energy.
struct NuCandidate {
  int n_r = 0;
  double E = 0.0;
  ReducedCoeffs coeffs;
};

/// Boundary evidence for one NU candidate.
struct RefutationRecord {
  int n_r = 0;
  double E_nu = 0.0;
  double boundary_value = 0.0;  // |F_NU(r=0)| / max_r |F_NU|
  double analytic_boundary = 0.0;  // 2^delta_plus P_n(3) / max_r |F_NU|
  double ode_residual = 0.0;
  bool ode_ok = false;
  bool verdict = false;  // violates F(0) = 0
};

inline constexpr double refutation_violation_threshold = 0.01;
inline constexpr double ode_residual_tolerance = 1e-6;

}  // namespace rmdirac
