// Where the hypergeometric series terminates the solution is a Jacobi
// polynomial, and it does not vanish at r = 0. True levels do.
#include <cstdio>

#include "rmdirac/presets.hpp"
#include "rmdirac/spectrum.hpp"
#include "rmdirac/wavefunction.hpp"

int main() {
  using namespace rmdirac;
  const Preset pr = refutation_preset();
  const PhysicalParams& p = pr.params;
  const PekerisCoeffs d = pekeris_coeffs(p.alpha, p.r_e);

  const TerminationResult t = termination_spectrum(p, pr.symmetry, d, 3);
  std::puts("series-termination candidates");
  std::printf("%4s %18s %14s %14s %12s\n", "n_r", "E_nu", "|F(0)|/max", "analytic", "ODE resid");
  for (const auto& c : t.candidates) {
    const RefutationRecord rec = refutation_record(p, c);
    std::printf("%4d %18.12f %14.6e %14.6e %12.3e  %s\n", rec.n_r, rec.E_nu, rec.boundary_value,
                rec.analytic_boundary, rec.ode_residual, rec.verdict ? "violates F(0)=0" : "ok");
  }
  for (const auto& n : t.notes) std::printf("  note: %s\n", n.c_str());

  std::puts("\ntrue levels");
  for (const auto& l : enumerate_levels(p, pr.symmetry, d)) {
    std::printf("%4d %18.12f %14.6e\n", l.n_r, l.E, tabulate(p, l).boundary0);
  }
  return 0;
}
