// Canonical spin spectrum, each level paired with its shooting-oracle value.
#include <cmath>
#include <cstdio>

#include "rmdirac/oracle.hpp"
#include "rmdirac/presets.hpp"
#include "rmdirac/spectrum.hpp"

int main() {
  using namespace rmdirac;
  const Preset pr = canonical_preset();
  const PhysicalParams& p = pr.params;
  const PekerisCoeffs d = pekeris_coeffs(p.alpha, p.r_e);
  const SpectrumResult r = solve_spectrum(p, pr.symmetry, d);
  if (!r.window) {
    std::puts("no bound window");
    return 2;
  }
  std::printf("window (%.6f, %.6f), %zu levels\n", r.window->lo, r.window->hi, r.levels.size());
  const auto oracle = oracle_eigenvalues(p, pr.symmetry, d, *r.window);
  std::printf("%4s %20s %20s %10s\n", "n_r", "E (closed form)", "E (oracle)", "rel diff");
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    const auto& l = r.levels[i];
    if (i < oracle.size()) {
      std::printf("%4d %20.15f %20.15f %10.2e\n", l.n_r, l.E, oracle[i], std::abs(oracle[i] - l.E) / std::abs(l.E));
    } else {
      std::printf("%4d %20.15f %20s\n", l.n_r, l.E, "-");
    }
  }
  return 0;
}
