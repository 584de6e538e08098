#pragma once

#include <optional>
#include <string_view>

#include "rmdirac/model.hpp"

namespace rmdirac {

struct Preset {
  PhysicalParams params;
  Symmetry symmetry = Symmetry::spin;
};

/// Dimensionless desk-scale set with a dozen spin levels.
inline Preset canonical_preset() { return {}; }

/// A set whose bound window also contains series-termination energies for
/// n_r = 0..3, so the polynomial solutions can be tested against F(0) = 0.
inline Preset refutation_preset() {
  Preset p;
  p.params.V1 = -2.0;
  p.params.V2 = -6.0;
  p.params.kappa = 2;
  p.params.C_s = 1.0;
  return p;
}

inline std::optional<Preset> find_preset(std::string_view name) {
  if (name == "canonical") return canonical_preset();
  if (name == "refutation") return refutation_preset();
  return std::nullopt;
}

}  // namespace rmdirac
