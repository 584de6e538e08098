// Reference energies from an independent 40-digit evaluation of the
// quantization condition (mpmath), 512-point bracket scan.
#pragma once

#include <vector>

#include "rmdirac/presets.hpp"

namespace fixtures {

struct SpectrumFixture {
  const char* name;
  rmdirac::PhysicalParams params;
  double window_hi;
  std::vector<double> levels;
};

inline rmdirac::PhysicalParams with(double V1, double alpha) {
  rmdirac::PhysicalParams p;
  p.V1 = V1;
  p.alpha = alpha;
  return p;
}

inline std::vector<SpectrumFixture> spin_sets() {
  return {
      {"canonical", with(3.0, 0.25), 5.5420424621493378,
       {2.7249104090112186, 3.2488134777118836, 3.7037978346498056, 4.0973851546055822, 4.4363384200768656,
        4.7256838852203553, 4.9689592953979206, 5.1684984406749269, 5.3256205550604605, 5.4407216717406237,
        5.5132725444952591, 5.5417127811414711}},
      {"V1+30%", with(3.9, 0.25), 5.5420424621493378,
       {1.9347049557309453, 2.5488465506034767, 3.0822163360950632, 3.546284785434133, 3.9505401905064475,
        4.3018607869765742, 4.6051262212665112, 4.8637287573248459, 5.0799075616243869, 5.2549461109329845,
        5.3892660885552219, 5.4824324642025121, 5.5330649697177687}},
      {"V1-30%", with(2.1, 0.25), 5.5420424621493378,
       {3.5194206632204196, 3.9473337179761449, 4.3160934248776155, 4.6302073703607336, 4.894114235500989,
        5.1111141625718503, 5.2833800989898735, 5.4120635376462938, 5.4973459882953978, 5.5384022291183598}},
      {"alpha+30%", with(3.0, 0.325), 5.517127743444172,
       {2.8847760294101206, 3.5219838082318139, 4.0504350588024238, 4.485642380080627, 4.8383981918817298,
        5.1154150629427273, 5.3202455342025707, 5.4537321873132794, 5.5139874987313572}},
      {"alpha-30%", with(3.0, 0.175), 5.6408404371940584,
       {2.5555783722382229, 2.94813461797743, 3.3076645024845082, 3.6340219851985481, 3.9295642617114542,
        4.196737539268235, 4.4376494935249417, 4.6540213873402333, 4.8472223066681596, 5.0183150413883837,
        5.1680957747607829, 5.2971237017964798, 5.4057403742190836, 5.4940792011825767, 5.5620651689781398,
        5.6094040452180448, 5.6355591643936089}},
  };
}

// Refutation preset: window, true levels, series-termination energies.
inline constexpr double refutation_window_lo = -4.3919937271499812;
inline constexpr double refutation_window_hi = -0.60800627285001885;
inline const std::vector<double> refutation_levels{-4.3698559840397672, -4.2846601619658193, -4.164167908859603};
inline const std::vector<double> refutation_nu{-2.1373339532222491, -1.8416302688865592, -1.5713011322893813,
                                               -1.3263456134653469};

}  // namespace fixtures
