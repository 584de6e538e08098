#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rmdirac/model.hpp"

using namespace rmdirac;

namespace {

PhysicalParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> M(1, 10), al(0.1, 1.0), re(0.5, 5), V(-5, 5), C(-2, 2);
  std::uniform_int_distribution<int> k(-3, 3);
  PhysicalParams p;
  p.M = M(rng);
  p.hbar_c = 1.0;
  p.alpha = al(rng);
  p.r_e = re(rng);
  p.V1 = V(rng);
  p.V2 = V(rng);
  do {
    p.kappa = k(rng);
  } while (p.kappa == 0);
  p.C_s = C(rng);
  p.C_ps = C(rng);
  return p;
}

double rel(double x, double ref, double floor = 1.0) { return std::abs(x - ref) / std::max(std::abs(ref), floor); }

}  // namespace

TEST(Params, ValidationNamesTheField) {
  PhysicalParams p;
  EXPECT_NO_THROW(p.validate());
  p.kappa = 0;
  try {
    p.validate();
    FAIL();
  } catch (const parameter_error& e) {
    EXPECT_NE(std::string(e.what()).find("kappa"), std::string::npos);
  }
  p = {};
  p.alpha = -1;
  EXPECT_THROW(p.validate(), parameter_error);
  p = {};
  p.hbar_c = 0;
  EXPECT_THROW(p.validate(), parameter_error);
}

TEST(Symmetry, ParseRoundTrip) {
  EXPECT_EQ(parse_symmetry(to_string(Symmetry::spin)), Symmetry::spin);
  EXPECT_EQ(parse_symmetry(to_string(Symmetry::pseudospin)), Symmetry::pseudospin);
  EXPECT_FALSE(parse_symmetry("both").has_value());
}

TEST(Sigma, Examples) {
  PhysicalParams p;
  p.V1 = 2.7;
  p.V2 = -1.3;
  EXPECT_NEAR(sigma(0.0, p), -p.V1, 1e-15);
  EXPECT_NEAR(sigma(50.0 / p.alpha, p), p.V2, 1e-12 * std::abs(p.V2) + 1e-12 * std::abs(p.V1));
  EXPECT_NEAR(sigma(std::log(2.0) / (2 * p.alpha), p), -8.0 / 9.0 * p.V1 + p.V2 / 3.0, 1e-14);
}

TEST(ChangeOfVariable, Examples) {
  const double a = 0.37;
  EXPECT_EQ(z_of_r(0.0, a), -1.0);
  EXPECT_LT(z_of_r(200.0, a), 0.0);
  EXPECT_GT(z_of_r(200.0, a), -1e-30);
  EXPECT_NEAR(z_of_r(std::log(2.0) / (2 * a), a), -0.5, 1e-15);
  EXPECT_NEAR(r_of_z(z_of_r(3.3, a), a), 3.3, 1e-13);
}

TEST(Pekeris, FrozenFixtures) {
  const auto d = pekeris_coeffs(0.5, 2.0);
  EXPECT_LT(rel(d.D0, 0.34056219022922407131), 1e-12);
  EXPECT_LT(rel(d.D1, -1.5397301776787325494), 1e-12);
  EXPECT_LT(rel(d.D2, 33.491885387704728717), 1e-12);
  const auto c = pekeris_coeffs(0.25, 2.5);
  EXPECT_LT(rel(c.D0, 1.3850419412238305476), 1e-12);
  EXPECT_LT(rel(c.D1, 12.700897145118977882), 1e-12);
  EXPECT_LT(rel(c.D2, 49.267714128475454671), 1e-12);
  EXPECT_GT(c.condition, 1.0);
  EXPECT_LT(c.condition, pekeris_condition_limit);
}

TEST(Pekeris, MatchingConditionsAtAnchor) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> al(0.05, 2.0), re(0.3, 6.0);
  for (int i = 0; i < 200; ++i) {
    const double alpha = al(rng), r_e = re(rng);
    if (alpha * r_e > 6) continue;  // past ~7.5 the matching system is rejected as ill-conditioned
    const auto d = pekeris_coeffs(alpha, r_e);
    const double y = 1.0 / (1.0 + std::exp(2 * alpha * r_e));
    const double y1 = -2 * alpha * y * (1 - y);
    const double y2 = 4 * alpha * alpha * y * (1 - y) * (1 - 2 * y);
    const double g0 = (d.D0 - d.D1 * y + d.D2 * y * y) / (r_e * r_e);
    const double g1 = (-d.D1 + 2 * d.D2 * y) * y1 / (r_e * r_e);
    const double g2 = (2 * d.D2 * y1 * y1 + (-d.D1 + 2 * d.D2 * y) * y2) / (r_e * r_e);
    EXPECT_LT(rel(g0, 1 / (r_e * r_e), 0), 1e-10);
    EXPECT_LT(rel(g1, -2 / std::pow(r_e, 3), 0), 1e-10);
    EXPECT_LT(rel(g2, 6 / std::pow(r_e, 4), 0), 1e-10);
  }
}

TEST(Pekeris, ThirdOrderLocalError) {
  for (double are : {0.5, 1.0, 2.0}) {
    const double r_e = 2.0, alpha = are / r_e;
    const auto d = pekeris_coeffs(alpha, r_e);
    std::vector<double> lx, ly;
    for (int i = 0; i <= 20; ++i) {
      const double h = r_e * std::pow(10.0, -4.0 + 2.0 * i / 20.0);
      const double r = r_e + h;
      lx.push_back(std::log(h));
      ly.push_back(std::log(std::abs(pekeris_inverse_square(r, alpha, r_e, d) - 1 / (r * r))));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
    mx /= lx.size();
    my /= ly.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) sxy += (lx[i] - mx) * (ly[i] - my), sxx += (lx[i] - mx) * (lx[i] - mx);
    EXPECT_GE(sxy / sxx, 2.9) << "alpha*r_e = " << are;
  }
}

TEST(Pekeris, LocalQualityAtUnitProduct) {
  const double alpha = 0.5, r_e = 2.0;
  const auto d = pekeris_coeffs(alpha, r_e);
  double worst = 0;
  for (int i = 0; i <= 4000; ++i) {
    const double r = r_e * (0.8 + 0.4 * i / 4000.0);
    worst = std::max(worst, rel(pekeris_inverse_square(r, alpha, r_e, d), 1 / (r * r), 0));
  }
  EXPECT_LE(worst, 0.05);
  EXPECT_NEAR(worst, 0.01166, 1e-4);
}

TEST(Pekeris, DegenerateProductIsRejected) {
  try {
    pekeris_coeffs(1e-6, 1.0);
    FAIL();
  } catch (const numerical_error& e) {
    EXPECT_NE(std::string(e.what()).find("condition"), std::string::npos);
  }
  EXPECT_THROW(pekeris_coeffs(30.0, 2.0), numerical_error);
  EXPECT_THROW(pekeris_coeffs(0.0, 2.0), parameter_error);
}

TEST(MapCoeffs, FreeReduction) {
  PhysicalParams p;
  p.kappa = -1;
  p.V1 = p.V2 = 0;
  p.C_s = 0.7;
  const auto d = pekeris_coeffs(p.alpha, p.r_e);
  for (double E : {-4.0, -1.0, 0.3, 2.5, 4.9}) {
    const auto c = map_coeffs(p, E, Symmetry::spin, d);
    const double k2 = (E * E - p.M * p.M + p.C_s * (p.M - E)) / (p.hbar_c * p.hbar_c);
    EXPECT_NEAR(c.eps_sq, -k2 / (4 * p.alpha * p.alpha), 1e-13);
    EXPECT_NEAR(c.beta1, c.eps_sq, 1e-13);
    EXPECT_NEAR(c.beta2, 2 * c.eps_sq, 1e-13);
    EXPECT_NEAR(c.beta1 - c.beta2 + c.eps_sq, 0.0, 1e-13);
    if (c.exponents_real()) {
      EXPECT_NEAR(c.delta_plus, 1.0, 1e-12);
    }
  }
}

TEST(MapCoeffs, CoefficientIdentityHundredDraws) {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 100; ++i) {
    const PhysicalParams p = random_params(rng);
    const auto d = pekeris_coeffs(p.alpha, p.r_e);
    std::uniform_real_distribution<double> e(-p.M, p.M);
    const double E = e(rng);
    for (Symmetry s : {Symmetry::spin, Symmetry::pseudospin}) {
      const auto c = map_coeffs(p, E, s, d);
      const double L = s == Symmetry::spin ? p.kappa * (p.kappa + 1.0) : p.kappa * (p.kappa - 1.0);
      const double gamma = couplings(p, E, s).coupling;
      const double rhs = (L * d.D2 / (p.r_e * p.r_e) + 4 * gamma * p.V1) / (4 * p.alpha * p.alpha);
      const double scale = std::max({1.0, std::abs(c.beta1), std::abs(c.beta2), std::abs(c.eps_sq)});
      EXPECT_LT(std::abs(c.beta1 - c.beta2 + c.eps_sq - rhs) / scale, 1e-12);
    }
  }
}

TEST(MapCoeffs, DualityHundredDraws) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    const PhysicalParams p = random_params(rng);
    const auto d = pekeris_coeffs(p.alpha, p.r_e);
    std::uniform_real_distribution<double> e(-p.M, p.M);
    const double E = e(rng);
    const auto a = map_coeffs(p, E, Symmetry::spin, d);
    const auto b = map_coeffs(duality_image(p), -E, Symmetry::pseudospin, d);
    const double scale = std::max({1.0, std::abs(a.beta1), std::abs(a.beta2), std::abs(a.eps_sq)});
    EXPECT_LT(std::abs(a.eps_sq - b.eps_sq) / scale, 1e-12);
    EXPECT_LT(std::abs(a.beta1 - b.beta1) / scale, 1e-12);
    EXPECT_LT(std::abs(a.beta2 - b.beta2) / scale, 1e-12);
  }
}

TEST(MapCoeffs, DerivedQuantities) {
  const auto c = make_coeffs(2.0, 5.0, 1.0);
  EXPECT_NEAR(c.delta_plus, 0.5 + std::sqrt(0.25 + 5.0 - 1.0 + 2.0), 1e-15);
  EXPECT_NEAR(std::norm(c.sqrt_beta1), 5.0, 1e-14);
  const auto n = make_coeffs(2.0, -3.0, 0.0);
  EXPECT_EQ(n.sqrt_beta1.real(), 0.0);
  EXPECT_NEAR((n.sqrt_beta1 * n.sqrt_beta1).real(), -3.0, 1e-14);
  const auto bad = make_coeffs(0.1, 0.0, 5.0);
  EXPECT_TRUE(std::isnan(bad.delta_plus));
  EXPECT_THROW(bad.require_bound_exponents(), complex_exponent_error);
  EXPECT_THROW(make_coeffs(-0.1, 1.0, 0.0).require_bound_exponents(), domain_error);
}

TEST(Window, FreeCaseIsMassGap) {
  PhysicalParams p;
  p.kappa = -1;
  p.V1 = p.V2 = 0;
  p.C_s = 0;
  const auto w = bound_window(p, Symmetry::spin, pekeris_coeffs(p.alpha, p.r_e));
  ASSERT_TRUE(w);
  EXPECT_NEAR(w->lo, -p.M, 1e-12);
  EXPECT_NEAR(w->hi, p.M, 1e-12);
}

TEST(Window, CanonicalFixture) {
  const PhysicalParams p;
  const auto w = bound_window(p, Symmetry::spin, pekeris_coeffs(p.alpha, p.r_e));
  ASSERT_TRUE(w);
  EXPECT_EQ(w->lo, -5.0);
  EXPECT_NEAR(w->hi, 5.5420424621493378, 1e-12);
}

TEST(Window, RandomCorrectness) {
  std::mt19937_64 rng(99);
  int windows = 0;
  for (int t = 0; t < 60; ++t) {
    const PhysicalParams p = random_params(rng);
    const auto d = pekeris_coeffs(p.alpha, p.r_e);
    for (Symmetry s : {Symmetry::spin, Symmetry::pseudospin}) {
      const auto w = bound_window(p, s, d);
      if (!w) continue;
      ++windows;
      const auto q = eps_quadratic(p, s, d);
      std::uniform_real_distribution<double> in(w->lo, w->hi);
      for (int i = 0; i < 20; ++i) {
        const double E = in(rng);
        if (E == w->lo) continue;
        EXPECT_GT(map_coeffs(p, E, s, d).eps_sq, 0.0);
      }
      const double qs = std::max({1.0, std::abs(q.qc), std::abs(q.qa) * w->hi * w->hi});
      const bool lo_is_root = !(s == Symmetry::spin && w->lo == -p.M);
      const bool hi_is_root = !(s == Symmetry::pseudospin && w->hi == p.M);
      if (lo_is_root) {
        EXPECT_LT(std::abs(q(w->lo)) / qs, 1e-10);
        EXPECT_LT(map_coeffs(p, w->lo - 1e-6, s, d).eps_sq, 0.0);
      }
      if (hi_is_root) {
        EXPECT_LT(std::abs(q(w->hi)) / qs, 1e-10);
        EXPECT_LT(map_coeffs(p, w->hi + 1e-6, s, d).eps_sq, 0.0);
      }
    }
  }
  EXPECT_GT(windows, 20);
}

TEST(Window, EmptyForHugeNegativeBias) {
  PhysicalParams p;
  p.V2 = -200.0;  // threshold pushed below -M, the spin guard rail
  p.kappa = -1;    // no centrifugal offset to keep eps^2 positive near -M
  EXPECT_FALSE(bound_window(p, Symmetry::spin, pekeris_coeffs(p.alpha, p.r_e)).has_value());
}
