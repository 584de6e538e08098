#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "rmdirac/spectrum.hpp"
#include "rmdirac/wavefunction.hpp"

using namespace rmdirac;

namespace {

struct Levels {
  PhysicalParams p;
  PekerisCoeffs d;
  std::vector<EnergyLevel> levels;
};

const Levels& canonical() {
  static const Levels l = [] {
    Levels x;
    x.d = pekeris_coeffs(x.p.alpha, x.p.r_e);
    x.levels = enumerate_levels(x.p, Symmetry::spin, x.d);
    return x;
  }();
  return l;
}

struct Refutation {
  Preset pr;
  PekerisCoeffs d;
  std::vector<EnergyLevel> levels;
  std::vector<NuCandidate> candidates;
};

const Refutation& refutation() {
  static const Refutation r = [] {
    Refutation x;
    x.pr = refutation_preset();
    x.d = pekeris_coeffs(x.pr.params.alpha, x.pr.params.r_e);
    x.levels = enumerate_levels(x.pr.params, x.pr.symmetry, x.d);
    x.candidates = termination_spectrum(x.pr.params, x.pr.symmetry, x.d, 3).candidates;
    return x;
  }();
  return r;
}

}  // namespace

TEST(Component, AsymptoticDecayFactor) {
  const auto& c = canonical();
  for (const auto& l : c.levels) {
    const double eps = l.coeffs.epsilon();
    // Beyond 20 decay lengths and past the potential's range (exp(-2 alpha r) < e^-40).
    const double r = std::max(20.0 / (2 * c.p.alpha * eps), 20.0 / c.p.alpha);
    const double ratio = eval_component(c.p, l, r + 1 / c.p.alpha) / eval_component(c.p, l, r);
    EXPECT_NEAR(ratio / std::exp(-2 * eps), 1.0, 1e-6) << "n_r = " << l.n_r;
  }
}

TEST(Component, VanishesAtOriginOnTrueLevels) {
  const auto& c = canonical();
  for (const auto& l : c.levels) {
    const auto t = tabulate(c.p, l);
    EXPECT_LE(t.boundary0, 1e-8) << "n_r = " << l.n_r;
    EXPECT_EQ(t.r.front(), 0.0);
  }
  const auto& f = refutation();
  for (const auto& l : f.levels) EXPECT_LE(tabulate(f.pr.params, l).boundary0, 1e-8);
}

TEST(Component, TerminatingCaseIsElementary) {
  const PhysicalParams p;
  const auto c = make_coeffs(0.25, 1.0, -2.5);  // second parameter = 0
  const double eps = 0.5;
  for (double r : {0.0, 0.3, 1.7, 6.0, 25.0}) {
    const double u = std::exp(-2 * p.alpha * r);
    const double expected = std::exp(-2 * p.alpha * eps * r) * std::pow(1 + u, -eps - 1.0);
    EXPECT_NEAR(eval_component(p, c, r), expected, 1e-15 * std::max(1.0, expected));
  }
}

TEST(Component, RejectsNegativeRadius) {
  const auto& c = canonical();
  EXPECT_THROW(eval_component(c.p, c.levels.front(), -0.1), rmdirac::domain_error);
}

TEST(Component, NegativeBeta1IsReal) {
  PhysicalParams p;
  p.V2 = 2.0;
  const auto d = pekeris_coeffs(p.alpha, p.r_e);
  const auto levels = enumerate_levels(p, Symmetry::spin, d);
  int checked = 0;
  for (const auto& l : levels) {
    if (l.coeffs.beta1 >= 0) continue;
    const auto t = tabulate(p, l);
    EXPECT_LE(t.boundary0, 1e-8);
    EXPECT_EQ(t.nodes, l.n_r);
    ++checked;
  }
  EXPECT_GT(checked, 5);
}

TEST(Table, NormalizationContract) {
  const auto& c = canonical();
  for (const auto& l : c.levels) {
    const auto raw = tabulate(c.p, l);
    const auto t = normalize(raw);
    EXPECT_NEAR(trapezoid_norm(t.r, t.values), 1.0, 1e-8);
    EXPECT_EQ(t.norm, raw.norm);
    const double lobe = *std::find_if(t.values.begin(), t.values.end(),
                                      [&](double v) { return std::abs(v) > 1e-9 * max_abs(t.values); });
    EXPECT_GT(lobe, 0.0);
    EXPECT_LE(t.boundary_inf, 1e-10);
  }
}

TEST(Table, NormalizeIsIdempotentAndScaleInvariant) {
  const auto& c = canonical();
  const auto raw = tabulate(c.p, c.levels[3]);
  const auto once = normalize(raw);
  const auto twice = normalize(once);
  std::vector<double> scaled = raw.values;
  for (double& v : scaled) v *= -7.0;
  const auto seven = normalize(make_table(raw.r, scaled));
  for (std::size_t i = 0; i < once.values.size(); ++i) {
    EXPECT_NEAR(twice.values[i], once.values[i], 1e-12);
    EXPECT_NEAR(seven.values[i], once.values[i], 1e-12);
  }
}

TEST(Table, NormConvergesUnderRefinement) {
  const auto& c = canonical();
  for (const auto& l : {c.levels.front(), c.levels[5]}) {
    GridOptions g;
    const double coarse = tabulate(c.p, l, g).norm;
    g.points = 2 * g.points - 1;
    const double fine = tabulate(c.p, l, g).norm;
    EXPECT_LT(std::abs(coarse - fine) / fine, 1e-6);
  }
}

TEST(Table, ZeroNormRejected) {
  EXPECT_THROW(normalize(make_table({0.0, 1.0, 2.0}, {0.0, 0.0, 0.0})), parameter_error);
  EXPECT_THROW(make_table({0.0, 1.0}, {1.0}), parameter_error);
}

TEST(Table, DecaySlope) {
  const auto& c = canonical();
  for (const auto& l : c.levels) {
    const auto t = tabulate(c.p, l);
    const double r_max = t.r.back();
    std::vector<double> x, y;
    for (std::size_t i = 0; i < t.r.size(); ++i) {
      if (t.r[i] < 0.9 * r_max) continue;
      x.push_back(t.r[i]);
      y.push_back(std::log(std::abs(t.values[i])));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
    mx /= x.size();
    my /= y.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
    const double expected = -2 * c.p.alpha * l.coeffs.epsilon();
    EXPECT_NEAR(sxy / sxx / expected, 1.0, 0.01) << "n_r = " << l.n_r;
  }
}

TEST(Nodes, ConsecutiveOnCanonicalSet) {
  const auto& c = canonical();
  for (std::size_t i = 0; i < c.levels.size(); ++i) {
    EXPECT_EQ(tabulate(c.p, c.levels[i]).nodes, static_cast<int>(i));
  }
}

TEST(Nodes, SyntheticTables) {
  EXPECT_EQ(count_nodes(make_table({0, 1, 2, 3}, {1, 2, 3, 4})), 0);
  EXPECT_EQ(count_nodes(make_table({0, 1, 2, 3, 4}, {0, 1, -1, 1, 0})), 2);
  // dust below the noise band is ignored
  EXPECT_EQ(count_nodes(make_table({0, 1, 2, 3}, {1, -1e-12, 1e-12, 1})), 0);
}

TEST(Grid, Shape) {
  const auto r = radial_grid(40.0, 100, 1.5);
  EXPECT_EQ(r.front(), 0.0);
  EXPECT_EQ(r.back(), 40.0);
  for (std::size_t i = 1; i < r.size(); ++i) EXPECT_GT(r[i], r[i - 1]);
  EXPECT_LT(r[1] - r[0], r.back() - r[r.size() - 2]);  // denser near the origin
  EXPECT_THROW(radial_grid(1.0, 1, 1.0), parameter_error);
}

TEST(Grid, DensityPerDecayLength) {
  const auto& c = canonical();
  for (const auto& l : c.levels) {
    const auto t = tabulate(c.p, l);
    const double decay = 1 / (2 * c.p.alpha * l.coeffs.epsilon());
    double widest = 0;
    for (std::size_t i = 1; i < t.r.size(); ++i) widest = std::max(widest, t.r[i] - t.r[i - 1]);
    EXPECT_LE(widest * 32, decay * 1.0001);
  }
}

TEST(NuForm, DegreeZeroBoundaryIsAnalytic) {
  const auto& f = refutation();
  ASSERT_FALSE(f.candidates.empty());
  const auto& c0 = f.candidates.front();
  ASSERT_EQ(c0.n_r, 0);
  const double dp = c0.coeffs.delta_plus;
  EXPECT_NEAR(eval_nu_component(f.pr.params, c0, 0.0), std::pow(2.0, dp), 1e-12 * std::pow(2.0, dp));
  // degree-0 form is |z|^eps (1-z)^delta+ exactly
  for (double r : {0.5, 2.0, 9.0}) {
    const double u = std::exp(-2 * f.pr.params.alpha * r);
    const double expected = std::pow(u, c0.coeffs.epsilon()) * std::pow(1 + u, dp);
    EXPECT_NEAR(eval_nu_component(f.pr.params, c0, r), expected, 1e-12 * expected);
  }
}

TEST(NuForm, RefutationRecords) {
  const auto& f = refutation();
  ASSERT_EQ(f.candidates.size(), 4u);
  for (const auto& cand : f.candidates) {
    const auto rec = refutation_record(f.pr.params, cand);
    EXPECT_EQ(rec.n_r, cand.n_r);
    EXPECT_GT(rec.boundary_value, refutation_violation_threshold) << "n_r = " << cand.n_r;
    EXPECT_TRUE(rec.verdict);
    EXPECT_LE(rec.ode_residual, 1e-6) << "n_r = " << cand.n_r;
    EXPECT_TRUE(rec.ode_ok);
    EXPECT_NEAR(rec.analytic_boundary, rec.boundary_value, 1e-12 * rec.boundary_value);
  }
}

TEST(NuForm, ClosedFormAtCandidateEnergyDoesNotVanish) {
  // The hypergeometric solution at a termination energy is the NU polynomial
  // up to a constant; both violate F(0) = 0 there.
  const auto& f = refutation();
  for (const auto& cand : f.candidates) {
    const auto nu = normalize(tabulate_nu(f.pr.params, cand));
    const auto cf = normalize(tabulate(f.pr.params, cand.coeffs));
    double worst = 0;
    for (std::size_t i = 0; i < nu.values.size(); ++i) worst = std::max(worst, std::abs(nu.values[i] - cf.values[i]));
    EXPECT_LT(worst, 1e-8) << "n_r = " << cand.n_r;
    EXPECT_GT(cf.boundary0, 0.01);
  }
}

TEST(OdeResidual, FalseCoefficientsAreDetected) {
  const auto& c = canonical();
  EnergyLevel bad = c.levels.front();
  bad.coeffs = make_coeffs(bad.coeffs.eps_sq, bad.coeffs.beta1, bad.coeffs.beta2 * 1.01);
  const ClosedForm f = closed_form(bad.coeffs);
  const double r = transformed_ode_residual([&](long double z) { return eval_component_z(f, z, residual_series); },
                                            c.levels.front().coeffs);
  EXPECT_GE(r, 1e-3);
}

TEST(OdeResidual, ConstantFunctionProfile) {
  const auto c = make_coeffs(0.7, 2.0, 1.5);
  const double r = transformed_ode_residual([](long double) { return 1.0L; }, c);
  double expected = 0;
  for (int i = 0; i < 50; ++i) {
    const double z = -1.0 + (i + 1) / 51.0;
    expected = std::max(expected, std::abs(((2.0 * z - 1.5) * z + 0.7) / (z * (1 - z))));
  }
  EXPECT_NEAR(r, expected, 1e-9 * expected);
  EXPECT_GT(r, 0.0);
}
