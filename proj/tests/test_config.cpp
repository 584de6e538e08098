#include <gtest/gtest.h>

#include <random>

#include "rmdirac/config.hpp"

using namespace rmdirac;

namespace {

config_error parse_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const config_error& e) {
    return e;
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return config_error("none");
}

}  // namespace

TEST(Config, EmptyTextIsCanonical) {
  const RunConfig c = parse_config("");
  EXPECT_EQ(c.params, PhysicalParams{});
  EXPECT_EQ(c.symmetry, Symmetry::spin);
  EXPECT_EQ(c.format, OutputFormat::csv);
}

TEST(Config, ParsesAllSections) {
  const RunConfig c = parse_config(R"(schema_version = 1
# comment
[params]
M = 6   ; trailing comment
alpha = 0.3
kappa = -2
C_ps = 0.25
[run]
symmetry = pseudospin
[tolerances]
tol_q = 1e-9
n_grid = 256
shoot_steps = 8000
[output]
directory = /tmp/x
format = json
[sweep]
field = V2
lo = -1
hi = 1
n = 5
)");
  EXPECT_EQ(c.params.M, 6.0);
  EXPECT_EQ(c.params.alpha, 0.3);
  EXPECT_EQ(c.params.kappa, -2);
  EXPECT_EQ(c.params.C_ps, 0.25);
  EXPECT_EQ(c.symmetry, Symmetry::pseudospin);
  EXPECT_EQ(c.tolerances.tol_q, 1e-9);
  EXPECT_EQ(c.tolerances.n_grid, 256);
  EXPECT_EQ(c.tolerances.shoot_steps, 8000);
  EXPECT_EQ(c.out_dir, "/tmp/x");
  EXPECT_EQ(c.format, OutputFormat::json);
  EXPECT_EQ(c.sweep.field, "V2");
  EXPECT_EQ(c.sweep.n, 5);
}

TEST(Config, KappaZeroNamesTheFieldAndLine) {
  const auto e = parse_error("schema_version = 1\n[params]\n\nkappa = 0\n");
  EXPECT_EQ(e.field(), "kappa");
  EXPECT_EQ(e.line(), 4);
  EXPECT_NE(std::string(e.what()).find("kappa"), std::string::npos);
}

TEST(Config, Diagnostics) {
  EXPECT_EQ(parse_error("[params]\nalpha = fast\n").line(), 2);
  EXPECT_EQ(parse_error("[params]\nalpha = fast\n").field(), "alpha");
  EXPECT_EQ(parse_error("[params]\nkappa = 1.5\n").field(), "kappa");
  EXPECT_EQ(parse_error("[params]\nmass = 1\n").field(), "mass");
  EXPECT_EQ(parse_error("[params]\nV1 = 1\nV1 = 2\n").line(), 3);
  EXPECT_EQ(parse_error("[nope]\n").line(), 1);
  EXPECT_EQ(parse_error("[params\n").line(), 1);
  EXPECT_EQ(parse_error("[params]\nalpha\n").line(), 2);
  EXPECT_EQ(parse_error("[params]\nalpha =\n").field(), "alpha");
  EXPECT_EQ(parse_error("[params]\nalpha = -1\n").field(), "alpha");
  EXPECT_EQ(parse_error("[params]\nV2 = inf\n").field(), "V2");
  EXPECT_EQ(parse_error("[run]\nsymmetry = both\n").field(), "symmetry");
  EXPECT_EQ(parse_error("[output]\nformat = xml\n").field(), "format");
  EXPECT_EQ(parse_error("[tolerances]\nshoot_steps = 100\n").field(), "shoot_steps");
  EXPECT_EQ(parse_error("[tolerances]\ntol_q = 0\n").field(), "tol_q");
  EXPECT_EQ(parse_error("[sweep]\nfield = kappa\n").field(), "field");
  EXPECT_EQ(parse_error("top = 1\n").field(), "top");
}

TEST(Config, RejectsUnknownSchemaVersion) {
  const auto e = parse_error("schema_version = 2\n");
  EXPECT_EQ(e.field(), "schema_version");
  EXPECT_NE(std::string(e.what()).find("unsupported"), std::string::npos);
}

TEST(Config, Presets) {
  const RunConfig c = parse_config("[run]\npreset = refutation\n[params]\nV1 = -2.5\n");
  EXPECT_EQ(c.params.V2, refutation_preset().params.V2);
  EXPECT_EQ(c.params.V1, -2.5);
  EXPECT_EQ(parse_error("[run]\npreset = nope\n").field(), "preset");
  EXPECT_EQ(parse_error("[params]\nV1 = 1\n[run]\npreset = canonical\n").field(), "preset");
}

TEST(Config, DumpRoundTrip) {
  RunConfig c;
  c.params.V1 = 0.1 + 0.2;  // not representable in few digits
  c.params.alpha = 1.0 / 3.0;
  c.params.kappa = -3;
  c.symmetry = Symmetry::pseudospin;
  c.tolerances.tol_q = 3e-11;
  c.out_dir = "some/dir";
  c.format = OutputFormat::json;
  c.sweep = {"r_e", 1.25, 3.5, 4};
  EXPECT_EQ(parse_config(dump_config(c)), c);
  EXPECT_EQ(dump_config(parse_config(dump_config(c))), dump_config(c));
}

TEST(Config, DumpRoundTripRandom) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.01, 10.0);
  for (int i = 0; i < 200; ++i) {
    RunConfig c;
    c.params.M = u(rng);
    c.params.alpha = u(rng);
    c.params.V1 = u(rng) - 5;
    c.params.V2 = u(rng) - 5;
    c.params.r_e = u(rng);
    c.params.C_s = u(rng) - 5;
    c.tolerances.rtol_2f1 = u(rng) * 1e-13;
    EXPECT_EQ(parse_config(dump_config(c)), c);
  }
}

TEST(Config, LoadReportsPath) {
  try {
    load_config("/nonexistent/file.ini");
    FAIL();
  } catch (const config_error& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/file.ini"), std::string::npos);
  }
}
