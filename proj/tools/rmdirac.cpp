#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "rmdirac/commands.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string symmetry;
  std::string out;
  std::string format;
  bool dump = false;
};

rmdirac::RunConfig effective_config(const Overrides& o) {
  rmdirac::RunConfig c = rmdirac::load_config(o.config);
  if (!o.symmetry.empty()) {
    const auto s = rmdirac::parse_symmetry(o.symmetry);
    if (!s) throw rmdirac::config_error("--symmetry must be spin or pseudospin", 0, "symmetry");
    c.symmetry = *s;
  }
  if (!o.out.empty()) c.out_dir = o.out;
  if (!o.format.empty()) {
    const auto f = rmdirac::parse_format(o.format);
    if (!f) throw rmdirac::config_error("--format must be csv or json", 0, "format");
    c.format = *f;
  }
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rosen-Morse Dirac bound states: spectra, oracle cross-checks, NU refutation"};
  app.require_subcommand(1);
  Overrides ov;
  app.add_option("--config", ov.config, "run configuration file")->required();
  app.add_option("--symmetry", ov.symmetry, "spin | pseudospin (overrides [run] symmetry)");
  app.add_option("--out", ov.out, "output directory (overrides [output] directory)");
  app.add_option("--format", ov.format, "csv | json (overrides [output] format)");
  app.add_flag("--dump-config", ov.dump, "print the effective configuration and exit");

  auto* spectrum = app.add_subcommand("spectrum", "bound levels from the quantization condition");

  auto* verify = app.add_subcommand("verify", "pair closed-form levels with shooting-oracle eigenvalues");
  rmdirac::VerifyOptions vo;
  verify->add_option("--corrupt-beta2", vo.beta2_scale, "debug: scale beta2 on the closed-form side");
  verify->add_flag("--exact-centrifugal", vo.exact_centrifugal, "also report the shift with the exact 1/r^2 term");

  auto* refute = app.add_subcommand("refute", "test the series-termination solutions against F(0) = 0");
  int nr_max = 3;
  refute->add_option("--nr-max", nr_max, "highest candidate degree")->capture_default_str();

  auto* wave = app.add_subcommand("wavefunction", "normalized upper/lower component table");
  rmdirac::LevelSelector sel;
  int sel_kappa = 0;
  auto* kappa_opt = wave->add_option("--kappa", sel_kappa, "kappa of the level (default: configured kappa)");
  wave->add_option("--n-r", sel.n_r, "radial quantum number")->required();

  auto* sweep = app.add_subcommand("sweep", "spectrum over a range of one parameter");
  rmdirac::SweepSpec sp;
  std::optional<std::string> field;
  std::optional<double> lo, hi;
  std::optional<int> n;
  sweep->add_option("--field", field, "parameter to vary (overrides [sweep] field)");
  sweep->add_option("--lo", lo, "first value");
  sweep->add_option("--hi", hi, "last value");
  sweep->add_option("--n", n, "number of points");

  for (auto* sub : {spectrum, verify, refute, wave, sweep}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? rmdirac::exit_ok : rmdirac::exit_error;
  }

  rmdirac::CommandIO io{std::cout, std::cerr};
  try {
    const rmdirac::RunConfig cfg = effective_config(ov);
    if (ov.dump) {
      std::cout << rmdirac::dump_config(cfg);
      return rmdirac::exit_ok;
    }
    if (spectrum->parsed()) return rmdirac::cmd_spectrum(cfg, io);
    if (verify->parsed()) return rmdirac::cmd_verify(cfg, vo, io);
    if (refute->parsed()) return rmdirac::cmd_refute(cfg, nr_max, io);
    if (wave->parsed()) {
      if (*kappa_opt) sel.kappa = sel_kappa;
      return rmdirac::cmd_wavefunction(cfg, sel, io);
    }
    sp = cfg.sweep;
    if (field) sp.field = *field;
    if (lo) sp.lo = *lo;
    if (hi) sp.hi = *hi;
    if (n) sp.n = *n;
    return rmdirac::cmd_sweep(cfg, sp, io);
  } catch (const rmdirac::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return rmdirac::exit_error;
}
