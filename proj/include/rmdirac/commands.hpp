// The five CLI subcommands as library calls. Each writes one file into the
// configured output directory (write-temp-then-rename) and returns the exit
// status: 0 success, 1 usage/config error, 2 empty result, 3 verification
// mismatch.
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "rmdirac/config.hpp"
#include "rmdirac/oracle.hpp"
#include "rmdirac/spectrum.hpp"
#include "rmdirac/wavefunction.hpp"

namespace rmdirac {

enum ExitCode : int { exit_ok = 0, exit_error = 1, exit_empty = 2, exit_mismatch = 3 };

inline constexpr double verify_match_rel = 1e-6;

struct CommandIO {
  std::ostream& out;
  std::ostream& err;
};

inline SpectrumOptions spectrum_options(const RunConfig& c) {
  SpectrumOptions o;
  o.series.max_terms = c.tolerances.max_terms;
  o.series.rtol = c.tolerances.rtol_2f1;
  o.tol_q = c.tolerances.tol_q;
  o.n_grid = c.tolerances.n_grid;
  return o;
}

inline ShootConfig shoot_config(const RunConfig& c) {
  ShootConfig s;
  s.steps = c.tolerances.shoot_steps;
  s.n_grid = c.tolerances.n_grid;
  return s;
}

namespace io {

using nlohmann::json;

inline std::string num(double v) { return detail::fmt_real(v); }

/// Replaces `path` in one step; readers never see a partial file.
inline void write_atomic(const std::filesystem::path& path, const std::string& body) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ostringstream suffix;
  suffix << ".tmp." << std::this_thread::get_id();
  const fs::path tmp = path.string() + suffix.str();
  {
    std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
    if (!o) throw error("cannot write '" + tmp.string() + "'");
    o << body;
    o.flush();
    if (!o) throw error("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw error("cannot rename onto '" + path.string() + "': " + ec.message());
  }
}

inline json params_json(const PhysicalParams& p) {
  return {{"M", p.M},     {"hbar_c", p.hbar_c}, {"alpha", p.alpha}, {"V1", p.V1},     {"V2", p.V2},
          {"r_e", p.r_e}, {"kappa", p.kappa},   {"C_s", p.C_s},     {"C_ps", p.C_ps}};
}

inline json level_json(const EnergyLevel& l) {
  return {{"symmetry", to_string(l.symmetry)},
          {"kappa", l.kappa},
          {"n_r", l.n_r},
          {"E", l.E},
          {"eps", l.coeffs.epsilon()},
          {"delta_plus", l.coeffs.exponents_real() ? json(l.coeffs.delta_plus) : json(nullptr)},
          {"beta1", l.coeffs.beta1},
          {"q_residual", l.q_residual},
          {"bracket_lo", l.bracket.lo},
          {"bracket_hi", l.bracket.hi}};
}

inline const char* spectrum_header = "symmetry,kappa,n_r,E,eps,delta_plus,q_residual,bracket_lo,bracket_hi";

inline std::string level_csv(const EnergyLevel& l) {
  std::ostringstream o;
  o << to_string(l.symmetry) << ',' << l.kappa << ',' << l.n_r << ',' << num(l.E) << ',' << num(l.coeffs.epsilon())
    << ',' << (l.coeffs.exponents_real() ? num(l.coeffs.delta_plus) : std::string("nan")) << ','
    << num(l.q_residual) << ',' << num(l.bracket.lo) << ',' << num(l.bracket.hi);
  return o.str();
}

inline std::string schema_line() { return "# schema_version=" + std::to_string(schema_version) + "\n"; }

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline std::filesystem::path output_path(const RunConfig& c, const std::string& stem) {
  return std::filesystem::path(c.out_dir) / (stem + (c.format == OutputFormat::csv ? ".csv" : ".json"));
}

}  // namespace io


/// Parsed CSV artifact: "# key=value" metadata lines, a header, data rows.
struct CsvArtifact {
  std::map<std::string, std::string> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream s(line);
  while (std::getline(s, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline CsvArtifact read_csv_artifact(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("cannot open '" + path + "'");
  CsvArtifact a;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find('=');
      if (eq != std::string::npos) a.meta[line.substr(2, eq - 2)] = line.substr(eq + 1);
      continue;
    }
    if (a.columns.empty()) {
      a.columns = split_csv(line);
      continue;
    }
    auto row = split_csv(line);
    if (row.size() != a.columns.size()) {
      throw error(path + ": line " + std::to_string(line_no) + " has " + std::to_string(row.size()) +
                  " fields, expected " + std::to_string(a.columns.size()));
    }
    a.rows.push_back(std::move(row));
  }
  const auto v = a.meta.find("schema_version");
  if (v == a.meta.end()) throw error(path + ": missing schema_version");
  if (v->second != std::to_string(schema_version)) {
    throw error(path + ": unsupported schema_version " + v->second);
  }
  return a;
}

inline nlohmann::json read_json_artifact(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw error(path + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("schema_version")) throw error(path + ": missing schema_version");
  if (j["schema_version"] != schema_version) {
    throw error(path + ": unsupported schema_version " + j["schema_version"].dump());
  }
  return j;
}


inline std::string render_spectrum(const RunConfig& c, const SpectrumResult& r) {
  if (c.format == OutputFormat::csv) {
    std::string body = io::schema_line() + io::spectrum_header + "\n";
    for (const auto& l : r.levels) body += io::level_csv(l) + "\n";
    return body;
  }
  nlohmann::json j;
  j["schema_version"] = schema_version;
  j["kind"] = "spectrum";
  j["symmetry"] = to_string(c.symmetry);
  j["params"] = io::params_json(c.params);
  j["window"] = r.window ? nlohmann::json{{"lo", r.window->lo}, {"hi", r.window->hi}} : nlohmann::json(nullptr);
  j["levels"] = nlohmann::json::array();
  for (const auto& l : r.levels) j["levels"].push_back(io::level_json(l));
  j["marginal"] = nlohmann::json::array();
  for (const auto& l : r.marginal) j["marginal"].push_back(io::level_json(l));
  return io::dump(j);
}

inline SpectrumResult compute_spectrum(const RunConfig& c) {
  const PekerisCoeffs d = pekeris_coeffs(c.params.alpha, c.params.r_e);
  return solve_spectrum(c.params, c.symmetry, d, spectrum_options(c));
}

inline int cmd_spectrum(const RunConfig& c, CommandIO io) {
  const SpectrumResult r = compute_spectrum(c);
  const auto path = io::output_path(c, "spectrum");
  io::write_atomic(path, render_spectrum(c, r));
  for (const auto& m : r.marginal) io.err << "note: root at E = " << io::num(m.E) << " is pinned to the window edge\n";
  if (!r.window) {
    io.err << "empty bound window: eps^2(E) > 0 nowhere on the allowed side of the mass gap\n";
    return exit_empty;
  }
  if (r.levels.empty()) {
    io.err << "no bound levels in [" << io::num(r.window->lo) << ", " << io::num(r.window->hi) << "]\n";
    return exit_empty;
  }
  io.out << r.levels.size() << " levels -> " << path.string() << "\n";
  return exit_ok;
}


struct VerifyOptions {
  double beta2_scale = 1.0;  // != 1 corrupts the closed-form side
  bool exact_centrifugal = false;
};

inline int cmd_verify(const RunConfig& c, const VerifyOptions& vo, CommandIO io) {
  using nlohmann::json;
  const PekerisCoeffs d = pekeris_coeffs(c.params.alpha, c.params.r_e);
  SpectrumOptions so = spectrum_options(c);
  so.beta2_scale = vo.beta2_scale;
  const SpectrumResult closed = solve_spectrum(c.params, c.symmetry, d, so);
  const ShootConfig sc = shoot_config(c);
  OracleResult oracle;
  if (closed.window) oracle = oracle_solve(c.params, c.symmetry, d, *closed.window, sc);

  json j;
  j["schema_version"] = schema_version;
  j["kind"] = "verify";
  j["symmetry"] = to_string(c.symmetry);
  j["params"] = io::params_json(c.params);
  j["beta2_scale"] = vo.beta2_scale;
  j["window"] = closed.window ? json{{"lo", closed.window->lo}, {"hi", closed.window->hi}} : json(nullptr);
  j["tolerance"] = verify_match_rel;
  j["pairs"] = json::array();

  std::vector<bool> taken(oracle.eigenvalues.size(), false);
  std::vector<const EnergyLevel*> orphans;
  double max_rel = 0.0;
  for (const auto& l : closed.levels) {
    std::size_t best = oracle.eigenvalues.size();
    double best_rel = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < oracle.eigenvalues.size(); ++i) {
      const double rel = std::abs(oracle.eigenvalues[i] - l.E) / std::abs(l.E);
      if (!taken[i] && rel < best_rel) best = i, best_rel = rel;
    }
    if (best == oracle.eigenvalues.size() || best_rel > verify_match_rel) {
      orphans.push_back(&l);
      continue;
    }
    taken[best] = true;
    max_rel = std::max(max_rel, best_rel);
    const ConvergenceReport cr =
        grid_convergence(c.params, c.symmetry, d, *closed.window, oracle.brackets[best], sc);
    j["pairs"].push_back({{"n_r", l.n_r},
                          {"E_closed_form", l.E},
                          {"E_oracle", oracle.eigenvalues[best]},
                          {"rel_diff", best_rel},
                          {"q_residual", l.q_residual},
                          {"convergence",
                           {{"steps", sc.steps},
                            {"E_n", cr.E_n},
                            {"E_2n", cr.E_2n},
                            {"E_4n", cr.E_4n},
                            {"order", cr.order},
                            {"rel_change", cr.rel_change}}}});
  }
  json orphan_cf = json::array(), orphan_or = json::array();
  for (const EnergyLevel* l : orphans) orphan_cf.push_back({{"n_r", l->n_r}, {"E", l->E}});
  for (std::size_t i = 0; i < taken.size(); ++i) {
    if (!taken[i]) orphan_or.push_back({{"E", oracle.eigenvalues[i]}});
  }
  j["orphans"] = {{"closed_form", orphan_cf}, {"oracle", orphan_or}};
  j["marginal"] = {{"closed_form", json::array()}, {"oracle", oracle.marginal}};
  for (const auto& m : closed.marginal) j["marginal"]["closed_form"].push_back(m.E);
  j["max_rel_diff"] = max_rel;

  if (vo.exact_centrifugal && closed.window) {
    ShootConfig ex = sc;
    ex.exact_centrifugal = true;
    const auto exact = oracle_eigenvalues(c.params, c.symmetry, d, *closed.window, ex);
    json shifts = json::array();
    for (std::size_t i = 0; i < std::min(exact.size(), oracle.eigenvalues.size()); ++i) {
      shifts.push_back({{"index", i},
                        {"E_pekeris", oracle.eigenvalues[i]},
                        {"E_exact", exact[i]},
                        {"shift", exact[i] - oracle.eigenvalues[i]}});
    }
    j["exact_centrifugal"] = {{"count_pekeris", oracle.eigenvalues.size()}, {"count_exact", exact.size()},
                              {"shifts", shifts}};
  }

  const bool ok = orphan_cf.empty() && orphan_or.empty();
  j["ok"] = ok;
  const std::filesystem::path path = std::filesystem::path(c.out_dir) / "verify.json";
  io::write_atomic(path, io::dump(j));
  if (!ok) {
    for (const EnergyLevel* l : orphans) {
      io.err << "unmatched closed-form level n_r=" << l->n_r << " E=" << io::num(l->E) << "\n";
    }
    for (const auto& o : orphan_or) io.err << "unmatched oracle eigenvalue E=" << io::num(o["E"].get<double>()) << "\n";
    return exit_mismatch;
  }
  io.out << j["pairs"].size() << " pairs matched, max rel diff " << io::num(max_rel) << " -> " << path.string()
         << "\n";
  return exit_ok;
}


inline int cmd_refute(const RunConfig& c, int n_r_max, CommandIO io) {
  using nlohmann::json;
  if (n_r_max < 0) {
    io.err << "--nr-max must be >= 0\n";
    return exit_error;
  }
  const PekerisCoeffs d = pekeris_coeffs(c.params.alpha, c.params.r_e);
  const SpectrumOptions so = spectrum_options(c);
  const TerminationResult t = termination_spectrum(c.params, c.symmetry, d, n_r_max, so);
  const SpectrumResult truth = solve_spectrum(c.params, c.symmetry, d, so);

  json j;
  j["schema_version"] = schema_version;
  j["kind"] = "refute";
  j["symmetry"] = to_string(c.symmetry);
  j["params"] = io::params_json(c.params);
  j["n_r_max"] = n_r_max;
  j["threshold"] = refutation_violation_threshold;
  j["ode_tolerance"] = ode_residual_tolerance;
  j["notes"] = t.notes;
  j["candidates"] = json::array();
  bool all_violate = !t.candidates.empty();
  for (const auto& cand : t.candidates) {
    const RefutationRecord rec = refutation_record(c.params, cand);
    all_violate = all_violate && rec.verdict;
    json nearest = nullptr;
    if (!truth.levels.empty()) {
      const auto it = std::min_element(truth.levels.begin(), truth.levels.end(), [&](const auto& a, const auto& b) {
        return std::abs(a.E - cand.E) < std::abs(b.E - cand.E);
      });
      nearest = {{"n_r", it->n_r}, {"E", it->E}, {"distance", std::abs(it->E - cand.E)}};
    }
    j["candidates"].push_back({{"n_r", rec.n_r},
                               {"E_nu", rec.E_nu},
                               {"boundary_value", rec.boundary_value},
                               {"analytic_boundary", rec.analytic_boundary},
                               {"ode_residual", rec.ode_residual},
                               {"ode_ok", rec.ode_ok},
                               {"verdict", rec.verdict ? "violates boundary" : "satisfies boundary"},
                               {"nearest_level", nearest}});
  }
  j["true_levels"] = json::array();
  double worst_true = 0.0;
  for (const auto& l : truth.levels) {
    const double b0 = tabulate(c.params, l, so.grid, so.series).boundary0;
    worst_true = std::max(worst_true, b0);
    j["true_levels"].push_back({{"n_r", l.n_r}, {"E", l.E}, {"boundary_value", b0}});
  }
  j["summary"] = {{"candidates", t.candidates.size()},
                  {"all_violate_boundary", all_violate},
                  {"max_true_level_boundary", worst_true}};

  const std::filesystem::path path = std::filesystem::path(c.out_dir) / "refute.json";
  io::write_atomic(path, io::dump(j));
  if (t.candidates.empty()) {
    io.err << "no series-termination candidates with n_r <= " << n_r_max << "\n";
    for (const auto& n : t.notes) io.err << "  " << n << "\n";
    return exit_empty;
  }
  io.out << t.candidates.size() << " candidates, "
         << (all_violate ? "all violate F(0) = 0" : "some satisfy F(0) = 0") << " -> " << path.string() << "\n";
  return exit_ok;
}


struct LevelSelector {
  std::optional<int> kappa;  // default: the configured kappa
  int n_r = 0;
};

inline int cmd_wavefunction(const RunConfig& c, const LevelSelector& sel, CommandIO io) {
  RunConfig run = c;
  if (sel.kappa) run.params.kappa = *sel.kappa;
  try {
    run.validate();
  } catch (const config_error& e) {
    io.err << "invalid selector: " << e.what() << "\n";
    return exit_error;
  }
  const SpectrumResult r = compute_spectrum(run);
  const auto it = std::find_if(r.levels.begin(), r.levels.end(), [&](const auto& l) { return l.n_r == sel.n_r; });
  if (it == r.levels.end()) {
    io.err << "no level with kappa=" << run.params.kappa << " n_r=" << sel.n_r << "; available:";
    if (r.levels.empty()) io.err << " none";
    for (const auto& l : r.levels) io.err << " (kappa=" << l.kappa << ", n_r=" << l.n_r << ")";
    io.err << "\n";
    return exit_error;
  }
  const SpectrumOptions so = spectrum_options(run);
  const WavefunctionTable t = normalize(tabulate(run.params, *it, so.grid, so.series));
  const std::string stem = "wavefunction_kappa" + std::to_string(run.params.kappa) + "_nr" + std::to_string(sel.n_r);
  const auto path = io::output_path(run, stem);
  std::string body;
  if (run.format == OutputFormat::csv) {
    std::ostringstream o;
    o << io::schema_line() << "# symmetry=" << to_string(run.symmetry) << "\n# kappa=" << it->kappa
      << "\n# n_r=" << it->n_r << "\n# E=" << io::num(it->E) << "\n# eps=" << io::num(it->coeffs.epsilon())
      << "\n# nodes=" << t.nodes << "\n# boundary0=" << io::num(t.boundary0)
      << "\n# boundary_inf=" << io::num(t.boundary_inf) << "\n# norm=" << io::num(t.norm)
      << "\n# points=" << t.r.size() << "\nr,F\n";
    for (std::size_t i = 0; i < t.r.size(); ++i) o << io::num(t.r[i]) << ',' << io::num(t.values[i]) << '\n';
    body = o.str();
  } else {
    nlohmann::json j;
    j["schema_version"] = schema_version;
    j["kind"] = "wavefunction";
    j["params"] = io::params_json(run.params);
    j["level"] = io::level_json(*it);
    j["metadata"] = {{"nodes", t.nodes},
                     {"boundary0", t.boundary0},
                     {"boundary_inf", t.boundary_inf},
                     {"norm", t.norm},
                     {"points", t.r.size()}};
    j["r"] = t.r;
    j["F"] = t.values;
    body = io::dump(j);
  }
  io::write_atomic(path, body);
  io.out << "n_r=" << it->n_r << " E=" << io::num(it->E) << " nodes=" << t.nodes << " -> " << path.string() << "\n";
  return exit_ok;
}


struct SweepPoint {
  double value = 0.0;
  std::string status;  // ok | empty | error
  std::string message;
  std::vector<EnergyLevel> levels;
};

/// RMDIRAC_THREADS caps the worker count; unset or invalid means hardware
/// concurrency.
inline unsigned sweep_threads(std::size_t work) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("RMDIRAC_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) n = static_cast<unsigned>(v);
  }
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(work, 1)));
}

inline std::vector<SweepPoint> run_sweep(const RunConfig& c, const SweepSpec& s, unsigned threads) {
  std::vector<SweepPoint> pts(static_cast<std::size_t>(s.n));
  for (int i = 0; i < s.n; ++i) {
    pts[i].value = s.n == 1 ? s.lo : s.lo + (s.hi - s.lo) * static_cast<double>(i) / (s.n - 1);
  }
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < pts.size();) {
      SweepPoint& pt = pts[i];
      RunConfig run = c;
      *sweep_target(run.params, s.field) = pt.value;
      try {
        run.validate();
        SpectrumResult r = compute_spectrum(run);
        pt.levels = std::move(r.levels);
        pt.status = pt.levels.empty() ? "empty" : "ok";
        if (!r.window) pt.message = "empty bound window";
      } catch (const std::exception& e) {
        pt.status = "error";
        pt.message = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
  return pts;
}

inline int cmd_sweep(const RunConfig& c, const SweepSpec& s, CommandIO io) {
  RunConfig probe = c;
  probe.sweep = s;
  try {
    if (s.field.empty()) throw config_error("no sweep field given", 0, "field");
    probe.validate();
  } catch (const config_error& e) {
    io.err << "sweep: " << e.what() << "\n";
    return exit_error;
  }
  const std::vector<SweepPoint> pts = run_sweep(c, s, sweep_threads(static_cast<std::size_t>(s.n)));

  // Deeper wells should not lose levels; reported, not enforced.
  bool monotone = true;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].status != "error" && pts[i - 1].status != "error" && pts[i].levels.size() < pts[i - 1].levels.size()) {
      monotone = false;
    }
  }
  const bool well_depth = s.field == "V1" && s.hi > s.lo;

  std::string body;
  if (c.format == OutputFormat::csv) {
    body = io::schema_line();
    body += std::string("field,value,status,message,") + io::spectrum_header + "\n";
    for (const auto& pt : pts) {
      std::string msg = pt.message;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      const std::string key = s.field + "," + io::num(pt.value) + "," + pt.status + "," + msg + ",";
      if (pt.levels.empty()) {
        body += key + ",,,,,,,,\n";
        continue;
      }
      for (const auto& l : pt.levels) body += key + io::level_csv(l) + "\n";
    }
  } else {
    nlohmann::json j;
    j["schema_version"] = schema_version;
    j["kind"] = "sweep";
    j["field"] = s.field;
    j["symmetry"] = to_string(c.symmetry);
    j["params"] = io::params_json(c.params);
    j["points"] = nlohmann::json::array();
    for (const auto& pt : pts) {
      nlohmann::json lv = nlohmann::json::array();
      for (const auto& l : pt.levels) lv.push_back(io::level_json(l));
      j["points"].push_back({{"value", pt.value}, {"status", pt.status}, {"message", pt.message}, {"levels", lv}});
    }
    j["level_count_nondecreasing"] = monotone;
    body = io::dump(j);
  }
  const auto path = io::output_path(c, "sweep");
  io::write_atomic(path, body);
  if (well_depth && !monotone) io.err << "flag: bound-level count decreases somewhere as V1 grows\n";
  std::size_t failed = 0;
  for (const auto& pt : pts) failed += pt.status == "error";
  if (failed) io.err << failed << " of " << pts.size() << " points failed; see the status column\n";
  io.out << pts.size() << " points -> " << path.string() << "\n";
  return exit_ok;
}

}  // namespace rmdirac
