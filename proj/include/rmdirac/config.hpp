// Run configuration: flat `key = value` lines grouped under [sections].
//
//   schema_version = 1
//   [params]    M hbar_c alpha V1 V2 r_e kappa C_s C_ps
//   [run]       symmetry preset
//   [tolerances] rtol_2f1 tol_q n_grid max_terms shoot_steps
//   [output]    directory format
//   [sweep]     field lo hi n
//
// '#' and ';' start comments, so values cannot contain them. Every key is
// optional; missing keys keep the canonical defaults. Unknown sections or
// keys, duplicates and bad values are errors carrying line and field.
#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include "rmdirac/error.hpp"
#include "rmdirac/model.hpp"
#include "rmdirac/presets.hpp"

namespace rmdirac {

inline constexpr int schema_version = 1;

enum class OutputFormat { csv, json };

inline std::string_view to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

inline std::optional<OutputFormat> parse_format(std::string_view s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  return std::nullopt;
}

struct Tolerances {
  double rtol_2f1 = 1e-12;
  double tol_q = 1e-10;
  int n_grid = 512;
  int max_terms = 10000;
  int shoot_steps = 4000;

  friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

struct SweepSpec {
  std::string field;  // empty: no sweep configured
  double lo = 0.0;
  double hi = 0.0;
  int n = 1;

  friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

struct RunConfig {
  PhysicalParams params;
  Symmetry symmetry = Symmetry::spin;
  Tolerances tolerances;
  std::string out_dir = ".";
  OutputFormat format = OutputFormat::csv;
  SweepSpec sweep;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  void validate() const;
};

/// Fields of PhysicalParams that a sweep may vary.
inline double* sweep_target(PhysicalParams& p, std::string_view field) {
  if (field == "M") return &p.M;
  if (field == "hbar_c") return &p.hbar_c;
  if (field == "alpha") return &p.alpha;
  if (field == "V1") return &p.V1;
  if (field == "V2") return &p.V2;
  if (field == "r_e") return &p.r_e;
  if (field == "C_s") return &p.C_s;
  if (field == "C_ps") return &p.C_ps;
  return nullptr;
}

inline void RunConfig::validate() const {
  try {
    params.validate();
  } catch (const parameter_error& e) {
    throw config_error(e.what());
  }
  const Tolerances& t = tolerances;
  if (!(t.rtol_2f1 > 0)) throw config_error("field 'rtol_2f1' must be positive", 0, "rtol_2f1");
  if (!(t.tol_q > 0)) throw config_error("field 'tol_q' must be positive", 0, "tol_q");
  if (t.n_grid < 16) throw config_error("field 'n_grid' must be >= 16", 0, "n_grid");
  if (t.max_terms < 1) throw config_error("field 'max_terms' must be positive", 0, "max_terms");
  if (t.shoot_steps < 2000) throw config_error("field 'shoot_steps' must be >= 2000", 0, "shoot_steps");
  if (out_dir.empty()) throw config_error("field 'directory' must not be empty", 0, "directory");
  if (!sweep.field.empty()) {
    PhysicalParams probe;
    if (!sweep_target(probe, sweep.field)) {
      throw config_error("field 'field': '" + sweep.field + "' is not a numeric parameter", 0, "field");
    }
    if (sweep.n < 1) throw config_error("field 'n' must be >= 1", 0, "n");
    if (!std::isfinite(sweep.lo) || !std::isfinite(sweep.hi)) throw config_error("sweep bounds must be finite", 0, "lo");
  }
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_real(std::string_view v, int line, const std::string& key) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw config_error("field '" + key + "': '" + std::string(v) + "' is not a finite number", line, key);
  }
  return out;
}

inline int parse_int(std::string_view v, int line, const std::string& key) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw config_error("field '" + key + "': '" + std::string(v) + "' is not an integer", line, key);
  }
  return out;
}

inline std::string fmt_real(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);  // shortest round-trip form
  return std::string(buf, r.ptr);
}

}  // namespace detail

inline RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::string section;
  std::map<std::string, int> seen;  // "section.key" -> line
  int line_no = 0;
  std::size_t pos = 0;
  bool params_set = false;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto c = raw.find_first_of("#;"); c != std::string_view::npos) raw = raw.substr(0, c);
    const std::string_view line = detail::trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw config_error("unterminated section header", line_no);
      section = std::string(detail::trim(line.substr(1, line.size() - 2)));
      if (section != "params" && section != "run" && section != "tolerances" && section != "output" &&
          section != "sweep") {
        throw config_error("unknown section [" + section + "]", line_no, section);
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw config_error("expected 'key = value'", line_no);
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view val = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw config_error("missing key before '='", line_no);
    if (val.empty()) throw config_error("field '" + key + "' has no value", line_no, key);
    const std::string qualified = section + "." + key;
    if (auto [it, fresh] = seen.emplace(qualified, line_no); !fresh) {
      throw config_error("field '" + key + "' repeats line " + std::to_string(it->second), line_no, key);
    }
    auto real = [&] { return detail::parse_real(val, line_no, key); };
    auto integer = [&] { return detail::parse_int(val, line_no, key); };
    auto unknown = [&] { throw config_error("unknown field '" + key + "' in [" + section + "]", line_no, key); };

    if (section.empty()) {
      if (key != "schema_version") unknown();
      if (const int v = integer(); v != schema_version) {
        throw config_error("unsupported schema_version " + std::to_string(v) + " (expected " +
                               std::to_string(schema_version) + ")",
                           line_no, key);
      }
    } else if (section == "params") {
      PhysicalParams& p = cfg.params;
      params_set = true;
      if (key == "kappa") {
        p.kappa = integer();
      } else if (double* f = sweep_target(p, key)) {
        *f = real();
      } else {
        unknown();
      }
    } else if (section == "run") {
      if (key == "symmetry") {
        const auto s = parse_symmetry(val);
        if (!s) throw config_error("field 'symmetry' must be spin or pseudospin", line_no, key);
        cfg.symmetry = *s;
      } else if (key == "preset") {
        // A preset replaces params and symmetry; it must precede [params].
        if (params_set) {
          throw config_error("field 'preset' must come before [params]", line_no, key);
        }
        const auto pr = find_preset(val);
        if (!pr) throw config_error("field 'preset': unknown preset '" + std::string(val) + "'", line_no, key);
        cfg.params = pr->params;
        cfg.symmetry = pr->symmetry;
      } else {
        unknown();
      }
    } else if (section == "tolerances") {
      Tolerances& t = cfg.tolerances;
      if (key == "rtol_2f1") t.rtol_2f1 = real();
      else if (key == "tol_q") t.tol_q = real();
      else if (key == "n_grid") t.n_grid = integer();
      else if (key == "max_terms") t.max_terms = integer();
      else if (key == "shoot_steps") t.shoot_steps = integer();
      else unknown();
    } else if (section == "output") {
      if (key == "directory") {
        cfg.out_dir = std::string(val);
      } else if (key == "format") {
        const auto f = parse_format(val);
        if (!f) throw config_error("field 'format' must be csv or json", line_no, key);
        cfg.format = *f;
      } else {
        unknown();
      }
    } else if (section == "sweep") {
      if (key == "field") cfg.sweep.field = std::string(val);
      else if (key == "lo") cfg.sweep.lo = real();
      else if (key == "hi") cfg.sweep.hi = real();
      else if (key == "n") cfg.sweep.n = integer();
      else unknown();
    }
  }
  try {
    cfg.validate();
  } catch (const config_error& e) {
    // Point at the line that set the offending field, when there is one.
    std::string field = e.field();
    const std::string msg = e.what();
    if (field.empty()) {
      const auto a = msg.find('\'');
      const auto b = a == std::string::npos ? a : msg.find('\'', a + 1);
      if (b != std::string::npos) field = msg.substr(a + 1, b - a - 1);
    }
    for (const auto& [k, line] : seen) {
      if (!field.empty() && k.size() > field.size() && k.compare(k.size() - field.size(), field.size(), field) == 0 &&
          k[k.size() - field.size() - 1] == '.') {
        throw config_error(msg, line, field);
      }
    }
    throw config_error(msg, 0, field);
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const config_error& e) {
    throw config_error(path + ": " + e.what(), 0, e.field());
  }
}

/// Text that parse_config maps back to an identical RunConfig.
inline std::string dump_config(const RunConfig& c) {
  using detail::fmt_real;
  const PhysicalParams& p = c.params;
  std::ostringstream o;
  o << "schema_version = " << schema_version << "\n\n";
  o << "[params]\n"
    << "M = " << fmt_real(p.M) << "\n"
    << "hbar_c = " << fmt_real(p.hbar_c) << "\n"
    << "alpha = " << fmt_real(p.alpha) << "\n"
    << "V1 = " << fmt_real(p.V1) << "\n"
    << "V2 = " << fmt_real(p.V2) << "\n"
    << "r_e = " << fmt_real(p.r_e) << "\n"
    << "kappa = " << p.kappa << "\n"
    << "C_s = " << fmt_real(p.C_s) << "\n"
    << "C_ps = " << fmt_real(p.C_ps) << "\n\n";
  o << "[run]\nsymmetry = " << to_string(c.symmetry) << "\n\n";
  const Tolerances& t = c.tolerances;
  o << "[tolerances]\n"
    << "rtol_2f1 = " << fmt_real(t.rtol_2f1) << "\n"
    << "tol_q = " << fmt_real(t.tol_q) << "\n"
    << "n_grid = " << t.n_grid << "\n"
    << "max_terms = " << t.max_terms << "\n"
    << "shoot_steps = " << t.shoot_steps << "\n\n";
  o << "[output]\ndirectory = " << c.out_dir << "\nformat = " << to_string(c.format) << "\n";
  if (!c.sweep.field.empty()) {
    o << "\n[sweep]\nfield = " << c.sweep.field << "\nlo = " << fmt_real(c.sweep.lo) << "\nhi = "
      << fmt_real(c.sweep.hi) << "\nn = " << c.sweep.n << "\n";
  }
  return o.str();
}

}  // namespace rmdirac
