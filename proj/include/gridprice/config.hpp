#pragma once

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "gridprice/errors.hpp"
#include "gridprice/io.hpp"
#include "gridprice/sim.hpp"

namespace gridprice {

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t lo = 0, hi = s.size();
  while (lo < hi && std::isspace(static_cast<unsigned char>(s[lo]))) ++lo;
  while (hi > lo && std::isspace(static_cast<unsigned char>(s[hi - 1]))) --hi;
  return s.substr(lo, hi - lo);
}

inline std::string line_tag(long line) {
  return "line " + std::to_string(line) + ": ";
}

inline double to_double(const std::string& v, long line) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || v.empty())
    throw config_error(line_tag(line) + "expected a number, got '" + v + "'");
  return out;
}

inline long to_long(const std::string& v, long line) {
  std::size_t pos = 0;
  long out = 0;
  try {
    out = std::stol(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || v.empty())
    throw config_error(line_tag(line) + "expected an integer, got '" + v +
                       "'");
  return out;
}

inline bool to_bool(const std::string& v, long line) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw config_error(line_tag(line) + "expected true/false, got '" + v + "'");
}

inline std::vector<double> to_double_list(const std::string& v, long line) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) out.push_back(to_double(trim(item), line));
  if (out.empty())
    throw config_error(line_tag(line) + "expected at least one number");
  return out;
}

// Full printing precision so serialize/parse round-trips bit-exactly.
inline std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

// INI-style scenario schema: sections [market], [controller], [attack],
// [detector], [filter], [sim]; '#' starts a comment; every key optional
// except that an [attack] section is what arms the attack. Unknown sections
// and keys are rejected with the offending line number. base_dir anchors
// relative baseline_csv paths.
inline Scenario parse_config(const std::string& text,
                             const std::filesystem::path& base_dir = ".") {
  Scenario sc;
  bool has_attack = false;
  AttackSpec attack;
  attack.start = 48;  // leaves the default calibration window attack-free
  bool baseline_set = false;

  std::string section;
  std::istringstream in(text);
  std::string raw;
  long line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string s = detail::trim(raw);
    if (s.empty()) continue;

    if (s.front() == '[') {
      if (s.back() != ']')
        throw config_error(detail::line_tag(line) + "unterminated section");
      section = detail::trim(s.substr(1, s.size() - 2));
      if (section != "market" && section != "controller" &&
          section != "attack" && section != "detector" &&
          section != "filter" && section != "sim")
        throw config_error(detail::line_tag(line) + "unknown section [" +
                           section + "]");
      if (section == "attack") has_attack = true;
      continue;
    }

    const std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw config_error(detail::line_tag(line) +
                         "expected 'key = value' or '[section]'");
    if (section.empty())
      throw config_error(detail::line_tag(line) +
                         "key before any [section] header");
    const std::string key = detail::trim(s.substr(0, eq));
    const std::string value = detail::trim(s.substr(eq + 1));
    if (key.empty())
      throw config_error(detail::line_tag(line) + "empty key");
    if (value.empty())
      throw config_error(detail::line_tag(line) + "empty value for '" + key +
                         "'");

    if (section == "market") {
      MarketParams& m = sc.market;
      if (key == "p") m.p = detail::to_double(value, line);
      else if (key == "q") m.q = detail::to_double(value, line);
      else if (key == "demand_scale")
        m.demand_scale = detail::to_double(value, line);
      else if (key == "elasticity")
        m.elasticity = detail::to_double(value, line);
      else if (key == "period_hours")
        m.period_hours = detail::to_double(value, line);
      else if (key == "n_consumers")
        m.n_consumers = detail::to_long(value, line);
      else if (key == "baseline_mw") {
        if (baseline_set)
          throw config_error(detail::line_tag(line) +
                             "baseline already configured");
        m.baseline_mw = detail::to_double_list(value, line);
        baseline_set = true;
      } else if (key == "baseline_csv") {
        if (baseline_set)
          throw config_error(detail::line_tag(line) +
                             "baseline already configured");
        const std::filesystem::path p(value);
        m.baseline_mw =
            read_baseline_csv(p.is_absolute() ? p : base_dir / p);
        baseline_set = true;
      } else if (key == "baseline_synth_days") {
        if (baseline_set)
          throw config_error(detail::line_tag(line) +
                             "baseline already configured");
        sc.baseline_synth_days = detail::to_long(value, line);
        baseline_set = true;
      } else {
        throw config_error(detail::line_tag(line) + "unknown key '" + key +
                           "' in [market]");
      }
    } else if (section == "controller") {
      if (key == "eta") sc.eta = detail::to_double(value, line);
      else if (key == "phi") sc.phi = detail::to_double(value, line);
      else if (key == "gamma_hat")
        sc.gamma_hat = detail::to_double(value, line);
      else if (key == "mode") {
        if (value == "nominal") sc.controller = ControllerMode::nominal;
        else if (value == "robust") sc.controller = ControllerMode::robust;
        else if (value == "robust_with_filter")
          sc.controller = ControllerMode::robust_with_filter;
        else
          throw config_error(detail::line_tag(line) +
                             "unknown controller mode '" + value + "'");
      } else {
        throw config_error(detail::line_tag(line) + "unknown key '" + key +
                           "' in [controller]");
      }
    } else if (section == "attack") {
      if (key == "channel") {
        if (value == "price") attack.channel = AttackChannel::price;
        else if (value == "sensor") attack.channel = AttackChannel::sensor;
        else
          throw config_error(detail::line_tag(line) +
                             "unknown attack channel '" + value + "'");
      } else if (key == "shape") {
        if (value == "additive") attack.shape = AttackShape::additive;
        else if (value == "scaling") attack.shape = AttackShape::scaling;
        else if (value == "delay") attack.shape = AttackShape::delay;
        else
          throw config_error(detail::line_tag(line) +
                             "unknown attack shape '" + value + "'");
      } else if (key == "amplitude" || key == "omega" || key == "phase") {
        const double num = detail::to_double(value, line);
        SinusoidSignal sig{0.0, 0.0, 0.0};
        if (const auto* c = std::get_if<ConstantSignal>(&attack.signal))
          sig.amplitude = c->value;
        else if (const auto* w = std::get_if<SinusoidSignal>(&attack.signal))
          sig = *w;
        if (key == "amplitude") sig.amplitude = num;
        else if (key == "omega") sig.omega = num;
        else sig.phase = num;
        if (sig.omega == 0.0 && sig.phase == 0.0)
          attack.signal = ConstantSignal{sig.amplitude};
        else
          attack.signal = sig;
      } else if (key == "gamma") {
        attack.gamma = detail::to_double(value, line);
      } else if (key == "tau") {
        attack.tau = detail::to_long(value, line);
      } else if (key == "rho") {
        attack.rho = detail::to_double(value, line);
      } else if (key == "n_compromised") {
        attack.n_compromised = detail::to_long(value, line);
      } else if (key == "start") {
        attack.start = detail::to_long(value, line);
      } else if (key == "end") {
        attack.end = detail::to_long(value, line);
      } else {
        throw config_error(detail::line_tag(line) + "unknown key '" + key +
                           "' in [attack]");
      }
    } else if (section == "detector") {
      if (key == "enabled")
        sc.detector.enabled = detail::to_bool(value, line);
      else if (key == "delta") sc.detector.delta = detail::to_double(value, line);
      else if (key == "alpha") sc.detector.alpha = detail::to_double(value, line);
      else if (key == "calibration_steps")
        sc.detector.calibration_steps = detail::to_long(value, line);
      else
        throw config_error(detail::line_tag(line) + "unknown key '" + key +
                           "' in [detector]");
    } else if (section == "filter") {
      if (key == "cutoff") sc.filter.cutoff = detail::to_double(value, line);
      else
        throw config_error(detail::line_tag(line) + "unknown key '" + key +
                           "' in [filter]");
    } else {  // sim
      if (key == "plant") {
        if (value == "linearized") sc.plant = PlantMode::linearized;
        else if (value == "nonlinear") sc.plant = PlantMode::nonlinear;
        else
          throw config_error(detail::line_tag(line) + "unknown plant mode '" +
                             value + "'");
      } else if (key == "horizon") {
        sc.horizon = detail::to_long(value, line);
      } else if (key == "seed") {
        sc.seed = static_cast<unsigned>(detail::to_long(value, line));
      } else if (key == "initial_price_offset") {
        sc.initial_price_offset = detail::to_double(value, line);
      } else if (key == "iso_baseline_error") {
        sc.iso_baseline_error = detail::to_double(value, line);
      } else {
        throw config_error(detail::line_tag(line) + "unknown key '" + key +
                           "' in [sim]");
      }
    }
  }

  if (has_attack) sc.attack = attack;
  sc.validate();
  return sc;
}

// Emits every setting explicitly, so the output is self-describing and
// parse(serialize(sc)) reproduces sc byte-for-byte on re-serialization.
inline std::string serialize_config(const Scenario& sc) {
  using detail::num17;
  std::ostringstream out;
  out << "[market]\n";
  out << "p = " << num17(sc.market.p) << '\n';
  out << "q = " << num17(sc.market.q) << '\n';
  out << "demand_scale = " << num17(sc.market.demand_scale) << '\n';
  out << "elasticity = " << num17(sc.market.elasticity) << '\n';
  out << "period_hours = " << num17(sc.market.period_hours) << '\n';
  out << "n_consumers = " << sc.market.n_consumers << '\n';
  if (sc.baseline_synth_days > 0) {
    out << "baseline_synth_days = " << sc.baseline_synth_days << '\n';
  } else {
    out << "baseline_mw = ";
    for (std::size_t i = 0; i < sc.market.baseline_mw.size(); ++i)
      out << (i ? "," : "") << num17(sc.market.baseline_mw[i]);
    out << '\n';
  }

  out << "\n[controller]\n";
  out << "mode = "
      << (sc.controller == ControllerMode::nominal ? "nominal"
          : sc.controller == ControllerMode::robust ? "robust"
                                                    : "robust_with_filter")
      << '\n';
  out << "eta = " << num17(sc.eta) << '\n';
  out << "phi = " << num17(sc.phi) << '\n';
  out << "gamma_hat = " << num17(sc.gamma_hat) << '\n';

  if (sc.attack) {
    const AttackSpec& a = *sc.attack;
    out << "\n[attack]\n";
    out << "channel = "
        << (a.channel == AttackChannel::price ? "price" : "sensor") << '\n';
    out << "shape = "
        << (a.shape == AttackShape::additive ? "additive"
            : a.shape == AttackShape::scaling ? "scaling"
                                              : "delay")
        << '\n';
    if (const auto* c = std::get_if<ConstantSignal>(&a.signal)) {
      out << "amplitude = " << num17(c->value) << '\n';
    } else if (const auto* w = std::get_if<SinusoidSignal>(&a.signal)) {
      out << "amplitude = " << num17(w->amplitude) << '\n';
      out << "omega = " << num17(w->omega) << '\n';
      out << "phase = " << num17(w->phase) << '\n';
    } else {
      throw config_error("serialize: series signals have no config form");
    }
    out << "gamma = " << num17(a.gamma) << '\n';
    out << "tau = " << a.tau << '\n';
    out << "rho = " << num17(a.rho) << '\n';
    out << "n_compromised = " << a.n_compromised << '\n';
    out << "start = " << a.start << '\n';
    if (a.end != std::numeric_limits<long>::max())
      out << "end = " << a.end << '\n';
  }

  out << "\n[detector]\n";
  out << "enabled = " << (sc.detector.enabled ? "true" : "false") << '\n';
  out << "delta = " << num17(sc.detector.delta) << '\n';
  out << "alpha = " << num17(sc.detector.alpha) << '\n';
  out << "calibration_steps = " << sc.detector.calibration_steps << '\n';

  out << "\n[filter]\n";
  out << "cutoff = " << num17(sc.filter.cutoff) << '\n';

  out << "\n[sim]\n";
  out << "plant = "
      << (sc.plant == PlantMode::linearized ? "linearized" : "nonlinear")
      << '\n';
  out << "horizon = " << sc.horizon << '\n';
  out << "seed = " << sc.seed << '\n';
  out << "initial_price_offset = " << num17(sc.initial_price_offset) << '\n';
  out << "iso_baseline_error = " << num17(sc.iso_baseline_error) << '\n';
  return out.str();
}

// Reads and parses a config file; relative baseline_csv paths resolve
// against the config file's directory.
inline Scenario load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open config: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.has_parent_path()
                                     ? path.parent_path()
                                     : std::filesystem::path("."));
}

}  // namespace gridprice
