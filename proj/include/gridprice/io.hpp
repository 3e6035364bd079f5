#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gridprice/errors.hpp"
#include "gridprice/lowpass.hpp"
#include "gridprice/sensitivity.hpp"
#include "gridprice/sim.hpp"

namespace gridprice {

namespace detail {

// 12 significant digits: enough to reconstruct every plotted quantity while
// keeping files byte-stable across runs.
inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace detail

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path.string());
  out << text;
  out.flush();
  if (!out) throw io_error("write failed: " + path.string());
}

inline std::string trace_csv(const SimTrace& tr) {
  std::ostringstream out;
  out << "k,lambda,lambda_victim,supply_mw,demand_mw,e_mw,e_obs_mw,d_hat,"
         "cusum_s,alarm,clamped\n";
  for (std::size_t k = 0; k < tr.size(); ++k) {
    out << k << ',' << detail::num(tr.lambda[k]) << ','
        << detail::num(tr.lambda_victim[k]) << ','
        << detail::num(tr.supply_mw[k]) << ',' << detail::num(tr.demand_mw[k])
        << ',' << detail::num(tr.e_mw[k]) << ','
        << detail::num(tr.e_obs_mw[k]) << ',' << detail::num(tr.d_hat[k])
        << ',' << detail::num(tr.cusum_s[k]) << ','
        << static_cast<int>(tr.alarm[k]) << ','
        << static_cast<int>(tr.clamped[k]) << '\n';
  }
  return out.str();
}

inline std::string sweep_csv(const SensitivityCurve& curve) {
  std::ostringstream out;
  out << "omega_rad_per_h,magnitude\n";
  for (std::size_t i = 0; i < curve.omega.size(); ++i)
    out << detail::num(curve.omega[i]) << ','
        << detail::num(curve.magnitude[i]) << '\n';
  return out.str();
}

inline std::string baseline_csv(const std::vector<double>& baseline_mw) {
  std::ostringstream out;
  out << "step,baseline_mw\n";
  for (std::size_t k = 0; k < baseline_mw.size(); ++k)
    out << k << ',' << detail::num(baseline_mw[k]) << '\n';
  return out.str();
}

inline std::vector<double> read_baseline_csv(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open baseline csv: " + path.string());
  std::string line;
  long lineno = 0;
  std::vector<double> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line != "step,baseline_mw")
        throw io_error(path.string() +
                       ":1: expected header 'step,baseline_mw'");
      continue;
    }
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw io_error(path.string() + ":" + std::to_string(lineno) +
                     ": expected 'step,value'");
    const std::string value = line.substr(comma + 1);
    std::size_t pos = 0;
    double mw = 0.0;
    try {
      mw = std::stod(value, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != value.size() || value.empty())
      throw io_error(path.string() + ":" + std::to_string(lineno) +
                     ": bad baseline value '" + value + "'");
    out.push_back(mw);
  }
  if (out.empty())
    throw io_error(path.string() + ": no baseline rows");
  return out;
}

// Filter taps for audit: single expanded 4th-order section.
inline std::string filter_csv(const LowPassFilter& f) {
  std::ostringstream out;
  out << "tap,b,a\n";
  for (std::size_t i = 0; i < f.b().size(); ++i)
    out << i << ',' << detail::num(f.b()[i]) << ',' << detail::num(f.a()[i])
        << '\n';
  return out.str();
}

inline std::string channel_table_csv(const std::vector<ChannelImpactRow>& rows) {
  std::ostringstream out;
  out << "eta,fraction,price_impact_mw,sensor_impact_mw\n";
  for (const auto& r : rows)
    out << detail::num(r.eta) << ',' << detail::num(r.fraction) << ','
        << detail::num(r.price_impact_mw) << ','
        << detail::num(r.sensor_impact_mw) << '\n';
  return out.str();
}

// detection_steps is measured from attack onset; -1 marks a silent run.
inline std::string detection_csv(const std::vector<double>& omegas,
                                 const std::vector<long>& detection_steps) {
  if (omegas.size() != detection_steps.size())
    throw io_error("detection csv: omega/steps size mismatch");
  std::ostringstream out;
  out << "omega_rad_per_h,detection_steps\n";
  for (std::size_t i = 0; i < omegas.size(); ++i)
    out << detail::num(omegas[i]) << ',' << detection_steps[i] << '\n';
  return out.str();
}

namespace detail {

inline void svg_panel(std::ostringstream& out, const std::vector<double>& y,
                      const std::string& label, const std::string& stroke,
                      double top, double bottom) {
  const double left = 70.0, right = 930.0;
  double lo = y.empty() ? 0.0 : y[0], hi = lo;
  for (double v : y) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi - lo < 1e-12) {  // flat series: draw a centered line
    hi += 1.0;
    lo -= 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;

  out << "<rect x=\"" << coord(left) << "\" y=\"" << coord(top)
      << "\" width=\"" << coord(right - left) << "\" height=\""
      << coord(bottom - top)
      << "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n";
  out << "<text x=\"" << coord(left) << "\" y=\"" << coord(top - 8.0)
      << "\" font-family=\"monospace\" font-size=\"14\">" << label
      << "  [min " << num(lo + pad) << ", max " << num(hi - pad)
      << "]</text>\n";
  out << "<polyline fill=\"none\" stroke=\"" << stroke
      << "\" stroke-width=\"1.5\" points=\"";
  const std::size_t n = y.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double fx =
        n > 1 ? static_cast<double>(k) / static_cast<double>(n - 1) : 0.5;
    const double fy = (y[k] - lo) / (hi - lo);
    out << (k ? " " : "") << coord(left + fx * (right - left)) << ','
        << coord(bottom - fy * (bottom - top));
  }
  out << "\"/>\n";
}

}  // namespace detail

// Two stacked panels: issued price on top, supply-demand mismatch below.
inline std::string trace_svg(const SimTrace& tr) {
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"960\" "
         "height=\"540\" viewBox=\"0 0 960 540\">\n";
  out << "<rect width=\"960\" height=\"540\" fill=\"white\"/>\n";
  detail::svg_panel(out, tr.lambda, "lambda ($/MWh)", "#1f77b4", 40.0, 250.0);
  detail::svg_panel(out, tr.e_mw, "e (MW)", "#d62728", 310.0, 520.0);
  out << "</svg>\n";
  return out.str();
}

// Writes <out_dir>/trace.csv and <out_dir>/trace.svg, creating the directory.
inline void emit_trace(const SimTrace& tr,
                       const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec)
    throw io_error("cannot create directory: " + out_dir.string() + " (" +
                   ec.message() + ")");
  write_text_file(out_dir / "trace.csv", trace_csv(tr));
  write_text_file(out_dir / "trace.svg", trace_svg(tr));
}

}  // namespace gridprice
