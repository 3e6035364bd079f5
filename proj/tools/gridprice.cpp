// gridprice: closed-loop real-time pricing simulator and frequency-domain
// analysis toolkit. Subcommands: simulate, sweep-sensitivity, detect-sweep,
// compare-channels, gen-baseline.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "gridprice/config.hpp"
#include "gridprice/errors.hpp"
#include "gridprice/io.hpp"
#include "gridprice/parallel.hpp"
#include "gridprice/recipes.hpp"
#include "gridprice/sensitivity.hpp"
#include "gridprice/sim.hpp"

namespace {

using namespace gridprice;

constexpr double kPi = std::numbers::pi;

// Loop parameters at the scenario's operating point, for sensitivity sweeps.
LoopParams loop_params_of(const Scenario& sc) {
  const MarketParams m = materialized_market(sc);
  const double lambda0 = clearing_price(m, baseline_at(m, 0));
  const LinearizedPlant lp = linearize(m, lambda0);
  LoopParams out;
  out.eta = sc.eta;
  out.phi = sc.phi;
  out.period_hours = m.period_hours;
  out.w_dot = lp.w_dot;
  out.s_dot = lp.s_dot;
  out.rho = sc.attack ? sc.attack->rho : 1.0;
  out.n_compromised = sc.attack ? sc.attack->n_compromised : 0;
  return out;
}

void emit_labeled_trace(const SimTrace& tr, const std::filesystem::path& dir,
                        const std::string& label) {
  write_text_file(dir / (label + ".csv"), trace_csv(tr));
  write_text_file(dir / (label + ".svg"), trace_svg(tr));
}

std::filesystem::path make_out_dir(const std::string& out) {
  const std::filesystem::path dir(out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw io_error("cannot create directory: " + dir.string() + " (" +
                   ec.message() + ")");
  return dir;
}

void print_run_summary(const std::string& label, const SimTrace& tr) {
  double worst_e = 0.0;
  for (double v : tr.e_mw) worst_e = std::max(worst_e, std::abs(v));
  std::printf("%-16s steps=%zu  max|e|=%.4g MW  clamps=%ld  alarm_step=%ld\n",
              label.c_str(), tr.size(), worst_e, tr.clamp_count,
              tr.alarm_step);
  for (const auto& w : tr.warnings)
    std::printf("%-16s warning: %s\n", label.c_str(), w.c_str());
}

int cmd_simulate(const std::string& config, const std::string& recipe,
                 const std::string& out, long seed_override, int threads) {
  if (config.empty() == recipe.empty())
    throw config_error("simulate: pass exactly one of --config or --recipe");
  const std::filesystem::path dir = make_out_dir(out);

  if (!config.empty()) {
    Scenario sc = load_config(config);
    if (seed_override >= 0) sc.seed = static_cast<unsigned>(seed_override);
    const SimTrace tr = run(sc);
    emit_trace(tr, dir);
    print_run_summary("trace", tr);
    std::printf("wrote %s and %s\n", (dir / "trace.csv").c_str(),
                (dir / "trace.svg").c_str());
    return 0;
  }

  Recipe r = repro_recipe(recipe);
  if (seed_override >= 0)
    for (auto& rr : r.runs) rr.scenario.seed = static_cast<unsigned>(seed_override);
  std::vector<SimTrace> traces(r.runs.size());
  parallel_for(
      r.runs.size(), [&](std::size_t i) { traces[i] = run(r.runs[i].scenario); },
      threads);

  std::ostringstream summary;
  summary << "label,alarm_step,detection_steps,clamp_count,max_abs_e_mw\n";
  for (std::size_t i = 0; i < r.runs.size(); ++i) {
    const SimTrace& tr = traces[i];
    emit_labeled_trace(tr, dir, r.runs[i].label);
    print_run_summary(r.runs[i].label, tr);
    double worst_e = 0.0;
    for (double v : tr.e_mw) worst_e = std::max(worst_e, std::abs(v));
    const long start =
        r.runs[i].scenario.attack ? r.runs[i].scenario.attack->start : 0;
    const long det = tr.alarm_step >= 0 ? tr.alarm_step - start : -1;
    summary << r.runs[i].label << ',' << tr.alarm_step << ',' << det << ','
            << tr.clamp_count << ',' << detail::num(worst_e) << '\n';
  }
  write_text_file(dir / "summary.csv", summary.str());
  std::printf("recipe %s: wrote %zu traces and %s\n", r.name.c_str(),
              r.runs.size(), (dir / "summary.csv").c_str());
  return 0;
}

int cmd_sweep(const std::string& config, const std::string& curve, long grid,
              const std::string& out, int threads) {
  if (grid < 2) throw config_error("sweep: --grid must be >= 2");
  const Scenario sc = load_config(config);
  const LoopParams lp = loop_params_of(sc);
  lp.check();

  SensitivityFn fn;
  if (curve == "error_price") fn = sens_error_price;
  else if (curve == "price_price") fn = sens_price_price;
  else if (curve == "error_sensor") fn = sens_error_sensor;
  else if (curve == "price_sensor") fn = sens_price_sensor;
  else if (curve == "error_price_robust")
    fn = [](const LoopParams& p, double w) {
      return sens_error_price_robust(p, -p.rho * p.w_dot, w);
    };
  else
    throw config_error(
        "unknown curve '" + curve +
        "'; expected error_price, price_price, error_sensor, price_sensor, "
        "or error_price_robust");

  SensitivityCurve c;
  c.label = curve;
  const auto n = static_cast<std::size_t>(grid);
  c.omega.resize(n);
  c.magnitude.resize(n);
  const double w_max = kPi / lp.period_hours;
  parallel_for(
      n,
      [&](std::size_t i) {
        c.omega[i] =
            w_max * static_cast<double>(i) / static_cast<double>(n - 1);
        c.magnitude[i] = fn(lp, c.omega[i]);
      },
      threads);

  write_text_file(out, sweep_csv(c));
  std::printf("wrote %s (%ld points, curve %s)\n", out.c_str(), grid,
              curve.c_str());
  return 0;
}

int cmd_detect_sweep(const std::string& config, std::vector<double> omegas,
                     const std::string& out, int threads) {
  Scenario base = load_config(config);
  base.detector.enabled = true;
  if (!base.attack) {
    base.attack = AttackSpec{};
    base.attack->channel = AttackChannel::price;
    base.attack->signal = SinusoidSignal{0.1, kPi, 0.0};
    base.attack->rho = 0.5;
    base.attack->start = 48;
  }
  if (omegas.empty())
    omegas = {kPi / 8.0, kPi / 4.0, kPi / 2.0, kPi, 2.0 * kPi};

  const double T = base.market.period_hours;
  std::vector<long> times(omegas.size(), -1);
  parallel_for(
      omegas.size(),
      [&](std::size_t i) {
        if (!(omegas[i] > 0.0))
          throw config_error("detect-sweep: omega must be > 0");
        Scenario sc = base;
        double amplitude = 0.1, phase = 0.0;
        if (const auto* w = std::get_if<SinusoidSignal>(&sc.attack->signal)) {
          amplitude = w->amplitude;
          phase = w->phase;
        } else if (const auto* cst =
                       std::get_if<ConstantSignal>(&sc.attack->signal)) {
          amplitude = cst->value;
        }
        // a sine that samples to zero (omega*T = multiple of pi) is shifted
        // to cosine phase so the attack actually excites the loop
        if (phase == 0.0 &&
            std::abs(std::remainder(omegas[i] * T, kPi)) < 1e-9)
          phase = kPi / 2.0;
        sc.attack->signal = SinusoidSignal{amplitude, omegas[i], phase};
        const SimTrace tr = run(sc);
        times[i] =
            tr.alarm_step >= 0 ? tr.alarm_step - sc.attack->start : -1;
      },
      threads);

  write_text_file(out, detection_csv(omegas, times));
  for (std::size_t i = 0; i < omegas.size(); ++i)
    std::printf("omega=%.6g rad/h -> detection_steps=%ld\n", omegas[i],
                times[i]);
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

int cmd_compare(const std::string& config, std::vector<double> fractions,
                std::vector<double> etas, const std::string& out) {
  const Scenario base = load_config(config);
  if (fractions.empty()) fractions = {0.25, 0.5, 1.0};
  if (etas.empty()) etas = {0.1, 0.5, 0.8};
  const auto rows = compare_price_vs_sensor(base, fractions, etas);
  write_text_file(out, channel_table_csv(rows));
  std::printf("wrote %s (%zu rows)\n", out.c_str(), rows.size());
  return 0;
}

int cmd_gen_baseline(long seed, long days, double period,
                     const std::string& out) {
  const auto b = synth_baseline(static_cast<unsigned>(seed), days, period);
  write_text_file(out, baseline_csv(b));
  std::printf("wrote %s (%zu steps, %ld day(s))\n", out.c_str(), b.size(),
              days);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "gridprice: discrete-time real-time pricing simulator with "
      "frequency-domain attack analysis"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads,
                 "worker threads (default: GRIDPRICE_THREADS env, then "
                 "hardware concurrency)");

  auto* sim = app.add_subcommand(
      "simulate", "run one scenario or a named recipe bundle");
  std::string sim_config, sim_recipe, sim_out;
  long sim_seed = -1;
  sim->add_option("--config", sim_config, "scenario config file");
  sim->add_option("--recipe", sim_recipe,
                  "recipe name (see README for the list)");
  sim->add_option("--out", sim_out, "output directory")->required();
  sim->add_option("--seed", sim_seed, "override the profile-synthesis seed");

  auto* sw = app.add_subcommand("sweep-sensitivity",
                                "sample a sensitivity magnitude curve");
  std::string sw_config, sw_curve = "error_price", sw_out;
  long sw_grid = 1024;
  sw->add_option("--config", sw_config, "scenario config file")->required();
  sw->add_option("--curve", sw_curve,
                 "error_price|price_price|error_sensor|price_sensor|"
                 "error_price_robust");
  sw->add_option("--grid", sw_grid, "grid points over [0, pi/T]");
  sw->add_option("--out", sw_out, "output CSV file")->required();

  auto* ds = app.add_subcommand("detect-sweep",
                                "CUSUM detection latency per frequency");
  std::string ds_config, ds_out;
  std::vector<double> ds_omega;
  ds->add_option("--config", ds_config, "scenario config file")->required();
  ds->add_option("--omega", ds_omega,
                 "attack frequencies in rad/h (default: pi/8..2pi grid)")
      ->delimiter(',');
  ds->add_option("--out", ds_out, "output CSV file")->required();

  auto* cc = app.add_subcommand("compare-channels",
                                "price-channel vs sensor-channel impact table");
  std::string cc_config, cc_out;
  std::vector<double> cc_fracs, cc_etas;
  cc->add_option("--config", cc_config, "scenario config file")->required();
  cc->add_option("--fractions", cc_fracs,
                 "compromised fractions (default 0.25 0.5 1.0)")
      ->delimiter(',');
  cc->add_option("--etas", cc_etas, "controller gains (default 0.1 0.5 0.8)")
      ->delimiter(',');
  cc->add_option("--out", cc_out, "output CSV file")->required();

  auto* gb = app.add_subcommand("gen-baseline",
                                "write a synthetic diurnal baseline CSV");
  long gb_seed = 1, gb_days = 7;
  double gb_period = 0.5;
  std::string gb_out;
  gb->add_option("--seed", gb_seed, "profile seed");
  gb->add_option("--days", gb_days, "days to generate");
  gb->add_option("--period", gb_period, "hours per step");
  gb->add_option("--out", gb_out, "output CSV file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*sim)
      return cmd_simulate(sim_config, sim_recipe, sim_out, sim_seed, threads);
    if (*sw) return cmd_sweep(sw_config, sw_curve, sw_grid, sw_out, threads);
    if (*ds) return cmd_detect_sweep(ds_config, ds_omega, ds_out, threads);
    if (*cc) return cmd_compare(cc_config, cc_fracs, cc_etas, cc_out);
    if (*gb) return cmd_gen_baseline(gb_seed, gb_days, gb_period, gb_out);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const model_error& e) {
    std::cerr << "model error: " << e.what() << '\n';
    return 3;
  } catch (const io_error& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
