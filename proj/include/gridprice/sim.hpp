#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "gridprice/attacks.hpp"
#include "gridprice/control.hpp"
#include "gridprice/detection.hpp"
#include "gridprice/errors.hpp"
#include "gridprice/lowpass.hpp"
#include "gridprice/market.hpp"
#include "gridprice/sensitivity.hpp"

namespace gridprice {

enum class ControllerMode { nominal, robust, robust_with_filter };
enum class PlantMode { linearized, nonlinear };

struct DetectorSettings {
  bool enabled = true;
  double delta = 10.0;
  long calibration_steps = 48;
  double alpha = -1.0;  // negative: calibrate from the attack-free prefix
};

struct FilterSettings {
  double cutoff = 0.0;  // <= 0: track the estimator cutoff for the chosen phi
};

struct Scenario {
  MarketParams market;
  double eta = 0.5;
  double phi = 0.5;
  double gamma_hat = 0.0;  // 0: -w_dot(lambda0) for price, -1 for sensor
  ControllerMode controller = ControllerMode::nominal;
  PlantMode plant = PlantMode::linearized;
  std::optional<AttackSpec> attack;
  long horizon = 336;  // one week of half-hour slots
  unsigned seed = 1;
  long baseline_synth_days = 0;  // > 0: synthesize the profile from seed
  double initial_price_offset = 0.0;
  double iso_baseline_error = 0.0;  // fraction of the schedule the ISO misses
  DetectorSettings detector;
  FilterSettings filter;

  void validate() const {
    market.validate();
    if (attack) attack->validate();
    if (!(eta > 0.0 && eta < 1.0))
      throw config_error("scenario: eta must lie in (0, 1)");
    if (!(phi > -1.0 && phi < 1.0))
      throw config_error("scenario: phi must lie in (-1, 1)");
    if (horizon < 1) throw config_error("scenario: horizon must be >= 1");
    if (baseline_synth_days < 0)
      throw config_error("scenario: baseline_synth_days must be >= 0");
    if (!std::isfinite(initial_price_offset))
      throw config_error("scenario: initial_price_offset must be finite");
    if (!(iso_baseline_error >= 0.0 && iso_baseline_error <= 1.0))
      throw config_error("scenario: iso_baseline_error must lie in [0, 1]");
    if (!(detector.delta > 0.0))
      throw config_error("scenario: detector delta must be > 0");
    if (detector.enabled && detector.alpha < 0.0 &&
        detector.calibration_steps < 10)
      throw config_error(
          "scenario: alpha calibration needs >= 10 attack-free steps");
    if (controller == ControllerMode::robust_with_filter &&
        filter.cutoff > 0.0 &&
        filter.cutoff >= std::numbers::pi / market.period_hours)
      throw config_error("scenario: filter cutoff must lie below pi/T");
  }
};

struct SimTrace {
  std::vector<double> lambda;         // issued price
  std::vector<double> lambda_victim;  // price delivered to compromised meters
  std::vector<double> supply_mw;
  std::vector<double> demand_mw;  // true aggregate demand
  std::vector<double> e_mw;       // physical mismatch, supply - demand
  std::vector<double> e_obs_mw;   // what the ISO receives for this step
  std::vector<double> d_hat;
  std::vector<double> cusum_s;
  std::vector<std::uint8_t> alarm;
  std::vector<std::uint8_t> clamped;

  double lambda0 = 0.0;
  double g_p = 0.0;
  double w_dot = 0.0;
  double gamma_hat = 0.0;
  double alpha_used = 0.0;
  long clamp_count = 0;
  long alarm_step = -1;  // -1: no alarm
  std::vector<std::string> warnings;

  std::size_t size() const { return lambda.size(); }
};

// Deterministic diurnal double-peak household profile in kW. Two cosine
// harmonics keep each sampled day's mean exactly on the 3.7 kW midpoint, and
// the amplitude split keeps every sample inside [2.8, 4.6].
inline std::vector<double> synth_household_shape(unsigned seed, long days,
                                                 double period_hours) {
  if (days < 1) throw config_error("synth_baseline: days must be >= 1");
  if (!(period_hours > 0.0) ||
      std::abs(24.0 / period_hours - std::round(24.0 / period_hours)) > 1e-9)
    throw config_error("synth_baseline: 24 h must be a whole number of steps");
  const long per_day = static_cast<long>(std::round(24.0 / period_hours));

  // seed shifts the peak hours, not the envelope
  const double phase1 = 2.0 * std::numbers::pi *
                        ((seed * 2654435761u % 1000u) / 1000.0);
  const double phase2 = 2.0 * std::numbers::pi *
                        ((seed * 40503u % 1000u) / 1000.0);
  std::vector<double> shape;
  shape.reserve(static_cast<std::size_t>(days * per_day));
  for (long day = 0; day < days; ++day) {
    for (long i = 0; i < per_day; ++i) {
      const double t = 2.0 * std::numbers::pi * static_cast<double>(i) /
                       static_cast<double>(per_day);
      shape.push_back(3.7 + 0.55 * std::cos(t - phase1) +
                      0.35 * std::cos(2.0 * t - phase2));
    }
  }
  return shape;
}

// Aggregate baseline in MW, rescaled so the mean is exactly 400.
inline std::vector<double> synth_baseline(unsigned seed, long days,
                                          double period_hours) {
  std::vector<double> b = synth_household_shape(seed, days, period_hours);
  double mean = 0.0;
  for (double v : b) mean += v;
  mean /= static_cast<double>(b.size());
  const double scale = 400.0 / mean;
  for (double& v : b) v *= scale;
  return b;
}

// Market with the baseline profile in force: either the configured schedule
// or, when baseline_synth_days > 0, the seed-derived synthetic profile.
inline MarketParams materialized_market(const Scenario& sc) {
  MarketParams m = sc.market;
  if (sc.baseline_synth_days > 0)
    m.baseline_mw =
        synth_baseline(sc.seed, sc.baseline_synth_days, m.period_hours);
  return m;
}

// Closed-loop run over the scenario horizon. Step order: price issuance from
// the delayed observation, attack transformation, plant response, measurement
// reporting, then estimator/detector bookkeeping.
inline SimTrace run(const Scenario& sc) {
  sc.validate();
  const MarketParams m = materialized_market(sc);
  const double period = m.period_hours;
  const bool price_attack =
      sc.attack && sc.attack->channel == AttackChannel::price;
  const bool sensor_attack =
      sc.attack && sc.attack->channel == AttackChannel::sensor;
  const double rho = price_attack ? sc.attack->rho : 0.0;

  const double b0 = baseline_at(m, 0);
  const double lambda0 = clearing_price(m, b0);
  const LinearizedPlant lp = linearize(m, lambda0);
  const double s_at_lambda0 = supply(m, lambda0);
  const double gamma_hat =
      sc.gamma_hat != 0.0 ? sc.gamma_hat : (sensor_attack ? -1.0 : -lp.w_dot);

  PriceController cs(sc.eta, lp.g_p, lambda0);
  cs.lambda_prev = std::max(lambda0 + sc.initial_price_offset, kLambdaMin);
  DisturbanceObserver delayed(sc.phi, gamma_hat);
  ResidualObserver residual(sc.phi, gamma_hat);

  const bool filtered = sc.controller == ControllerMode::robust_with_filter;
  const double cutoff =
      sc.filter.cutoff > 0.0 ? sc.filter.cutoff
                             : cutoff_frequency(sc.phi, period);
  std::optional<LowPassFilter> f_victim;
  if (filtered) f_victim.emplace(cutoff, period);

  const bool auto_alpha = sc.detector.alpha < 0.0;
  std::optional<CusumDetector> detector;
  long detector_offset = 0;  // global step of the detector's first sample
  if (sc.detector.enabled && !auto_alpha)
    detector.emplace(sc.detector.alpha, sc.detector.delta);
  std::vector<double> calibration;

  SimTrace tr;
  tr.lambda0 = lambda0;
  tr.g_p = lp.g_p;
  tr.w_dot = lp.w_dot;
  tr.gamma_hat = gamma_hat;
  tr.alpha_used = auto_alpha ? 0.0 : sc.detector.alpha;
  const auto n = static_cast<std::size_t>(sc.horizon);
  for (auto* v : {&tr.lambda, &tr.lambda_victim, &tr.supply_mw, &tr.demand_mw,
                  &tr.e_mw, &tr.e_obs_mw, &tr.d_hat, &tr.cusum_s})
    v->reserve(n);
  tr.alarm.reserve(n);
  tr.clamped.reserve(n);

  std::vector<double> lambda_hist;
  lambda_hist.reserve(n);
  std::vector<double> e_obs_hist;
  e_obs_hist.reserve(n);
  bool warned_linearity = false;

  for (long k = 0; k < sc.horizon; ++k) {
    try {
      const double e_obs_prev = k >= 1 ? e_obs_hist[k - 1] : 0.0;

      // (1) price issuance; lambda_prev always tracks the nominal recursion
      const double raw_nominal =
          cs.lambda_prev - (2.0 * sc.eta / lp.g_p) * e_obs_prev;
      const double lambda_nom = cs.step(e_obs_prev);
      double raw_issued = raw_nominal;
      double lambda_k = lambda_nom;
      if (sc.controller != ControllerMode::nominal) {
        raw_issued = lambda_nom - gamma_hat * residual.d_hat() / lp.g_p;
        lambda_k = std::max(raw_issued, kLambdaMin);
      }
      const bool clamp = std::min(raw_nominal, raw_issued) < kLambdaMin;
      lambda_hist.push_back(lambda_k);

      // (2) attack on the victims' price channel
      const double lambda_victim_raw =
          price_attack ? attacked_price(*sc.attack, k, lambda_hist, period)
                       : lambda_k;
      if (!warned_linearity &&
          std::abs(lambda_victim_raw - lambda_k) > 0.2 * lambda0) {
        tr.warnings.push_back(
            "step " + std::to_string(k) +
            ": price deviation above 0.2*lambda0; linearized results degrade");
        warned_linearity = true;
      }

      // (3) meter-side filtering and plant response. The meter filter shapes
      // only the injected deviation: the legitimate price trajectory lives
      // far below any usable cutoff, where the filter is transparent, while
      // running the full stream through it would place the filter poles
      // inside the price loop. Ringing can undershoot the floor, so the
      // delivered victim price is clamped again.
      const double p_victim =
          filtered
              ? std::max(lambda_k + f_victim->step(lambda_victim_raw - lambda_k),
                         kLambdaMin)
              : lambda_victim_raw;
      const double b_k = baseline_at(m, k);
      double supply_k, demand_k, e_k;
      if (sc.plant == PlantMode::linearized) {
        supply_k = s_at_lambda0 + lp.s_dot * (lambda_k - lambda0);
        e_k = (b0 - b_k) + lp.g_p * (lambda_k - lambda0) -
              rho * lp.w_dot * (p_victim - lambda_k);
        demand_k = supply_k - e_k;
        // re-derive e from the recorded pair so e_k == supply - demand
        // holds bit-for-bit in the trace
        e_k = supply_k - demand_k;
      } else {
        supply_k = supply(m, lambda_k);
        demand_k = b_k + (1.0 - rho) * responsive_demand(m, lambda_k) +
                   rho * responsive_demand(m, p_victim);
        e_k = supply_k - demand_k;
      }

      // (4) measurement report back to the ISO
      const double e_obs_k =
          e_k + (sensor_attack ? sensor_report_shift(*sc.attack, k, period)
                               : 0.0);
      e_obs_hist.push_back(e_obs_k);

      // (5) estimation and detection; the ISO nets out the baseline schedule
      // it knows (imperfectly, when iso_baseline_error > 0)
      const double known_baseline_shift =
          (b0 - b_k) * (1.0 - sc.iso_baseline_error);
      double d_hat_k;
      if (sc.controller == ControllerMode::nominal) {
        const double x_meas =
            k >= 2 ? e_obs_hist[k - 2] -
                         (b0 - baseline_at(m, k - 2)) *
                             (1.0 - sc.iso_baseline_error)
                   : 0.0;
        d_hat_k = delayed.step(x_meas, lambda_k - lambda0, lp.g_p);
      } else {
        d_hat_k = residual.step(e_obs_k - known_baseline_shift,
                                lambda_nom - lambda0, lp.g_p);
      }
      const double scaled = gamma_hat * d_hat_k;

      bool alarm_k = false;
      double s_k = 0.0;
      if (sc.detector.enabled) {
        if (auto_alpha && !detector) {
          calibration.push_back(scaled);
          if (static_cast<long>(calibration.size()) >=
              sc.detector.calibration_steps) {
            tr.alpha_used = calibrate_alpha(calibration);
            detector.emplace(tr.alpha_used, sc.detector.delta);
            // seed with this step's sample so the next step's increment
            // spans the calibration boundary without a gap
            detector->update(scaled);
            detector_offset = k;
          }
        } else if (detector) {
          alarm_k = detector->update(scaled);
          s_k = detector->s();
          if (alarm_k && tr.alarm_step < 0)
            tr.alarm_step = detector_offset + detector->alarm_step();
        }
      }

      tr.lambda.push_back(lambda_k);
      tr.lambda_victim.push_back(p_victim);
      tr.supply_mw.push_back(supply_k);
      tr.demand_mw.push_back(demand_k);
      tr.e_mw.push_back(e_k);
      tr.e_obs_mw.push_back(e_obs_k);
      tr.d_hat.push_back(d_hat_k);
      tr.cusum_s.push_back(s_k);
      tr.alarm.push_back(alarm_k ? 1 : 0);
      tr.clamped.push_back(clamp ? 1 : 0);
      if (clamp) ++tr.clamp_count;
    } catch (const model_error& err) {
      throw model_error("step " + std::to_string(k) + ": " + err.what());
    }
  }
  return tr;
}

struct ChannelImpactRow {
  double eta;
  double fraction;
  double price_impact_mw;   // attack-induced shift of |e_obs|, price channel
  double sensor_impact_mw;  // attack-induced shift of |e_obs|, sensor channel
};

namespace detail {
inline double max_abs_e_obs_shift(const SimTrace& tr, const SimTrace& clean) {
  double worst = 0.0;
  for (std::size_t k = 0; k < tr.e_obs_mw.size(); ++k)
    worst = std::max(worst, std::abs(tr.e_obs_mw[k] - clean.e_obs_mw[k]));
  return worst;
}
}  // namespace detail

// Impact table for matched waveforms on the two channels: price offsets of
// 0.25 $/MWh against per-meter report offsets of 0.2 kW, both at a quarter
// of the sampling rate. Impact is scored on the observed mismatch, the
// quantity the ISO actually balances against, relative to the attack-free
// run so that a varying baseline does not drown out the attack; that keeps
// zero-compromise rows exactly zero and the table linear in the fraction.
inline std::vector<ChannelImpactRow> compare_price_vs_sensor(
    const Scenario& base, const std::vector<double>& fractions,
    const std::vector<double>& etas) {
  const double omega = std::numbers::pi / (2.0 * base.market.period_hours);
  std::vector<ChannelImpactRow> rows;
  for (double eta : etas) {
    Scenario clean_sc = base;
    clean_sc.eta = eta;
    clean_sc.attack.reset();
    const SimTrace clean = run(clean_sc);
    for (double f : fractions) {
      if (!(f >= 0.0 && f <= 1.0))
        throw config_error("compare: fraction must lie in [0, 1]");
      Scenario price = base;
      price.eta = eta;
      price.attack = AttackSpec{};
      price.attack->channel = AttackChannel::price;
      price.attack->signal = SinusoidSignal{0.25, omega, 0.0};
      price.attack->rho = f;
      price.attack->start = base.attack ? base.attack->start : 48;

      Scenario sensor = price;
      sensor.attack->channel = AttackChannel::sensor;
      sensor.attack->signal = SinusoidSignal{0.2, omega, 0.0};
      sensor.attack->rho = 1.0;
      sensor.attack->n_compromised = static_cast<long>(
          std::llround(f * static_cast<double>(base.market.n_consumers)));
      sensor.gamma_hat = base.gamma_hat;

      rows.push_back({eta, f,
                      detail::max_abs_e_obs_shift(run(price), clean),
                      detail::max_abs_e_obs_shift(run(sensor), clean)});
    }
  }
  return rows;
}

}  // namespace gridprice
