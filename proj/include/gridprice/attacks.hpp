#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>
#include <vector>

#include "gridprice/errors.hpp"
#include "gridprice/market.hpp"

namespace gridprice {

enum class AttackChannel { price, sensor };
enum class AttackShape { additive, scaling, delay };

// Injected waveforms are evaluated at the absolute step index so a window
// start does not re-phase the signal.
struct ConstantSignal {
  double value = 0.0;
};
struct SinusoidSignal {
  double amplitude = 0.0;
  double omega = 0.0;  // rad per hour
  double phase = 0.0;
};
struct SeriesSignal {
  std::vector<double> values;  // zero past the end
};
using AttackSignal = std::variant<ConstantSignal, SinusoidSignal, SeriesSignal>;

inline double signal_value(const AttackSignal& sig, long k, double period_hours) {
  if (const auto* c = std::get_if<ConstantSignal>(&sig)) return c->value;
  if (const auto* s = std::get_if<SinusoidSignal>(&sig))
    return s->amplitude *
           std::sin(s->omega * period_hours * static_cast<double>(k) + s->phase);
  const auto& series = std::get<SeriesSignal>(sig).values;
  if (k < 0 || k >= static_cast<long>(series.size())) return 0.0;
  return series[static_cast<std::size_t>(k)];
}

struct AttackSpec {
  AttackChannel channel = AttackChannel::price;
  AttackShape shape = AttackShape::additive;
  AttackSignal signal = ConstantSignal{};  // additive d^a_k ($/MWh) or per-meter n^a_k (kW)
  double gamma = 1.0;                      // scaling factor
  long tau = 0;                            // delay in steps
  double rho = 1.0;                        // compromised fraction of responsive demand
  long n_compromised = 0;                  // compromised meters (sensor channel)
  long start = 0;                          // first attacked step
  long end = std::numeric_limits<long>::max();  // first step after the window

  bool active(long k) const { return k >= start && k < end; }

  void validate() const {
    if (!(rho >= 0.0 && rho <= 1.0))
      throw config_error("attack: rho must lie in [0, 1]");
    if (tau < 0) throw config_error("attack: tau must be >= 0");
    if (!(gamma > 0.0)) throw config_error("attack: gamma must be > 0");
    if (n_compromised < 0)
      throw config_error("attack: n_compromised must be >= 0");
    if (start < 0) throw config_error("attack: start must be >= 0");
    if (end <= start) throw config_error("attack: end must be > start");
    if (channel == AttackChannel::sensor && shape != AttackShape::additive)
      throw config_error("attack: sensor channel supports additive shape only");
  }
};

// Price the compromised meters deliver to their households at step k.
// lambda_hist must hold the true prices lambda_0..lambda_k.
inline double attacked_price(const AttackSpec& a, long k,
                             const std::vector<double>& lambda_hist,
                             double period_hours) {
  if (k < 0 || k >= static_cast<long>(lambda_hist.size()))
    throw model_error("attacked_price: step outside recorded history");
  const double lambda_k = lambda_hist[static_cast<std::size_t>(k)];
  if (!a.active(k) || a.channel != AttackChannel::price) return lambda_k;
  double out = lambda_k;
  switch (a.shape) {
    case AttackShape::additive:
      out = lambda_k + signal_value(a.signal, k, period_hours);
      break;
    case AttackShape::scaling:
      out = a.gamma * lambda_k;
      break;
    case AttackShape::delay: {
      const long idx = std::max<long>(0, k - a.tau);
      out = lambda_hist[static_cast<std::size_t>(idx)];
      break;
    }
  }
  return std::max(out, kLambdaMin);
}

// First-order demand perturbation caused by the victims responding to a price
// offset d_k instead of the true price.
inline double victim_demand_shift(const LinearizedPlant& lp, const AttackSpec& a,
                                  double d_k) {
  return a.rho * lp.w_dot * d_k;
}

// Aggregate measurement corruption in MW: n_compromised meters each add
// n^a_k kilowatts to their report. Physical demand is untouched.
inline double sensor_report_shift(const AttackSpec& a, long k,
                                  double period_hours) {
  if (!a.active(k) || a.channel != AttackChannel::sensor) return 0.0;
  return static_cast<double>(a.n_compromised) *
         signal_value(a.signal, k, period_hours) / 1000.0;
}

}  // namespace gridprice
