#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "gridprice/errors.hpp"

namespace gridprice {

/// Closed-loop parameters shared by every sensitivity evaluation.
struct LoopParams {
  double eta = 0.5;          // controller convergence rate, in (0, 1)
  double rho = 1.0;          // compromised fraction of responsive demand
  double n_compromised = 0;  // compromised meters for sensor-channel curves
  double w_dot = 0.0;        // responsive-demand slope at the operating point
  double s_dot = 0.0;        // supply slope
  double period_hours = 0.5; // T
  double phi = 0.5;          // estimator pole used by the robust loop

  void check() const {
    if (!(eta > 0.0 && eta < 1.0))
      throw model_error("loop: eta must lie in (0, 1)");
    if (!(period_hours > 0.0)) throw model_error("loop: T must be > 0");
    if (!(s_dot - w_dot > 0.0))
      throw model_error("loop: s_dot - w_dot must be > 0");
  }
};

inline double omega_max(const LoopParams& lp) {
  return std::numbers::pi / lp.period_hours;
}

/// Pole of the nominal price loop; inside the unit circle for eta in (0, 1).
inline double loop_pole(double eta) { return 1.0 - 2.0 * eta; }

namespace detail {

inline std::complex<double> z_at(const LoopParams& lp, double omega) {
  lp.check();
  if (omega < 0.0 || omega > omega_max(lp) * (1.0 + 1e-12))
    throw model_error("sensitivity: omega outside [0, pi/T]");
  return std::polar(1.0, omega * lp.period_hours);
}

}  // namespace detail

/// |E(z)/d(z)|: supply-demand error response to a price-channel injection.
inline double sens_error_price(const LoopParams& lp, double omega) {
  const auto z = detail::z_at(lp, omega);
  return std::abs(-lp.rho * lp.w_dot * (z - 1.0) / (z - 1.0 + 2.0 * lp.eta));
}

/// |lambda(z)/d(z)|: clean-price response to a price-channel injection.
inline double sens_price_price(const LoopParams& lp, double omega) {
  const auto z = detail::z_at(lp, omega);
  return std::abs(-2.0 * lp.eta * lp.rho * lp.w_dot /
                  ((lp.s_dot - lp.w_dot) * (z - 1.0 + 2.0 * lp.eta)));
}

/// |E(z)/n(z)|: observed-error response to a sensor-channel injection (MW per
/// MW of aggregate report corruption).
inline double sens_error_sensor(const LoopParams& lp, double omega) {
  const auto z = detail::z_at(lp, omega);
  return std::abs(-lp.n_compromised * (z - 1.0) / (z - 1.0 + 2.0 * lp.eta));
}

/// |lambda(z)/n(z)|: price response to a sensor-channel injection.
inline double sens_price_sensor(const LoopParams& lp, double omega) {
  const auto z = detail::z_at(lp, omega);
  return std::abs(lp.n_compromised * 2.0 * lp.eta /
                  ((lp.s_dot - lp.w_dot) * (z - 1.0 + 2.0 * lp.eta)));
}

/// |E(z)/d(z)| under the observer-compensated loop. gamma is the disturbance
/// gain: -rho*w_dot for price attacks, -N for sensor attacks.
inline double sens_error_price_robust(const LoopParams& lp, double gamma,
                                      double omega) {
  const auto z = detail::z_at(lp, omega);
  return std::abs(gamma * (z - 1.0) * (z - 1.0) /
                  ((z - lp.phi) * (z - 1.0 + 2.0 * lp.eta)));
}

/// Frequency where the robust loop stops helping: below it |S_robust| < |S|,
/// above it the compensation amplifies. Approaches pi/(2T) as phi -> -1.
inline double cutoff_frequency(double phi, double period_hours) {
  if (!(phi > -1.0 && phi < 1.0))
    throw model_error("cutoff_frequency: phi must lie in (-1, 1)");
  if (!(period_hours > 0.0))
    throw model_error("cutoff_frequency: T must be > 0");
  return std::acos((phi + 1.0) / 2.0) / period_hours;
}

struct SensitivityCurve {
  std::vector<double> omega;
  std::vector<double> magnitude;
  std::string label;
};

using SensitivityFn = std::function<double(const LoopParams&, double)>;

/// Uniform sample of fn over [0, pi/T] inclusive.
inline SensitivityCurve sweep(const SensitivityFn& fn, const LoopParams& lp,
                              int grid_size = 1024, std::string label = {}) {
  if (grid_size < 2) throw model_error("sweep: grid must have >= 2 points");
  SensitivityCurve c;
  c.label = std::move(label);
  c.omega.reserve(static_cast<std::size_t>(grid_size));
  c.magnitude.reserve(static_cast<std::size_t>(grid_size));
  const double w_max = omega_max(lp);
  for (int i = 0; i < grid_size; ++i) {
    const double w = w_max * static_cast<double>(i) /
                     static_cast<double>(grid_size - 1);
    c.omega.push_back(w);
    c.magnitude.push_back(fn(lp, w));
  }
  return c;
}

/// Grid argmax of fn; ties resolve toward the lower frequency.
inline std::pair<double, double> worst_case_frequency(const SensitivityFn& fn,
                                                      const LoopParams& lp,
                                                      int grid_size = 1024) {
  const SensitivityCurve c = sweep(fn, lp, grid_size);
  double best_w = c.omega[0];
  double best_m = c.magnitude[0];
  for (std::size_t i = 1; i < c.omega.size(); ++i) {
    if (c.magnitude[i] > best_m) {
      best_m = c.magnitude[i];
      best_w = c.omega[i];
    }
  }
  return {best_w, best_m};
}

}  // namespace gridprice
