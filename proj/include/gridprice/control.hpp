#pragma once

#include <algorithm>
#include <cmath>

#include "gridprice/errors.hpp"
#include "gridprice/market.hpp"

namespace gridprice {

// Proportional ISO price update. lambda_prev carries the recursion state and
// always reflects the last *uncompensated* price, so the same struct drives
// both the nominal loop and the robust loop's reference trajectory.
struct PriceController {
  double eta;
  double g_p;
  double lambda0;
  double lambda_prev;

  PriceController(double eta_, double g_p_, double lambda0_)
      : eta(eta_), g_p(g_p_), lambda0(lambda0_), lambda_prev(lambda0_) {
    if (!(eta > 0.0 && eta < 1.0))
      throw model_error("controller: eta must lie in (0, 1)");
    if (!(g_p > 0.0)) throw model_error("controller: plant gain must be > 0");
    if (!(lambda0 >= kLambdaMin))
      throw model_error("controller: lambda0 below the price floor");
  }

  // e_obs is last period's observed mismatch; returns this period's price.
  double step(double e_obs) {
    if (!std::isfinite(e_obs))
      throw model_error("controller: e_obs must be finite");
    lambda_prev = std::max(lambda_prev - (2.0 * eta / g_p) * e_obs, kLambdaMin);
    return lambda_prev;
  }
};

// Disturbance estimator with two-step internal memory. Caller contract: the
// measurement fed at a given call must be the plant's response to the input
// fed two calls earlier (the measurement path lags the actuation path), which
// is what makes the input terms cancel out of the estimate recursion.
class DisturbanceObserver {
 public:
  DisturbanceObserver(double phi, double gamma_hat)
      : phi_(phi), gamma_hat_(gamma_hat) {
    if (!(phi > -1.0 && phi < 1.0))
      throw model_error("observer: phi must lie in (-1, 1)");
    if (gamma_hat == 0.0)
      throw model_error("observer: gamma_hat must be nonzero");
    k_ = (1.0 - phi_) / gamma_hat_;
  }

  // x_meas in MW, u as a price deviation from lambda0; returns d_hat.
  double step(double x_meas, double u, double g_p) {
    if (!std::isfinite(x_meas) || !std::isfinite(u))
      throw model_error("observer: non-finite input");
    const double d_hat = k_ * x_meas - z_prev2_;
    const double z_next =
        z_prev2_ + k_ * (-x_meas + g_p * u + gamma_hat_ * d_hat);
    z_prev2_ = z_prev_;
    z_prev_ = z_next;
    d_hat_ = d_hat;
    return d_hat;
  }

  double d_hat() const { return d_hat_; }
  double gamma_hat() const { return gamma_hat_; }
  double k_gain() const { return k_; }
  double phi() const { return phi_; }

  void reset() { z_prev_ = z_prev2_ = d_hat_ = 0.0; }

 private:
  double phi_, gamma_hat_, k_;
  double z_prev_ = 0.0;   // z one step back
  double z_prev2_ = 0.0;  // z two steps back
  double d_hat_ = 0.0;
};

// Residual-driven variant used inside the compensated loop. Integrating the
// gap between the observed state and the uncompensated model response tracks
// slowly varying disturbances with half the steady lag of the delayed form.
class ResidualObserver {
 public:
  ResidualObserver(double phi, double gamma_hat)
      : phi_(phi), gamma_hat_(gamma_hat) {
    if (!(phi > -1.0 && phi < 1.0))
      throw model_error("observer: phi must lie in (-1, 1)");
    if (gamma_hat == 0.0)
      throw model_error("observer: gamma_hat must be nonzero");
    k_ = (1.0 - phi_) / gamma_hat_;
  }

  // u_nom is the deviation the nominal recursion would have issued.
  double step(double x_obs, double u_nom, double g_p) {
    if (!std::isfinite(x_obs) || !std::isfinite(u_nom))
      throw model_error("observer: non-finite input");
    d_hat_ += k_ * (x_obs - g_p * u_nom);
    return d_hat_;
  }

  double d_hat() const { return d_hat_; }
  double gamma_hat() const { return gamma_hat_; }
  double k_gain() const { return k_; }
  double phi() const { return phi_; }

  void reset() { d_hat_ = 0.0; }

 private:
  double phi_, gamma_hat_, k_;
  double d_hat_ = 0.0;
};

// Compensated price: the nominal recursion advances untouched and the
// correction is applied only to the published value.
template <typename Observer>
double robust_price_step(PriceController& cs, const Observer& os,
                         double e_obs) {
  const double nominal = cs.step(e_obs);
  return std::max(nominal - os.gamma_hat() * os.d_hat() / cs.g_p, kLambdaMin);
}

}  // namespace gridprice
