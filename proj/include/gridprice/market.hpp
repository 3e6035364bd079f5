#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "gridprice/errors.hpp"

namespace gridprice {

// Price bracket for every market evaluation, $/MWh.
inline constexpr double kLambdaMin = 0.01;
inline constexpr double kLambdaMax = 1e6;

// Affine supply s(l) = p*l + q and constant-elasticity responsive demand
// w(l) = D*l^epsilon, aggregated over n_consumers households. baseline_mw
// holds one entry per dispatch period and is indexed cyclically.
struct MarketParams {
  double p = 31.0;            // supply slope, MW per $/MWh
  double q = 917.0;           // supply intercept, MW
  double demand_scale = 0.0;  // D in w(l) = D*l^epsilon, MW
  double elasticity = -0.8;   // epsilon, must stay inside (-1, 0)
  double period_hours = 0.5;  // T
  long n_consumers = 1000000;
  std::vector<double> baseline_mw{400.0};

  void validate() const {
    if (!(p > 0.0)) throw config_error("market: p must be > 0");
    if (!(demand_scale >= 0.0)) throw config_error("market: D must be >= 0");
    if (!(elasticity > -1.0 && elasticity < 0.0))
      throw config_error("market: epsilon must lie in (-1, 0)");
    if (!(period_hours > 0.0)) throw config_error("market: T must be > 0");
    if (n_consumers < 1) throw config_error("market: n_consumers must be >= 1");
    if (baseline_mw.empty())
      throw config_error("market: baseline profile must be non-empty");
    for (double b : baseline_mw)
      if (!(b > 0.0))
        throw config_error("market: baseline entries must be > 0");
  }
};

// First-order expansion of the market around an operating price lambda0.
struct LinearizedPlant {
  double lambda0 = 0.0;
  double s_dot = 0.0;  // supply slope at lambda0
  double w_dot = 0.0;  // responsive-demand slope at lambda0, <= 0
  double g_p = 0.0;    // s_dot - w_dot, always > 0
  double s0 = 0.0;     // supply intercept of the tangent, equals q
  double w0 = 0.0;     // demand intercept of the tangent
};

inline double supply(const MarketParams& m, double lambda) {
  if (lambda < 0.0)
    throw model_error("supply: negative price " + std::to_string(lambda));
  return m.p * lambda + m.q;
}

inline double responsive_demand(const MarketParams& m, double lambda) {
  if (lambda < kLambdaMin)
    throw model_error("responsive_demand: price " + std::to_string(lambda) +
                      " below lambda_min");
  return m.demand_scale * std::pow(lambda, m.elasticity);
}

inline double baseline_at(const MarketParams& m, long k) {
  const std::size_t n = m.baseline_mw.size();
  long idx = k % static_cast<long>(n);
  if (idx < 0) idx += static_cast<long>(n);
  return m.baseline_mw[static_cast<std::size_t>(idx)];
}

inline double total_demand(const MarketParams& m, long k, double lambda) {
  return baseline_at(m, k) + responsive_demand(m, lambda);
}

inline double per_household_kw(double b_mw, long n_consumers) {
  return b_mw * 1000.0 / static_cast<double>(n_consumers);
}

inline LinearizedPlant linearize(const MarketParams& m, double lambda0) {
  if (lambda0 < kLambdaMin)
    throw model_error("linearize: operating price below lambda_min");
  LinearizedPlant lp;
  lp.lambda0 = lambda0;
  lp.s_dot = m.p;
  lp.w_dot = m.demand_scale * m.elasticity * std::pow(lambda0, m.elasticity - 1.0);
  lp.g_p = lp.s_dot - lp.w_dot;
  lp.s0 = m.q;  // s(l0) - l0*s'(l0) collapses to the intercept for affine s
  lp.w0 = responsive_demand(m, lambda0) - lambda0 * lp.w_dot;
  return lp;
}

// Price that clears the market against a fixed baseline b: supply equals
// b plus responsive demand. The residual function is strictly increasing in
// lambda, so plain bisection on [kLambdaMin, kLambdaMax] is enough.
inline double clearing_price(const MarketParams& m, double b_mw) {
  const auto residual = [&](double lambda) {
    return supply(m, lambda) - b_mw - responsive_demand(m, lambda);
  };
  double lo = kLambdaMin;
  double hi = kLambdaMax;
  double f_lo = residual(lo);
  double f_hi = residual(hi);
  if (f_lo > 0.0 || f_hi < 0.0)
    throw model_error("clearing_price: no equilibrium in the price bracket");
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (residual(mid) <= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double lambda_star = 0.5 * (lo + hi);
  if (std::fabs(residual(lambda_star)) > 1e-9 * (b_mw + m.q))
    throw model_error("clearing_price: bisection did not meet tolerance");
  return lambda_star;
}

}  // namespace gridprice
