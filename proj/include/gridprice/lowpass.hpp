#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "gridprice/errors.hpp"

namespace gridprice {

// 4th-order recursive low-pass: two bilinear second-order sections collapsed
// into one direct-form recursion. Coefficients are exposed for audit export;
// the tests pin the response, not the numbers.
class LowPassFilter {
 public:
  LowPassFilter(double cutoff_rad_per_h, double period_hours)
      : cutoff_(cutoff_rad_per_h), period_(period_hours) {
    if (!(period_hours > 0.0)) throw model_error("filter: T must be > 0");
    const double w_nyq = std::numbers::pi / period_hours;
    if (!(cutoff_rad_per_h > 0.0 && cutoff_rad_per_h < w_nyq))
      throw model_error("filter: cutoff must lie in (0, pi/T)");

    // Prewarp keeps the half-power point exactly at the requested cutoff;
    // the damping pair puts the analog poles on a Butterworth circle.
    const double kw = std::tan(cutoff_rad_per_h * period_hours / 2.0);
    const std::array<double, 2> zeta = {
        std::sin(std::numbers::pi / 8.0), std::sin(3.0 * std::numbers::pi / 8.0)};

    std::array<std::array<double, 3>, 2> bs{};
    std::array<std::array<double, 3>, 2> as{};
    for (int i = 0; i < 2; ++i) {
      const double inv_q = 2.0 * zeta[i];
      const double norm = 1.0 + kw * inv_q + kw * kw;
      const double b0 = kw * kw / norm;
      bs[i] = {b0, 2.0 * b0, b0};
      as[i] = {1.0, 2.0 * (kw * kw - 1.0) / norm,
               (1.0 - kw * inv_q + kw * kw) / norm};
      if (!(std::abs(as[i][2]) < 1.0 && std::abs(as[i][1]) < 1.0 + as[i][2]))
        throw model_error("filter: designed section is unstable");
    }
    b_ = expand(bs[0], bs[1]);
    a_ = expand(as[0], as[1]);
  }

  // One recursive update (direct form I).
  double step(double x) {
    if (!std::isfinite(x)) throw model_error("filter: non-finite input");
    double y = b_[0] * x;
    for (int i = 0; i < 4; ++i) y += b_[i + 1] * x_hist_[i] - a_[i + 1] * y_hist_[i];
    for (int i = 3; i > 0; --i) {
      x_hist_[i] = x_hist_[i - 1];
      y_hist_[i] = y_hist_[i - 1];
    }
    x_hist_[0] = x;
    y_hist_[0] = y;
    return y;
  }

  // |H(e^{j omega T})| for omega in [0, pi/T].
  double magnitude_at(double omega) const {
    if (omega < 0.0 || omega > std::numbers::pi / period_ * (1.0 + 1e-12))
      throw model_error("filter: omega outside [0, pi/T]");
    std::complex<double> num = 0.0, den = 0.0;
    for (int i = 0; i < 5; ++i) {
      const auto zi = std::polar(1.0, -omega * period_ * i);
      num += b_[i] * zi;
      den += a_[i] * zi;
    }
    return std::abs(num / den);
  }

  double cutoff() const { return cutoff_; }
  double period() const { return period_; }
  const std::array<double, 5>& b() const { return b_; }
  const std::array<double, 5>& a() const { return a_; }  // a[0] == 1

  void reset() {
    x_hist_.fill(0.0);
    y_hist_.fill(0.0);
  }

 private:
  static std::array<double, 5> expand(const std::array<double, 3>& p,
                                      const std::array<double, 3>& q) {
    std::array<double, 5> out{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out[i + j] += p[i] * q[j];
    return out;
  }

  double cutoff_;
  double period_;
  std::array<double, 5> b_{};
  std::array<double, 5> a_{};
  std::array<double, 4> x_hist_{};
  std::array<double, 4> y_hist_{};
};

}  // namespace gridprice
