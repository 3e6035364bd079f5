#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "gridprice/errors.hpp"

namespace gridprice {

// Non-parametric CUSUM over the scaled disturbance estimate. The statistic
// accumulates increment magnitudes above the drift alpha with positive-part
// clipping; the alarm latches at the first sample where s exceeds delta.
class CusumDetector {
 public:
  CusumDetector(double alpha, double delta) : alpha_(alpha), delta_(delta) {
    if (!(alpha >= 0.0)) throw config_error("detector: alpha must be >= 0");
    if (!(delta > 0.0)) throw config_error("detector: delta must be > 0");
  }

  // Feeds gamma_hat * d_hat for the current step; returns the latched alarm.
  bool update(double scaled_dhat) {
    if (!std::isfinite(scaled_dhat))
      throw model_error("detector: non-finite input");
    ++step_;
    if (step_ > 0)
      s_ = std::max(0.0, s_ + std::abs(scaled_dhat - prev_) - alpha_);
    prev_ = scaled_dhat;
    if (!alarmed_ && s_ > delta_) {
      alarmed_ = true;
      alarm_step_ = step_;
    }
    return alarmed_;
  }

  double s() const { return s_; }
  bool alarmed() const { return alarmed_; }
  long alarm_step() const { return alarm_step_; }  // -1 while silent
  double alpha() const { return alpha_; }
  double delta() const { return delta_; }

  void reset() {
    s_ = prev_ = 0.0;
    alarmed_ = false;
    step_ = alarm_step_ = -1;
  }

 private:
  double alpha_, delta_;
  double s_ = 0.0;
  double prev_ = 0.0;
  bool alarmed_ = false;
  long step_ = -1;
  long alarm_step_ = -1;
};

// Drift from an attack-free run: 1.2x the largest observed increment, which
// guarantees the detector stays silent on the calibration trace itself.
inline double calibrate_alpha(const std::vector<double>& scaled_dhat) {
  if (scaled_dhat.size() < 10)
    throw model_error("calibrate_alpha: need at least 10 attack-free samples");
  double worst = 0.0;
  for (std::size_t i = 1; i < scaled_dhat.size(); ++i)
    worst = std::max(worst, std::abs(scaled_dhat[i] - scaled_dhat[i - 1]));
  return 1.2 * worst;
}

// Steps from attack onset to the latched alarm; nullopt when silent.
inline std::optional<long> detection_time(const std::vector<double>& scaled_dhat,
                                          double alpha, double delta,
                                          long attack_start) {
  CusumDetector det(alpha, delta);
  for (std::size_t k = 0; k < scaled_dhat.size(); ++k) {
    if (det.update(scaled_dhat[k]))
      return static_cast<long>(k) - attack_start;
  }
  return std::nullopt;
}

}  // namespace gridprice
