#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <utility>

#include "gridprice/sensitivity.hpp"

using Catch::Approx;
using namespace gridprice;

namespace {

constexpr double kPi = std::numbers::pi;

// Hand-expanded magnitude expressions, kept deliberately separate from the
// complex-arithmetic code path. Written in terms of s = sin^2(omega*T/2):
//   |z-1|        = 2*sqrt(s)
//   |z-1+2eta|   = 2*sqrt(s*(1-2eta) + eta^2)
//   |z-phi|      = sqrt(1 - 2*phi*cos(omega*T) + phi^2)

double half_angle_s(double omega, double period) {
  const double sn = std::sin(omega * period / 2.0);
  return sn * sn;
}

double oracle_error_price(double eta, double rho, double w_dot, double period,
                          double omega) {
  const double s = half_angle_s(omega, period);
  const double num = std::sqrt(s * s * (1.0 - 2.0 * eta) + eta * eta * s);
  const double den = s * (1.0 - 2.0 * eta) + eta * eta;
  return rho * std::abs(w_dot) * num / den;
}

double oracle_price_price(double eta, double rho, double w_dot, double s_dot,
                          double period, double omega) {
  const double s = half_angle_s(omega, period);
  return 2.0 * eta * rho * std::abs(w_dot) /
         ((s_dot - w_dot) * 2.0 * std::sqrt(s * (1.0 - 2.0 * eta) + eta * eta));
}

double oracle_error_price_robust(double gamma, double eta, double phi,
                                 double period, double omega) {
  const double s = half_angle_s(omega, period);
  const double z_minus_phi =
      std::sqrt(1.0 - 2.0 * phi * std::cos(omega * period) + phi * phi);
  return std::abs(gamma) * 4.0 * s /
         (z_minus_phi * 2.0 * std::sqrt(s * (1.0 - 2.0 * eta) + eta * eta));
}

// Dense-grid argmax over [0, w_max] used as the reference for
// worst_case_frequency; evaluates only the closed forms above.
template <typename F>
std::pair<double, double> dense_argmax(F f, double w_max, int n = 8193) {
  double best_w = 0.0;
  double best_m = f(0.0);
  for (int i = 1; i < n; ++i) {
    const double w = w_max * static_cast<double>(i) / (n - 1);
    const double m = f(w);
    if (m > best_m) {
      best_m = m;
      best_w = w;
    }
  }
  return {best_w, best_m};
}

LoopParams reference_loop() {
  LoopParams lp;
  lp.eta = 0.5;
  lp.rho = 0.5;
  lp.w_dot = -10.0;
  lp.s_dot = 31.0;
  lp.period_hours = 0.5;
  return lp;
}

}  // namespace

TEST_CASE("error/price sensitivity matches hand values", "[sensitivity]") {
  LoopParams lp = reference_loop();
  const double w_nyq = omega_max(lp);  // pi/T = 2*pi

  CHECK(sens_error_price(lp, 0.0) == 0.0);
  CHECK(sens_error_price(lp, w_nyq) == Approx(10.0).epsilon(1e-12));
  // half-band point: s = 1/2, |S| = 5*sqrt(2)
  CHECK(sens_error_price(lp, w_nyq / 2.0) ==
        Approx(7.0710678118654755).epsilon(1e-12));

  lp.rho = 0.0;
  CHECK(sens_error_price(lp, w_nyq / 3.0) == 0.0);
}

TEST_CASE("price/price sensitivity matches hand values", "[sensitivity]") {
  LoopParams lp = reference_loop();
  const double w_nyq = omega_max(lp);

  CHECK(sens_price_price(lp, w_nyq) == Approx(5.0 / 41.0).epsilon(1e-12));

  lp.rho = 1.0;
  CHECK(sens_price_price(lp, 0.0) == Approx(10.0 / 41.0).epsilon(1e-12));

  lp.rho = 0.0;
  CHECK(sens_price_price(lp, 1.0) == 0.0);
}

TEST_CASE("sensor-channel sensitivities match hand values", "[sensitivity]") {
  LoopParams lp = reference_loop();
  lp.n_compromised = 1.0;
  const double w_nyq = omega_max(lp);

  CHECK(sens_error_sensor(lp, 0.0) == 0.0);
  CHECK(sens_error_sensor(lp, w_nyq) == Approx(2.0).epsilon(1e-12));
  CHECK(sens_price_sensor(lp, 0.0) == Approx(1.0 / 41.0).epsilon(1e-12));

  // One compromised meter mirrors the price-channel shape up to |w_dot|.
  LoopParams full = lp;
  full.rho = 1.0;
  for (int i = 0; i <= 16; ++i) {
    const double w = w_nyq * i / 16.0;
    CHECK(sens_error_sensor(lp, w) ==
          Approx(sens_error_price(full, w) / std::abs(full.w_dot))
              .margin(1e-14));
  }

  LoopParams none = lp;
  none.n_compromised = 0.0;
  CHECK(sens_error_sensor(none, w_nyq) == 0.0);
  CHECK(sens_price_sensor(none, w_nyq) == 0.0);
}

TEST_CASE("complex evaluation agrees with the expanded sin forms",
          "[sensitivity]") {
  std::mt19937 rng(20240817u);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  for (int trial = 0; trial < 1000; ++trial) {
    LoopParams lp;
    lp.eta = 0.01 + 0.98 * u01(rng);
    lp.rho = u01(rng);
    lp.w_dot = -0.1 - 99.9 * u01(rng);
    lp.s_dot = 0.5 + 60.0 * u01(rng);
    lp.period_hours = 0.1 + 2.0 * u01(rng);
    lp.phi = -0.95 + 1.9 * u01(rng);
    const double omega = omega_max(lp) * u01(rng);

    const double a = sens_error_price(lp, omega);
    const double b = oracle_error_price(lp.eta, lp.rho, lp.w_dot,
                                        lp.period_hours, omega);
    REQUIRE_THAT(a, Catch::Matchers::WithinRel(b, 1e-9) ||
                        Catch::Matchers::WithinAbs(b, 1e-12));

    const double c = sens_price_price(lp, omega);
    const double d = oracle_price_price(lp.eta, lp.rho, lp.w_dot, lp.s_dot,
                                        lp.period_hours, omega);
    REQUIRE_THAT(c, Catch::Matchers::WithinRel(d, 1e-9) ||
                        Catch::Matchers::WithinAbs(d, 1e-12));

    const double gamma = -lp.rho * lp.w_dot;
    const double e = sens_error_price_robust(lp, gamma, omega);
    const double f = oracle_error_price_robust(gamma, lp.eta, lp.phi,
                                               lp.period_hours, omega);
    REQUIRE_THAT(e, Catch::Matchers::WithinRel(f, 1e-9) ||
                        Catch::Matchers::WithinAbs(f, 1e-12));
  }
}

TEST_CASE("nominal sensitivities are linear in rho and N", "[sensitivity]") {
  LoopParams lp = reference_loop();
  lp.rho = 0.3;
  lp.n_compromised = 7.0;
  LoopParams doubled = lp;
  doubled.rho = 0.6;
  doubled.n_compromised = 14.0;

  for (double w : {0.31, 1.7, 4.2, 6.0}) {
    CHECK(sens_error_price(doubled, w) ==
          Approx(2.0 * sens_error_price(lp, w)).epsilon(1e-12));
    CHECK(sens_price_price(doubled, w) ==
          Approx(2.0 * sens_price_price(lp, w)).epsilon(1e-12));
    CHECK(sens_error_sensor(doubled, w) ==
          Approx(2.0 * sens_error_sensor(lp, w)).epsilon(1e-12));
    CHECK(sens_price_sensor(doubled, w) ==
          Approx(2.0 * sens_price_sensor(lp, w)).epsilon(1e-12));
  }
}

TEST_CASE("loop pole stays inside the unit circle", "[sensitivity]") {
  CHECK(loop_pole(0.5) == 0.0);
  for (double eta : {0.01, 0.25, 0.5, 0.75, 0.99}) {
    CHECK(std::abs(loop_pole(eta)) < 1.0);
  }
}

TEST_CASE("robust sensitivity: zeros, phi=0 ratio, crossover",
          "[sensitivity]") {
  LoopParams lp = reference_loop();
  const double gamma = -lp.rho * lp.w_dot;  // 5
  const double w_nyq = omega_max(lp);

  CHECK(sens_error_price_robust(lp, gamma, 0.0) == 0.0);

  // With phi = 0 the improvement ratio collapses to |z-1|.
  lp.phi = 0.0;
  for (int i = 1; i <= 16; ++i) {
    const double w = w_nyq * i / 16.0;
    const double ratio =
        sens_error_price_robust(lp, gamma, w) / sens_error_price(lp, w);
    CHECK(ratio ==
          Approx(2.0 * std::sqrt(half_angle_s(w, lp.period_hours)))
              .epsilon(1e-10));
  }
  CHECK(sens_error_price_robust(lp, gamma, w_nyq) ==
        Approx(2.0 * sens_error_price(lp, w_nyq)).epsilon(1e-12));

  // |S_hat| = |S| exactly at the cutoff, for several pole placements.
  for (double phi : {-0.7, -0.2, 0.0, 0.4, 0.8}) {
    lp.phi = phi;
    const double wc = cutoff_frequency(phi, lp.period_hours);
    CHECK(sens_error_price_robust(lp, gamma, wc) ==
          Approx(sens_error_price(lp, wc)).epsilon(1e-10));
  }
}

TEST_CASE("robust-vs-nominal sign change happens once, at the cutoff",
          "[sensitivity]") {
  LoopParams lp = reference_loop();
  const double gamma = -lp.rho * lp.w_dot;
  const int grid = 1024;

  for (double phi : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
    lp.phi = phi;
    const auto nominal = sweep(
        [](const LoopParams& p, double w) { return sens_error_price(p, w); },
        lp, grid);
    const auto robust = sweep(
        [gamma](const LoopParams& p, double w) {
          return sens_error_price_robust(p, gamma, w);
        },
        lp, grid);

    int sign_changes = 0;
    double change_lo = 0.0, change_hi = 0.0;
    double prev = robust.magnitude[1] - nominal.magnitude[1];
    for (int i = 2; i < grid; ++i) {
      const double cur = robust.magnitude[i] - nominal.magnitude[i];
      if ((prev < 0.0) != (cur < 0.0)) {
        ++sign_changes;
        change_lo = nominal.omega[i - 1];
        change_hi = nominal.omega[i];
      }
      prev = cur;
    }
    REQUIRE(sign_changes == 1);
    const double wc = cutoff_frequency(phi, lp.period_hours);
    CHECK(change_lo <= wc);
    CHECK(wc <= change_hi);
  }
}

TEST_CASE("cutoff frequency values and monotonicity", "[sensitivity]") {
  CHECK(cutoff_frequency(0.0, 0.5) == Approx(2.0943951023931953).epsilon(1e-12));
  CHECK(cutoff_frequency(0.9, 1.0) == Approx(0.3175604292915997).epsilon(1e-9));
  // phi -> -1 pushes the cutoff toward a quarter of the sampling rate.
  CHECK(cutoff_frequency(-1.0 + 1e-9, 0.5) == Approx(kPi).margin(1e-4));

  double prev = cutoff_frequency(-0.95, 0.5);
  for (double phi = -0.75; phi < 1.0; phi += 0.2) {
    const double cur = cutoff_frequency(phi, 0.5);
    CHECK(cur < prev);
    prev = cur;
  }

  CHECK_THROWS_AS(cutoff_frequency(1.0, 0.5), model_error);
  CHECK_THROWS_AS(cutoff_frequency(-1.0, 0.5), model_error);
  CHECK_THROWS_AS(cutoff_frequency(0.5, 0.0), model_error);
}

TEST_CASE("worst-case frequency matches a dense-grid reference",
          "[sensitivity]") {
  LoopParams lp = reference_loop();
  const double w_nyq = omega_max(lp);
  const double cell = w_nyq / 1023.0;

  // |E/d| grows toward the Nyquist rate regardless of eta.
  for (double eta : {0.3, 0.5, 0.8}) {
    lp.eta = eta;
    const auto got = worst_case_frequency(
        [](const LoopParams& p, double w) { return sens_error_price(p, w); },
        lp);
    const auto want = dense_argmax([&](double w) {
      return oracle_error_price(lp.eta, lp.rho, lp.w_dot, lp.period_hours, w);
    }, w_nyq);
    CHECK(std::abs(got.first - want.first) <= cell);
    CHECK(got.second == Approx(want.second).epsilon(1e-9));
    CHECK(got.first == Approx(w_nyq).epsilon(1e-12));
  }

  // |lambda/d| peaks at DC for slow controllers and at Nyquist for
  // aggressive ones; eta = 1/2 is the flat boundary.
  for (double eta : {0.3, 0.8}) {
    lp.eta = eta;
    const auto got = worst_case_frequency(
        [](const LoopParams& p, double w) { return sens_price_price(p, w); },
        lp);
    const auto want = dense_argmax([&](double w) {
      return oracle_price_price(lp.eta, lp.rho, lp.w_dot, lp.s_dot,
                                lp.period_hours, w);
    }, w_nyq);
    CHECK(std::abs(got.first - want.first) <= cell);
    CHECK(got.second == Approx(want.second).epsilon(1e-9));
  }
  lp.eta = 0.3;
  CHECK(worst_case_frequency(
            [](const LoopParams& p, double w) { return sens_price_price(p, w); },
            lp)
            .first == 0.0);

  lp.eta = 0.5;
  const auto flat = sweep(
      [](const LoopParams& p, double w) { return sens_price_price(p, w); }, lp);
  for (double m : flat.magnitude) {
    CHECK(m == Approx(lp.rho * std::abs(lp.w_dot) / (lp.s_dot - lp.w_dot))
                   .epsilon(1e-12));
  }

  lp.rho = 0.0;
  const auto none = worst_case_frequency(
      [](const LoopParams& p, double w) { return sens_error_price(p, w); }, lp);
  CHECK(none.first == 0.0);
  CHECK(none.second == 0.0);
}

TEST_CASE("sweep grid shape and consistency", "[sensitivity]") {
  LoopParams lp = reference_loop();
  const auto two = sweep(
      [](const LoopParams& p, double w) { return sens_error_price(p, w); }, lp,
      2, "edge");
  REQUIRE(two.omega.size() == 2);
  CHECK(two.omega[0] == 0.0);
  CHECK(two.omega[1] == Approx(omega_max(lp)).epsilon(1e-15));
  CHECK(two.label == "edge");

  const auto curve = sweep(
      [](const LoopParams& p, double w) { return sens_error_price(p, w); }, lp,
      257);
  REQUIRE(curve.omega.size() == 257);
  for (std::size_t i = 1; i < curve.omega.size(); ++i) {
    CHECK(curve.omega[i] > curve.omega[i - 1]);
  }
  for (std::size_t i = 0; i < curve.omega.size(); i += 16) {
    CHECK(curve.magnitude[i] == sens_error_price(lp, curve.omega[i]));
  }

  CHECK_THROWS_AS(
      sweep([](const LoopParams&, double) { return 0.0; }, lp, 1),
      model_error);
}

TEST_CASE("frequency and parameter domains are enforced", "[sensitivity]") {
  LoopParams lp = reference_loop();
  CHECK_THROWS_AS(sens_error_price(lp, -0.1), model_error);
  CHECK_THROWS_AS(sens_error_price(lp, omega_max(lp) * 1.01), model_error);

  LoopParams bad_eta = lp;
  bad_eta.eta = 1.0;
  CHECK_THROWS_AS(sens_error_price(bad_eta, 1.0), model_error);
  bad_eta.eta = 0.0;
  CHECK_THROWS_AS(sens_price_price(bad_eta, 1.0), model_error);

  LoopParams inverted = lp;
  inverted.w_dot = 50.0;  // would make supply-minus-demand slope negative
  CHECK_THROWS_AS(sens_error_price(inverted, 1.0), model_error);
}
