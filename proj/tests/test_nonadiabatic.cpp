#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "raman/errors.hpp"
#include "raman/nonadiabatic.hpp"

using namespace raman;
constexpr double kPi = std::numbers::pi;

namespace {

// Brute-force max over the initial Phi_2 weight p of 1 - |1 + p (c - 1)|^2.
double grid_gate_error(cdouble c) {
  double worst = 0.0;
  const int n = 100000;
  for (int k = 0; k <= n; ++k) {
    const double p = static_cast<double>(k) / n;
    worst = std::max(worst, 1.0 - std::norm(1.0 + p * (c - 1.0)));
  }
  return worst;
}

}  // namespace

TEST_CASE("zero drive leaves the adiabatic amplitudes untouched") {
  const auto a = integrate_amplitudes(15.0, 0.0);
  CHECK(a.a2 == cdouble(1.0, 0.0));
  CHECK(a.a3 == cdouble(0.0, 0.0));
  CHECK(a.phase == doctest::Approx(15.0 * 6.0).epsilon(1e-12));
}

TEST_CASE("amplitude norm is conserved by the integrator") {
  const PulseEnvelope env;
  for (double chi : {2.0, 8.0, 25.0}) {
    const auto a = integrate_amplitudes(chi, solve_xmax(kPi, chi, env), env);
    CHECK(a.max_norm_drift < 1e-10);
    CHECK(std::abs(std::norm(a.a2) + std::norm(a.a3) - 1.0) < 1e-10);
  }
}

TEST_CASE("too few steps for the phase advance is refused") {
  AmplitudeSettings coarse;
  coarse.steps_per_unit = 20;
  CHECK_THROWS_AS(integrate_amplitudes(30.0, 1.0, {}, coarse), ResolutionError);
  coarse.allow_coarse = true;
  CHECK_NOTHROW(integrate_amplitudes(30.0, 1.0, {}, coarse));
}

TEST_CASE("pure-state gate error closed form") {
  CHECK(gate_error_pure({1.0, 0.0}, {0.0, 0.0}).error == 0.0);
  const auto quarter = gate_error_pure({0.0, 1.0}, {0.0, 0.0});
  CHECK(quarter.error == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(quarter.p_star == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(gate_error_pure({-1.0, 0.0}, {0.0, 0.0}).error == doctest::Approx(1.0).epsilon(1e-15));
  // pure leakage with no phase error: worst case is full weight on Phi_2
  const double s = std::sqrt(0.99);
  const auto leak = gate_error_pure({s, 0.0}, {0.1, 0.0});
  CHECK(leak.p_star == 1.0);
  CHECK(leak.error == doctest::Approx(0.01).epsilon(1e-12));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> mag(0.0, 1.0), ph(-kPi, kPi);
  for (int n = 0; n < 200; ++n) {
    const double r = std::sqrt(mag(rng));
    const cdouble c = std::polar(r, ph(rng));
    const cdouble d = std::polar(std::sqrt(1.0 - r * r), ph(rng));
    const auto g = gate_error_pure(c, d);
    CHECK(std::abs(g.error - grid_gate_error(c)) < 1e-9);
    CHECK(g.p_star >= 0.0);
    CHECK(g.p_star <= 1.0);
    CHECK(g.error >= 0.0);
    CHECK(g.error <= 1.0);
  }
  CHECK_THROWS_AS(gate_error_pure({1.0, 0.0}, {0.1, 0.0}), PreconditionError);
}

TEST_CASE("pi rotation at chi = 15 is well below 1e-4") {
  const auto g = nonadiabatic_error(kPi, 15.0);
  CHECK(g.error < 1e-4);
  CHECK(g.error > 0.0);
}

TEST_CASE("adiabatic amplitudes agree with a bare-basis Schrodinger oracle") {
  const PulseEnvelope env;
  const DriveConfig d = DriveConfig::for_rotation(kPi, 5.0, 1.0, 0.0, kPi / 4.0, env);
  const auto a = integrate_amplitudes(d.chi(), d.x_max, env);
  const auto ref = oracle::adiabatic_amplitudes(d);
  CHECK(std::abs(a.a2 - ref.c) < 1e-8);
  CHECK(std::abs(std::abs(a.a3) - std::abs(ref.d)) < 1e-8);
}

TEST_CASE("gate error agrees with the Schrodinger oracle for random rotations") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ang(0.3, 2.0 * kPi), chi(2.0, 20.0), ph(-kPi, kPi),
      mix(0.0, kPi / 2.0);
  for (int n = 0; n < 6; ++n) {
    const double angle = ang(rng), c = chi(rng);
    const DriveConfig d = DriveConfig::for_rotation(angle, c, 1.0, ph(rng), mix(rng));
    const double e = nonadiabatic_error(angle, c).error;
    const double ref = oracle::schrodinger_gate_error(d, make_rotation(angle, d.alpha, d.beta), 8000);
    CHECK(std::abs(e - ref) < 1e-8);
  }
}

TEST_CASE("gate error does not depend on the rotation axis") {
  const double angle = kPi / 2.0, chi = 6.0;
  const double e = nonadiabatic_error(angle, chi).error;
  for (auto [alpha, beta] : {std::pair{0.0, 0.0}, {1.0, 0.3}, {-2.0, 1.3}}) {
    const DriveConfig d = DriveConfig::for_rotation(angle, chi, 1.0, alpha, beta);
    CHECK(std::abs(oracle::schrodinger_gate_error(d, make_rotation(angle, alpha, beta), 8000) - e) <
          1e-8);
  }
}

TEST_CASE("gate error is converged in the step count") {
  AmplitudeSettings fine;
  fine.steps_per_unit = 4000;
  for (double chi : {3.0, 15.0, 30.0}) {
    const double a = nonadiabatic_error(kPi, chi).error;
    const double b = nonadiabatic_error(kPi, chi, {}, fine).error;
    CHECK(std::abs(a - b) < 1e-10);
  }
}

TEST_CASE("error falls with chi and smaller rotations are cheaper") {
  const double e2 = nonadiabatic_error(2.0 * kPi, 2.0).error;
  const double e5 = nonadiabatic_error(2.0 * kPi, 5.0).error;
  const double e15 = nonadiabatic_error(2.0 * kPi, 15.0).error;
  const double e30 = nonadiabatic_error(2.0 * kPi, 30.0).error;
  CHECK(e2 > e5);
  CHECK(e5 > e15);
  CHECK(e15 > e30);
  CHECK(e15 == doctest::Approx(3.097e-5).epsilon(2e-3));
  for (double chi : {10.0, 20.0, 30.0}) {
    CHECK(nonadiabatic_error(kPi / 2.0, chi).error < nonadiabatic_error(2.0 * kPi, chi).error);
  }
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(nonadiabatic_error(-1.0, 10.0), PreconditionError);
  CHECK_THROWS_AS(integrate_amplitudes(0.0, 0.5), PreconditionError);
}
