#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "raman/errors.hpp"
#include "raman/lambda_frame.hpp"
#include "raman/numerics.hpp"

using namespace raman;
constexpr double kPi = std::numbers::pi;

TEST_CASE("envelope is normalised, vanishes at the truncation and is even") {
  const PulseEnvelope env;
  CHECK(env.value(0.0) == 1.0);
  CHECK(env.value(3.0) == 0.0);
  CHECK(env.value(-3.0) == 0.0);
  const double b = std::exp2(-9.0);
  CHECK(env.value(1.0) == doctest::Approx((0.5 - b) / (1.0 - b)).epsilon(1e-15));
  CHECK(env.value(1.0) == doctest::Approx(0.49902).epsilon(1e-5));

  for (double u = -3.0; u <= 3.0; u += 0.01) {
    const double f = env.value(u);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    CHECK(f == env.value(-u));
  }
  CHECK_THROWS_AS(env.value(3.0000001), OutOfRangeError);
  CHECK_THROWS_AS(env.derivative(-4.0), OutOfRangeError);
  CHECK_THROWS_AS(PulseEnvelope{-1.0}.validate(), ConfigError);
}

TEST_CASE("envelope derivative matches central differences") {
  const PulseEnvelope env{2.5};
  for (double u : {-2.4, -1.0, -0.3, 0.0, 0.7, 1.9}) {
    const double h = 1e-5;
    const double fd = (env.value(u + h) - env.value(u - h)) / (2.0 * h);
    CHECK(std::abs(env.derivative(u) - fd) < 1e-9);
  }
}

TEST_CASE("squared integral matches the erf closed form") {
  for (double ub : {2.0, 3.0, 4.0}) {
    const PulseEnvelope env{ub};
    const double l2 = std::log(2.0);
    const double g = std::exp2(-ub * ub);
    const double a = std::sqrt(kPi / (2.0 * l2)) * std::erf(ub * std::sqrt(2.0 * l2));
    const double b = std::sqrt(kPi / l2) * std::erf(ub * std::sqrt(l2));
    const double exact = (a - 2.0 * g * b + 2.0 * ub * g * g) / ((1.0 - g) * (1.0 - g));
    CHECK(env.squared_integral() == doctest::Approx(exact).epsilon(1e-10));
  }
}

TEST_CASE("eigensystem with lasers off") {
  const auto es = eigensystem(0.0, 0.0, 1.0, 0.0);
  CHECK(es.phi == 0.0);
  CHECK(es.beta == 0.0);
  CHECK(es.eigenvalues[0] == 0.0);
  CHECK(es.eigenvalues[1] == 0.0);
  CHECK(es.eigenvalues[2] == 1.0);
  CHECK((es.eigenvectors[1] - Eigen::Vector3cd(-1.0, 0.0, 0.0)).norm() == 0.0);
  CHECK((es.eigenvectors[2] - Eigen::Vector3cd(0.0, 0.0, 1.0)).norm() == 0.0);
}

TEST_CASE("eigenpairs satisfy H v = lambda v") {
  auto residual = [](double o1, double o2, double d, double a) {
    const auto es = eigensystem(o1, o2, d, a);
    const Eigen::Matrix3cd h = hamiltonian(o1, o2, d, a);
    double worst = 0.0;
    for (int k = 0; k < 3; ++k) {
      worst = std::max(worst, (h * es.eigenvectors[k] - es.eigenvalues[k] * es.eigenvectors[k]).norm());
    }
    return worst;
  };
  CHECK(residual(1.0, 1.0, 2.0, kPi / 3.0) < 1e-12);

  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> rabi(0.0, 5.0), det(0.1, 5.0), ph(-kPi, kPi);
  for (int n = 0; n < 1000; ++n) {
    const double o1 = rabi(rng), o2 = rabi(rng), d = det(rng), a = ph(rng);
    CHECK(residual(o1, o2, d, a) < 1e-12);
    const auto es = eigensystem(o1, o2, d, a);
    Eigen::Matrix3cd v;
    for (int k = 0; k < 3; ++k) v.col(k) = es.eigenvectors[k];
    CHECK((v.adjoint() * v - Eigen::Matrix3cd::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(es.eigenvalues[0] + es.eigenvalues[1] + es.eigenvalues[2] - d) < 1e-12);
    CHECK(es.eigenvalues[1] <= 0.0);
    CHECK(es.eigenvalues[2] >= 0.0);
    CHECK(std::abs(es.eigenvectors[0](2)) == 0.0);
    // tan 2 phi = 2 Omega / Delta and lambda_2 = -(Delta/2)(sqrt(1 + 4 Omega^2/Delta^2) - 1)
    CHECK(std::abs(std::tan(2.0 * es.phi) - 2.0 * es.rabi / d) <
          1e-12 * std::max(1.0, 2.0 * es.rabi / d) * std::max(1.0, 2.0 * es.rabi / d));
    const double r = es.rabi / d;
    CHECK(std::abs(es.eigenvalues[1] + 0.5 * d * (std::sqrt(1.0 + 4.0 * r * r) - 1.0)) < 1e-12);
  }
}

TEST_CASE("eigensystem preconditions") {
  CHECK_THROWS_AS(eigensystem(1.0, 1.0, 0.0, 0.0), PreconditionError);
  CHECK_THROWS_AS(eigensystem(-1.0, 1.0, 1.0, 0.0), PreconditionError);
}

TEST_CASE("rotation axis") {
  auto close = [](const Eigen::Vector3d& a, const Eigen::Vector3d& b) { return (a - b).norm() < 1e-15; };
  CHECK(close(rotation_axis(0.0, kPi / 4.0), {1.0, 0.0, 0.0}));
  CHECK(close(rotation_axis(0.0, 0.0), {0.0, 0.0, 1.0}));
  CHECK(close(rotation_axis(kPi / 2.0, kPi / 4.0), {0.0, -1.0, 0.0}));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> a(-kPi, kPi), b(0.0, kPi / 2.0);
  for (int i = 0; i < 100; ++i) CHECK(std::abs(rotation_axis(a(rng), b(rng)).norm() - 1.0) < 1e-12);
}

TEST_CASE("rotation unitary implements the adiabatic map up to a global phase") {
  // |Phi1><Phi1| + e^{-i L2} |Phi2><Phi2| restricted to the qubit block (phi = 0)
  for (double alpha : {0.0, 0.4, kPi / 2.0}) {
    for (double beta : {0.0, 0.3, kPi / 4.0, 1.2}) {
      const double angle = 1.7;
      const auto es = eigensystem_polar(0.0, beta, 1.0, alpha);
      const Eigen::Vector2cd p1 = es.eigenvectors[0].head<2>();
      const Eigen::Vector2cd p2 = es.eigenvectors[1].head<2>();
      const Eigen::Matrix2cd v = p1 * p1.adjoint() + std::polar(1.0, angle) * p2 * p2.adjoint();
      const Eigen::Matrix2cd u = rotation_unitary(make_rotation(angle, alpha, beta));
      const Eigen::Matrix2cd ratio = v * u.adjoint();
      CHECK((ratio - ratio(0, 0) * Eigen::Matrix2cd::Identity()).norm() < 1e-12);
    }
  }
  // pi about x sends |0> to |1> (up to phase)
  const Eigen::Matrix2cd u = rotation_unitary(make_rotation(kPi, 0.0, kPi / 4.0));
  CHECK(std::abs(u(1, 0)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("rotation angle: zero drive, monotonicity, small-drive limit") {
  const PulseEnvelope env;
  CHECK(rotation_angle(15.0, 0.0, env) == 0.0);
  double prev = 0.0;
  for (double x = 0.05; x < 5.0; x += 0.05) {
    const double l = rotation_angle(10.0, x, env);
    CHECK(l > prev);
    prev = l;
  }
  const double i2 = env.squared_integral();
  const double x = 1e-3;
  CHECK(rotation_angle(15.0, x, env) == doctest::Approx(15.0 * x * x * i2).epsilon(1e-5));
}

TEST_CASE("rotation angle equals minus the time integral of lambda_2") {
  for (double angle : {kPi / 2.0, kPi, 2.0 * kPi}) {
    const DriveConfig d = DriveConfig::for_rotation(angle, 1500.0, 0.01, 0.0, kPi / 4.0);
    const double l2 = numerics::adaptive_simpson(
        [&](double t) { return eigensystem_at(d, t).eigenvalues[1]; }, d.t_initial(),
        d.t_final(), 1e-12);
    CHECK(std::abs(-l2 - rotation_angle(d.chi(), d.x_max, d.envelope)) < 1e-9 * angle);
  }
}

TEST_CASE("solve_xmax inverts rotation_angle and depends only on chi / Lambda") {
  const PulseEnvelope env;
  const double x15 = solve_xmax(kPi, 15.0, env);
  CHECK(std::abs(rotation_angle(15.0, x15, env) - kPi) < 1e-8);
  const double small = std::sqrt(kPi / (15.0 * env.squared_integral()));
  CHECK(std::abs(x15 - small) / x15 < 0.10);

  for (double chi : {1.0, 3.7, 12.0, 29.0}) {
    CHECK(solve_xmax(kPi, chi, env) == solve_xmax(2.0 * kPi, 2.0 * chi, env));
    for (double angle : {0.1, kPi / 2.0, 2.0 * kPi}) {
      CHECK(std::abs(rotation_angle(chi, solve_xmax(angle, chi, env), env) - angle) < 1e-8);
    }
  }
  CHECK(solve_xmax(1e-12, 10.0, env) < 1e-5);
  CHECK(solve_xmax(1e-6, 10.0, env) < solve_xmax(1e-3, 10.0, env));
  CHECK_THROWS_AS(solve_xmax(0.0, 10.0, env), PreconditionError);
  CHECK_THROWS_AS(solve_xmax(kPi, -1.0, env), PreconditionError);
}

TEST_CASE("drive configuration") {
  const DriveConfig d = DriveConfig::for_rotation(kPi, 1500.0, 0.01, 0.0, kPi / 4.0);
  CHECK(d.chi() == doctest::Approx(15.0).epsilon(1e-14));
  CHECK(d.t_initial() == doctest::Approx(-0.03));
  CHECK(d.rabi(d.t_initial()) == 0.0);
  CHECK(d.rabi(0.0) == doctest::Approx(1500.0 * d.x_max));
  CHECK(d.rabi1(0.0) == doctest::Approx(d.rabi2(0.0)));
  CHECK_NOTHROW(d.rabi(d.t_final() * (1.0 + 1e-14)));

  DriveConfig bad = d;
  bad.beta = 2.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = d;
  bad.detuning = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  PhysicalUnits u;
  CHECK(u.energy_from_mev(1.0) * 0.01 == doctest::Approx(15.0));
}
