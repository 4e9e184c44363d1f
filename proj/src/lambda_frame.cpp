#include "raman/lambda_frame.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "raman/errors.hpp"
#include "raman/numerics.hpp"

namespace raman {

namespace {

constexpr double kQuadratureTol = 1e-10;
constexpr double kXmaxTol = 1e-12;

// 2^{-u^2}
double half_max_gaussian(double u) { return std::exp(-u * u * std::numbers::ln2); }

// sqrt(1 + y) - 1 without cancellation for small y.
double sqrt1p_minus1(double y) { return y / (std::sqrt(1.0 + y) + 1.0); }

// g(x) = integral of (sqrt(1 + 4 x^2 f^2) - 1) du
double excess_phase_integral(double x_max, const PulseEnvelope& env) {
  if (x_max == 0.0) return 0.0;
  const double x2 = 4.0 * x_max * x_max;
  auto integrand = [&](double u) {
    const double f = env.value(u);
    return sqrt1p_minus1(x2 * f * f);
  };
  return numerics::adaptive_simpson(integrand, env.lower(), env.upper(), kQuadratureTol);
}

}  // namespace

void PulseEnvelope::validate() const {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw ConfigError("envelope half_width must be positive and finite");
  }
}

double PulseEnvelope::value(double u) const {
  if (!(std::abs(u) <= half_width)) {
    throw OutOfRangeError("envelope evaluated outside [-u_b, u_b]");
  }
  const double edge = half_max_gaussian(half_width);
  return (half_max_gaussian(u) - edge) / (1.0 - edge);
}

double PulseEnvelope::derivative(double u) const {
  if (!(std::abs(u) <= half_width)) {
    throw OutOfRangeError("envelope derivative evaluated outside [-u_b, u_b]");
  }
  const double edge = half_max_gaussian(half_width);
  return -2.0 * u * std::numbers::ln2 * half_max_gaussian(u) / (1.0 - edge);
}

double PulseEnvelope::squared_integral() const {
  return numerics::adaptive_simpson(
      [this](double u) {
        const double f = value(u);
        return f * f;
      },
      lower(), upper(), kQuadratureTol);
}

std::string PulseEnvelope::describe() const {
  std::ostringstream os;
  os << "truncated_gaussian(g=2^-u^2;f=(g(u)-g(ub))/(1-g(ub));ub=" << half_width << ")";
  return os.str();
}

void DriveConfig::validate() const {
  envelope.validate();
  if (!(detuning > 0.0)) throw ConfigError("detuning must be positive");
  if (!(half_width > 0.0)) throw ConfigError("gate half-width tau must be positive");
  if (!(x_max >= 0.0) || !std::isfinite(x_max)) throw ConfigError("x_max must be >= 0");
  if (!(beta >= 0.0 && beta <= 0.5 * std::numbers::pi)) {
    throw ConfigError("beta must lie in [0, pi/2]");
  }
  if (!std::isfinite(alpha)) throw ConfigError("alpha must be finite");
}

double DriveConfig::rabi(double t) const {
  // Clamp rounding overshoot at the pulse edges; anything further out is an error.
  double u = t / half_width;
  const double ub = envelope.half_width;
  if (std::abs(u) > ub && std::abs(u) <= ub * (1.0 + 1e-12)) u = std::copysign(ub, u);
  return detuning * x_max * envelope.value(u);
}

double DriveConfig::rabi1(double t) const { return rabi(t) * std::cos(beta); }
double DriveConfig::rabi2(double t) const { return rabi(t) * std::sin(beta); }

double DriveConfig::z_max() const {
  const double peak = detuning * x_max;
  return std::sqrt(peak * peak + 0.25 * detuning * detuning);
}

DriveConfig DriveConfig::for_rotation(double angle, double detuning, double half_width,
                                      double alpha, double beta, PulseEnvelope envelope) {
  DriveConfig d;
  d.detuning = detuning;
  d.half_width = half_width;
  d.alpha = alpha;
  d.beta = beta;
  d.envelope = envelope;
  d.validate();
  d.x_max = solve_xmax(angle, d.chi(), envelope);
  return d;
}

Eigen::Matrix3cd hamiltonian(double rabi1, double rabi2, double detuning, double alpha) {
  const cdouble phase = std::polar(1.0, alpha);
  Eigen::Matrix3cd h = Eigen::Matrix3cd::Zero();
  h(0, 2) = rabi1 * phase;
  h(1, 2) = rabi2;
  h(2, 0) = rabi1 * std::conj(phase);
  h(2, 1) = rabi2;
  h(2, 2) = detuning;
  return h;
}

AdiabaticEigensystem eigensystem(double rabi1, double rabi2, double detuning, double alpha) {
  if (!(rabi1 >= 0.0 && rabi2 >= 0.0)) throw PreconditionError("Rabi frequencies must be >= 0");
  const double beta = (rabi1 == 0.0 && rabi2 == 0.0) ? 0.0 : std::atan2(rabi2, rabi1);
  return eigensystem_polar(std::hypot(rabi1, rabi2), beta, detuning, alpha);
}

AdiabaticEigensystem eigensystem_polar(double rabi, double beta, double detuning, double alpha) {
  if (!(detuning > 0.0)) throw PreconditionError("detuning must be positive");
  if (!(rabi >= 0.0)) throw PreconditionError("Rabi frequency must be >= 0");

  AdiabaticEigensystem es;
  es.rabi = rabi;
  es.alpha = alpha;
  es.beta = beta;
  es.z = std::sqrt(rabi * rabi + 0.25 * detuning * detuning);
  es.phi = 0.5 * std::atan2(2.0 * rabi, detuning);

  // lambda_2 = -2 Z sin^2(phi) = -(Z - Delta/2), written to avoid cancellation.
  const double lower = -rabi * rabi / (es.z + 0.5 * detuning);
  es.eigenvalues = {0.0, lower, detuning - lower};

  const cdouble phase = std::polar(1.0, alpha);
  const double cb = std::cos(beta), sb = std::sin(beta);
  const double cp = std::cos(es.phi), sp = std::sin(es.phi);
  es.eigenvectors[0] << -phase * sb, cb, 0.0;
  es.eigenvectors[1] << -phase * cb * cp, -sb * cp, sp;
  es.eigenvectors[2] << phase * cb * sp, sb * sp, cp;
  return es;
}

AdiabaticEigensystem eigensystem_at(const DriveConfig& drive, double t) {
  return eigensystem_polar(drive.rabi(t), drive.beta, drive.detuning, drive.alpha);
}

Eigen::Vector3d rotation_axis(double alpha, double beta) {
  const double s2b = std::sin(2.0 * beta);
  return {std::cos(alpha) * s2b, -std::sin(alpha) * s2b, std::cos(2.0 * beta)};
}

RotationSpec make_rotation(double angle, double alpha, double beta) {
  if (!(angle >= 0.0)) throw PreconditionError("rotation angle must be >= 0");
  return {angle, rotation_axis(alpha, beta)};
}

Eigen::Matrix2cd rotation_unitary(const RotationSpec& spec) {
  const cdouble i(0.0, 1.0);
  const Eigen::Vector3d& n = spec.axis;
  Eigen::Matrix2cd sigma_n;
  sigma_n << n.z(), cdouble(n.x(), -n.y()), cdouble(n.x(), n.y()), -n.z();
  const double half = 0.5 * spec.adiabatic_phase();
  return std::cos(half) * Eigen::Matrix2cd::Identity() - i * std::sin(half) * sigma_n;
}

double rotation_angle(double chi, double x_max, const PulseEnvelope& envelope) {
  if (!(chi > 0.0)) throw PreconditionError("chi must be positive");
  if (!(x_max >= 0.0)) throw PreconditionError("x_max must be >= 0");
  return 0.5 * chi * excess_phase_integral(x_max, envelope);
}

double solve_xmax(double angle, double chi, const PulseEnvelope& envelope) {
  if (!(angle > 0.0)) throw PreconditionError("rotation angle must be positive");
  if (!(chi > 0.0)) throw PreconditionError("chi must be positive");
  envelope.validate();

  // Only the ratio matters: x_max(L, chi) == x_max(2L, 2chi) bit for bit.
  const double target = 2.0 * angle / chi;
  auto residual = [&](double x) { return excess_phase_integral(x, envelope) - target; };

  // g(x) <= 2 x^2 I_2, so the small-drive estimate is a lower bound on the root.
  double x_hi = std::sqrt(0.5 * target / envelope.squared_integral());
  int doublings = 0;
  while (residual(x_hi) <= 0.0) {
    x_hi *= 2.0;
    if (++doublings > 200 || !std::isfinite(x_hi)) {
      throw NumericFailure("solve_xmax: could not bracket the root");
    }
  }
  return numerics::bisect(residual, 0.0, x_hi, kXmaxTol, 400);
}

}  // namespace raman
