#include "raman/nonadiabatic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "raman/errors.hpp"
#include "raman/numerics.hpp"

namespace raman {

namespace {

constexpr double kMaxPhasePerStep = 0.1;

// (a2, a3, S); S is real and kept in the real part of the last slot.
using AmplitudeState = Eigen::Vector3cd;

}  // namespace

AdiabaticAmplitudes integrate_amplitudes(double chi, double x_max, const PulseEnvelope& envelope,
                                         const AmplitudeSettings& settings) {
  if (!(chi > 0.0)) throw PreconditionError("chi must be positive");
  if (!(x_max >= 0.0)) throw PreconditionError("x_max must be >= 0");
  if (settings.steps_per_unit <= 0) throw ConfigError("steps_per_unit must be positive");
  envelope.validate();

  const double ub = envelope.half_width;
  const int n = static_cast<int>(std::ceil(2.0 * ub * settings.steps_per_unit));
  const double h = 2.0 * ub / n;
  const double x2 = 4.0 * x_max * x_max;

  const double peak_rate = chi * std::sqrt(1.0 + x2);
  if (!settings.allow_coarse && peak_rate * h > kMaxPhasePerStep) {
    std::ostringstream os;
    os << "integrate_amplitudes: phase advance per step " << peak_rate * h << " rad exceeds "
       << kMaxPhasePerStep << "; increase steps_per_unit";
    throw ResolutionError(os.str());
  }

  const cdouble i(0.0, 1.0);
  auto rhs = [&](double u, const AmplitudeState& y) {
    u = std::clamp(u, -ub, ub);
    const double f = envelope.value(u);
    const double df = envelope.derivative(u);
    const double denom = 1.0 + x2 * f * f;
    const double phi_dot = x_max * df / denom;
    const cdouble p32 = std::exp(i * y(2).real());
    AmplitudeState dy;
    dy(0) = phi_dot * y(1) * std::conj(p32);
    dy(1) = -phi_dot * y(0) * p32;
    dy(2) = chi * std::sqrt(denom);
    return dy;
  };

  AmplitudeState y(1.0, 0.0, 0.0);
  AdiabaticAmplitudes out;
  for (int k = 0; k < n; ++k) {
    const double u = -ub + k * h;
    y = numerics::rk4_step(rhs, u, y, h);
    y(2) = y(2).real();
    const double drift = std::abs(std::norm(y(0)) + std::norm(y(1)) - 1.0);
    out.max_norm_drift = std::max(out.max_norm_drift, drift);
  }
  out.a2 = y(0);
  out.a3 = y(1);
  out.phase = y(2).real();
  out.steps = n;
  return out;
}

GateErrorResult gate_error_pure(cdouble c, cdouble d) {
  const double norm = std::norm(c) + std::norm(d);
  if (!(std::abs(norm - 1.0) <= 1e-8)) {
    throw PreconditionError("gate_error_pure: |c|^2 + |d|^2 must equal 1");
  }
  GateErrorResult r;
  r.transfer = c;
  r.leakage = d;

  // F(p) = |1 + p w|^2 = 1 + 2 p Re w + p^2 |w|^2 with w = c - 1.
  const cdouble w = c - 1.0;
  const double w2 = std::norm(w);
  if (w2 == 0.0 || w.real() >= 0.0) {
    r.error = 0.0;
    r.p_star = 0.0;
    return r;
  }
  const double p = -w.real() / w2;
  if (p >= 1.0) {
    r.p_star = 1.0;
    r.error = -(2.0 * w.real() + w2);  // 1 - |c|^2
  } else {
    r.p_star = p;
    r.error = w.real() * w.real() / w2;
  }
  r.error = std::clamp(r.error, 0.0, 1.0);
  return r;
}

GateErrorResult nonadiabatic_error(double angle, double chi, const PulseEnvelope& envelope,
                                   const AmplitudeSettings& settings) {
  const double x_max = solve_xmax(angle, chi, envelope);
  const AdiabaticAmplitudes amps = integrate_amplitudes(chi, x_max, envelope, settings);
  // strip RK4 norm drift
  const double norm = std::sqrt(std::norm(amps.a2) + std::norm(amps.a3));
  return gate_error_pure(amps.a2 / norm, amps.a3 / norm);
}

}  // namespace raman
