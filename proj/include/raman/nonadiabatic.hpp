#pragma once

#include "raman/lambda_frame.hpp"

namespace raman {

struct AmplitudeSettings {
  int steps_per_unit = 2000;  // RK4 steps per unit of u = t / tau
  bool allow_coarse = false;  // skip the phase-advance guard
};

/// Amplitudes of Phi_2 and Phi_3 in the adiabatic expansion at the end of the
/// pulse, starting from a2 = 1, a3 = 0. `phase` is S = integral of 2 Z tau du,
/// so that P_32 = exp(i S).
struct AdiabaticAmplitudes {
  cdouble a2{1.0, 0.0};
  cdouble a3{0.0, 0.0};
  double phase = 0.0;
  double max_norm_drift = 0.0;
  int steps = 0;
};

AdiabaticAmplitudes integrate_amplitudes(double chi, double x_max,
                                         const PulseEnvelope& envelope = {},
                                         const AmplitudeSettings& settings = {});

/// Worst case over initial qubit states of 1 - |<psi_ideal|psi(t_f)>|^2 for a
/// gate whose Phi_2 amplitude ends as c and leaks d into Phi_3.
struct GateErrorResult {
  double error = 0.0;
  cdouble transfer{1.0, 0.0};  // c = a2(t_f)
  cdouble leakage{0.0, 0.0};   // d = a3(t_f)
  double p_star = 0.0;         // worst-case initial |a2|^2
};

GateErrorResult gate_error_pure(cdouble c, cdouble d);

GateErrorResult nonadiabatic_error(double angle, double chi, const PulseEnvelope& envelope = {},
                                   const AmplitudeSettings& settings = {});

}  // namespace raman
