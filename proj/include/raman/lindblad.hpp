#pragma once

#include <array>
#include <vector>

#include "raman/lambda_frame.hpp"

namespace raman {

struct DecayConfig;
struct MasterResult;

/// 3x3 density matrix in the basis (|0>, |1>, |X>).
class DensityMatrix3 {
 public:
  DensityMatrix3();  // |0><0|

  /// Validates hermiticity (1e-12), unit trace (1e-10) and positivity (-1e-10).
  static DensityMatrix3 from_matrix(const Eigen::Matrix3cd& m);
  /// Normalises `psi` and forms |psi><psi|.
  static DensityMatrix3 from_pure(const Eigen::Vector3cd& psi);
  /// a|0> + b|1> with a = cos(theta/2), b = e^{i phi} sin(theta/2).
  static DensityMatrix3 from_bloch(double theta, double phi);

  const Eigen::Matrix3cd& matrix() const { return m_; }
  double population(int k) const { return m_(k, k).real(); }
  double trace() const { return m_.trace().real(); }

 private:
  struct Unchecked {};
  DensityMatrix3(const Eigen::Matrix3cd& m, Unchecked) : m_(m) {}
  friend MasterResult propagate_master(const DensityMatrix3&, const DriveConfig&,
                                       const DecayConfig&, double, int);

  Eigen::Matrix3cd m_;
};

struct DecayConfig {
  double gamma0 = 0.0;  // |X> -> |0> [ns^-1]
  double gamma1 = 0.0;  // |X> -> |1> [ns^-1]
  // Scales the dissipator sum_i (2 L rho L+ - {L+ L, rho}). 1/2 gives the
  // standard Lindblad form (|X> decays at gamma0 + gamma1); 1 is the form with
  // the explicit factor 2 taken literally (|X> decays at twice that rate).
  double lindblad_prefactor = 0.5;

  void validate() const;
  double total() const { return gamma0 + gamma1; }
  static DecayConfig symmetric(double total_gamma, double prefactor = 0.5) {
    return {0.5 * total_gamma, 0.5 * total_gamma, prefactor};
  }
};

struct TraceRecord {
  double t = 0.0;
  double rho00 = 0.0;
  double rho11 = 0.0;
  double rho_xx = 0.0;
  double purity = 1.0;
  std::array<double, 3> adiabatic{};  // P_1, P_2, P_3
};

struct MasterResult {
  DensityMatrix3 final_state;
  std::vector<TraceRecord> records;
  double max_trace_drift = 0.0;
  int steps = 0;
};

inline constexpr double kDefaultDtFactor = 0.02;

/// dt = factor / Z_max.
double default_time_step(const DriveConfig& drive, double factor = kDefaultDtFactor);

/// Right-hand side of the master equation for a given Hamiltonian.
Eigen::Matrix3cd master_rhs(const Eigen::Matrix3cd& h, const Eigen::Matrix3cd& rho,
                            const DecayConfig& decay);

/// RK4 integration of the master equation over [t_i, t_f]. Records are taken
/// every `record_stride` steps plus the endpoints; 0 disables recording.
MasterResult propagate_master(const DensityMatrix3& rho0, const DriveConfig& drive,
                              const DecayConfig& decay, double dt, int record_stride = 0);

double purity(const DensityMatrix3& rho);

/// <Phi_k(t)|rho|Phi_k(t)> for k = 1..3.
std::array<double, 3> adiabatic_populations(const DensityMatrix3& rho, const DriveConfig& drive,
                                            double t);

struct BlochSampling {
  int n_theta = 17;  // includes both poles
  int n_phi = 32;
  bool refine = true;
};

struct MixedGateError {
  double error = 0.0;
  double grid_error = 0.0;  // best value on the grid alone
  double theta = 0.0;       // worst-case initial state
  double phi = 0.0;
};

/// max over a|0> + b|1> of 1 - <psi_ideal|rho(t_f)|psi_ideal>, psi_ideal = U psi.
MixedGateError gate_error_mixed(const DriveConfig& drive, const DecayConfig& decay,
                                const RotationSpec& target, const BlochSampling& sampling = {},
                                double dt_factor = kDefaultDtFactor);

/// Transferred-population estimate Lambda * gamma / Delta.
double estimate_spontaneous_error(double angle, double gamma, double detuning);

}  // namespace raman
