#pragma once

#include <array>
#include <complex>
#include <string>

#include <Eigen/Dense>

namespace raman {

using cdouble = std::complex<double>;

/// Truncated Gaussian pulse shape in units of the gate half-width tau.
///
/// f(u) = (g(u) - g(u_b)) / (1 - g(u_b)) with g(u) = 2^{-u^2}, so f(0) = 1,
/// f(+-1) is close to 1/2 and f(+-u_b) = 0 exactly.
struct PulseEnvelope {
  double half_width = 3.0;  // u_b

  void validate() const;
  double lower() const { return -half_width; }
  double upper() const { return half_width; }

  /// Throws OutOfRangeError outside [-u_b, u_b].
  double value(double u) const;
  double derivative(double u) const;

  /// Integral of f^2 over the full support.
  double squared_integral() const;

  std::string describe() const;
};

/// Conversion between meV and angular frequency in ns^-1 (hbar = 1).
struct PhysicalUnits {
  static constexpr double kRounded = 1500.0;
  static constexpr double kPhysical = 1519.2674;

  double mev_to_inv_ns = kRounded;

  double energy_from_mev(double mev) const { return mev * mev_to_inv_ns; }
  double energy_to_mev(double inv_ns) const { return inv_ns / mev_to_inv_ns; }
};

/// Full physical parameterisation of one Raman gate.
struct DriveConfig {
  double detuning = 1.0;    // Delta [ns^-1]
  double half_width = 1.0;  // tau [ns]
  double alpha = 0.0;       // relative laser phase [rad]
  double beta = 0.0;        // mixing angle, atan(Omega2/Omega1) [rad]
  double x_max = 0.0;       // peak Omega/Delta
  PulseEnvelope envelope{};

  void validate() const;

  double chi() const { return detuning * half_width; }
  double t_initial() const { return envelope.lower() * half_width; }
  double t_final() const { return envelope.upper() * half_width; }

  /// Omega(t) = Delta * x_max * f(t / tau).
  double rabi(double t) const;
  double rabi1(double t) const;
  double rabi2(double t) const;
  /// Z at the envelope peak.
  double z_max() const;

  /// Drive whose x_max realises rotation angle `angle` for chi = detuning * half_width.
  static DriveConfig for_rotation(double angle, double detuning, double half_width,
                                  double alpha, double beta, PulseEnvelope envelope = {});
};

struct AdiabaticEigensystem {
  double rabi = 0.0;   // Omega
  double z = 0.0;      // Z = sqrt(Omega^2 + Delta^2/4)
  double phi = 0.0;    // (1/2) atan(2 Omega / Delta)
  double alpha = 0.0;
  double beta = 0.0;
  std::array<double, 3> eigenvalues{};
  std::array<Eigen::Vector3cd, 3> eigenvectors{};
};

/// Interaction-picture Hamiltonian in the basis (|0>, |1>, |X>).
Eigen::Matrix3cd hamiltonian(double rabi1, double rabi2, double detuning, double alpha);

/// Closed-form eigensystem. beta is taken as atan2(rabi2, rabi1), which is 0
/// when both Rabi frequencies vanish.
AdiabaticEigensystem eigensystem(double rabi1, double rabi2, double detuning, double alpha);

/// Same, with the mixing angle supplied directly. Used along a pulse, where
/// beta is a fixed property of the drive and must not be recomputed from
/// instantaneous (possibly zero) Rabi frequencies.
AdiabaticEigensystem eigensystem_polar(double rabi, double beta, double detuning, double alpha);

/// Eigensystem of the drive at physical time t.
AdiabaticEigensystem eigensystem_at(const DriveConfig& drive, double t);

struct RotationSpec {
  double angle = 0.0;          // Lambda >= 0
  Eigen::Vector3d axis{0.0, 0.0, 1.0};

  /// Lambda_2 = integral of lambda_2, which is <= 0.
  double adiabatic_phase() const { return -angle; }
};

Eigen::Vector3d rotation_axis(double alpha, double beta);
RotationSpec make_rotation(double angle, double alpha, double beta);

/// U = exp(-(i/2) Lambda_2 sigma.n) on the qubit subspace.
Eigen::Matrix2cd rotation_unitary(const RotationSpec& spec);

/// Lambda = (chi/2) * integral of (sqrt(1 + 4 x^2 f^2) - 1) du.
double rotation_angle(double chi, double x_max, const PulseEnvelope& envelope = {});

/// Inverse of rotation_angle in x_max at fixed chi.
double solve_xmax(double angle, double chi, const PulseEnvelope& envelope = {});

}  // namespace raman
