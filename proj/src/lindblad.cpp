#include "raman/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "raman/errors.hpp"
#include "raman/numerics.hpp"

namespace raman {

namespace {

constexpr double kMaxPhasePerStep = 0.02;  // dt * Z_max
constexpr double kTraceDriftLimit = 1e-8;

constexpr int kX = 2;

}  // namespace

DensityMatrix3::DensityMatrix3() : m_(Eigen::Matrix3cd::Zero()) { m_(0, 0) = 1.0; }

DensityMatrix3 DensityMatrix3::from_matrix(const Eigen::Matrix3cd& m) {
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
    throw PreconditionError("density matrix is not Hermitian");
  }
  if (std::abs(m.trace() - 1.0) > 1e-10) {
    throw PreconditionError("density matrix trace differs from 1");
  }
  const Eigen::Matrix3cd herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(herm, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10) {
    throw PreconditionError("density matrix is not positive semidefinite");
  }
  return DensityMatrix3(herm, Unchecked{});
}

DensityMatrix3 DensityMatrix3::from_pure(const Eigen::Vector3cd& psi) {
  const double n = psi.norm();
  if (!(n > 0.0)) throw PreconditionError("state vector must be nonzero");
  const Eigen::Vector3cd v = psi / n;
  return DensityMatrix3(v * v.adjoint(), Unchecked{});
}

DensityMatrix3 DensityMatrix3::from_bloch(double theta, double phi) {
  Eigen::Vector3cd psi(std::cos(0.5 * theta), std::polar(std::sin(0.5 * theta), phi), 0.0);
  return from_pure(psi);
}

void DecayConfig::validate() const {
  if (!(gamma0 >= 0.0 && gamma1 >= 0.0)) throw ConfigError("decay rates must be >= 0");
  if (lindblad_prefactor != 0.5 && lindblad_prefactor != 1.0) {
    throw ConfigError("lindblad_prefactor must be 1/2 or 1");
  }
}

double default_time_step(const DriveConfig& drive, double factor) {
  return factor / drive.z_max();
}

Eigen::Matrix3cd master_rhs(const Eigen::Matrix3cd& h, const Eigen::Matrix3cd& rho,
                            const DecayConfig& decay) {
  const cdouble i(0.0, 1.0);
  Eigen::Matrix3cd out = -i * (h * rho - rho * h);

  // L_k = sqrt(gamma_k) |k><X|:  L rho L+ = gamma_k rho_XX |k><k|,  L+ L = gamma_k |X><X|.
  const double k = decay.lindblad_prefactor;
  const double g = decay.total();
  if (g == 0.0) return out;
  const cdouble pxx = rho(kX, kX);
  out(0, 0) += 2.0 * k * decay.gamma0 * pxx;
  out(1, 1) += 2.0 * k * decay.gamma1 * pxx;
  for (int j = 0; j < 3; ++j) {
    out(kX, j) -= k * g * rho(kX, j);
    out(j, kX) -= k * g * rho(j, kX);
  }
  return out;
}

MasterResult propagate_master(const DensityMatrix3& rho0, const DriveConfig& drive,
                              const DecayConfig& decay, double dt, int record_stride) {
  drive.validate();
  decay.validate();
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  if (dt * drive.z_max() > kMaxPhasePerStep * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "propagate_master: dt * Z_max = " << dt * drive.z_max() << " exceeds "
       << kMaxPhasePerStep;
    throw ResolutionError(os.str());
  }
  if (record_stride < 0) throw ConfigError("record_stride must be >= 0");

  const double t0 = drive.t_initial();
  const double t1 = drive.t_final();
  const int n = static_cast<int>(std::ceil((t1 - t0) / dt));
  const double h = (t1 - t0) / n;

  auto hamiltonian_at = [&](double t) {
    return hamiltonian(drive.rabi1(t), drive.rabi2(t), drive.detuning, drive.alpha);
  };
  auto rhs = [&](double t, const Eigen::Matrix3cd& rho) {
    return master_rhs(hamiltonian_at(t), rho, decay);
  };

  MasterResult out;
  Eigen::Matrix3cd rho = rho0.matrix();
  const double trace0 = rho.trace().real();

  auto record = [&](double t) {
    const DensityMatrix3 cur(rho, DensityMatrix3::Unchecked{});
    TraceRecord r;
    r.t = t;
    r.rho00 = cur.population(0);
    r.rho11 = cur.population(1);
    r.rho_xx = cur.population(2);
    r.purity = purity(cur);
    r.adiabatic = adiabatic_populations(cur, drive, t);
    out.records.push_back(r);
  };

  if (record_stride > 0) record(t0);
  for (int k = 0; k < n; ++k) {
    const double t = t0 + k * h;
    rho = numerics::rk4_step(rhs, t, rho, h);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    const double drift = std::abs(rho.trace().real() - trace0);
    out.max_trace_drift = std::max(out.max_trace_drift, drift);
    if (drift > kTraceDriftLimit) {
      throw NumericFailure("propagate_master: trace drift exceeds 1e-8");
    }
    if (record_stride > 0 && ((k + 1) % record_stride == 0 || k + 1 == n)) {
      record(k + 1 == n ? t1 : t0 + (k + 1) * h);
    }
  }
  out.final_state = DensityMatrix3(rho, DensityMatrix3::Unchecked{});
  out.steps = n;
  return out;
}

double purity(const DensityMatrix3& rho) { return (rho.matrix() * rho.matrix()).trace().real(); }

std::array<double, 3> adiabatic_populations(const DensityMatrix3& rho, const DriveConfig& drive,
                                            double t) {
  const AdiabaticEigensystem es = eigensystem_at(drive, t);
  std::array<double, 3> p{};
  for (int k = 0; k < 3; ++k) {
    const Eigen::Vector3cd& v = es.eigenvectors[k];
    p[k] = (v.adjoint() * rho.matrix() * v)(0, 0).real();
  }
  return p;
}

MixedGateError gate_error_mixed(const DriveConfig& drive, const DecayConfig& decay,
                                const RotationSpec& target, const BlochSampling& sampling,
                                double dt_factor) {
  if (sampling.n_theta < 2 || sampling.n_phi < 1) {
    throw ConfigError("Bloch grid needs n_theta >= 2 and n_phi >= 1");
  }
  const double dt = default_time_step(drive, dt_factor);

  // The map rho(t_i) -> rho(t_f) is linear; four projectors span the qubit block.
  const double s = std::numbers::sqrt2 / 2.0;
  const std::array<Eigen::Vector3cd, 4> probes = {
      Eigen::Vector3cd(1.0, 0.0, 0.0), Eigen::Vector3cd(0.0, 1.0, 0.0),
      Eigen::Vector3cd(s, s, 0.0), Eigen::Vector3cd(s, cdouble(0.0, s), 0.0)};
  std::array<Eigen::Matrix3cd, 4> out;
  for (std::size_t k = 0; k < probes.size(); ++k) {
    out[k] = propagate_master(DensityMatrix3::from_pure(probes[k]), drive, decay, dt)
                 .final_state.matrix();
  }
  // rho_in = (I + r.sigma)/2  ->  rho_f = m0 + r_x mx + r_y my + r_z mz
  const Eigen::Matrix3cd m0 = 0.5 * (out[0] + out[1]);
  const Eigen::Matrix3cd mx = out[2] - m0;
  const Eigen::Matrix3cd my = out[3] - m0;
  const Eigen::Matrix3cd mz = 0.5 * (out[0] - out[1]);

  const Eigen::Matrix2cd u = rotation_unitary(target);
  auto fidelity = [&](const std::array<double, 2>& p) {
    const double theta = p[0], phi = p[1];
    const double st = std::sin(theta);
    const Eigen::Matrix3cd rho = m0 + (st * std::cos(phi)) * mx + (st * std::sin(phi)) * my +
                                 std::cos(theta) * mz;
    const Eigen::Vector2cd psi(std::cos(0.5 * theta), std::polar(std::sin(0.5 * theta), phi));
    const Eigen::Vector2cd ideal2 = u * psi;
    const Eigen::Vector3cd ideal(ideal2(0), ideal2(1), 0.0);
    return (ideal.adjoint() * rho * ideal)(0, 0).real();
  };

  MixedGateError best;
  double best_f = 2.0;
  const double dtheta = std::numbers::pi / (sampling.n_theta - 1);
  const double dphi = 2.0 * std::numbers::pi / sampling.n_phi;
  for (int i = 0; i < sampling.n_theta; ++i) {
    for (int j = 0; j < sampling.n_phi; ++j) {
      const std::array<double, 2> p = {i * dtheta, j * dphi};
      const double f = fidelity(p);
      if (f < best_f) {
        best_f = f;
        best.theta = p[0];
        best.phi = p[1];
      }
    }
  }
  best.grid_error = 1.0 - best_f;
  best.error = best.grid_error;
  if (sampling.refine) {
    const auto nm = numerics::nelder_mead_2d(fidelity, {best.theta, best.phi}, 0.5 * dtheta);
    if (nm.value < best_f) {
      best.error = 1.0 - nm.value;
      best.theta = nm.point[0];
      best.phi = nm.point[1];
    }
  }
  return best;
}

double estimate_spontaneous_error(double angle, double gamma, double detuning) {
  if (!(angle >= 0.0 && gamma >= 0.0)) {
    throw PreconditionError("estimate needs angle >= 0 and gamma >= 0");
  }
  if (!(detuning > 0.0)) throw PreconditionError("estimate needs detuning > 0");
  return angle * gamma / detuning;
}

}  // namespace raman
