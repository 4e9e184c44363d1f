#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "raman/lambda_frame.hpp"
#include "raman/lindblad.hpp"
#include "raman/nonadiabatic.hpp"

namespace raman {

/// Named-column numeric table plus the metadata needed to regenerate it.
struct SweepTable {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
  std::size_t column_index(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
  void set_meta(const std::string& key, const std::string& value);
  const std::string* meta(const std::string& key) const;
};

struct FitResult {
  enum class Model { kLinear, kLinearThroughOrigin, kInverse };
  Model model = Model::kLinear;
  double coefficient = 0.0;  // slope k, or c in c / x
  double intercept = 0.0;    // E0 for kLinear, otherwise 0
  double r_squared = 0.0;
  double max_residual = 0.0;  // absolute for linear models, relative for kInverse

  std::string describe() const;
};

/// Least squares y = intercept + k x.
FitResult fit_linear(std::span<const double> x, std::span<const double> y);
/// Least squares y = k x.
FitResult fit_linear_through_origin(std::span<const double> x, std::span<const double> y);
/// Least squares y = c / x.
FitResult fit_inverse(std::span<const double> x, std::span<const double> y);

struct SweepSettings {
  PulseEnvelope envelope{};
  AmplitudeSettings amplitudes{};
  double dt_factor = kDefaultDtFactor;
  BlochSampling sampling{};
  double lindblad_prefactor = 0.5;
  PhysicalUnits units{};
  double alpha = 0.0;
  double beta = 0.78539816339744831;  // pi/4, rotation about x
  unsigned threads = 1;
  bool enforce_regime = true;
  // Receives warnings when guards are overridden.
  std::function<void(const std::string&)> warn;
};

inline constexpr double kMinAdiabaticChi = 20.0;
inline constexpr double kChiGuardSlack = 0.01;
inline constexpr double kMaxPercentLevelEstimate = 0.05;

/// Integrator, envelope and unit settings as metadata entries.
std::vector<std::pair<std::string, std::string>> settings_metadata(const SweepSettings& s);

/// Evaluates fn(0..n-1) on up to `threads` workers; results keep input order.
std::vector<double> parallel_map(std::size_t n, unsigned threads,
                                 const std::function<double(std::size_t)>& fn);

SweepTable sweep_xmax_vs_chi(double angle, std::span<const double> chis,
                             const SweepSettings& settings = {});

/// Decay present: gate_error_mixed at fixed detuning with tau = chi / detuning.
struct ChiSweepDecay {
  double detuning = 0.0;  // ns^-1
  double gamma0 = 0.0;
  double gamma1 = 0.0;
};

SweepTable sweep_error_vs_chi(std::span<const double> angles, std::span<const double> chis,
                              const std::optional<ChiSweepDecay>& decay,
                              const SweepSettings& settings = {});

struct FittedSweep {
  SweepTable table;
  std::vector<FitResult> fits;   // one per outer parameter, in input order
  std::vector<double> floors;    // gamma = 0 error per detuning
};

/// Rows (Delta, gamma, E) for gamma0 = gamma1 = gamma/2, fits E = E0 + k gamma per Delta.
FittedSweep sweep_error_vs_gamma(std::span<const double> detunings, std::span<const double> gammas,
                                 double angle, double half_width,
                                 const SweepSettings& settings = {});

/// Rows (gamma, Delta, E), fits E = c / Delta per gamma.
FittedSweep sweep_error_vs_delta(std::span<const double> gammas, std::span<const double> detunings,
                                 double angle, double half_width,
                                 const SweepSettings& settings = {});

/// Rows (gamma, Delta, E, estimate Lambda gamma / Delta, ratio).
SweepTable ratio_grid(std::span<const double> gammas, std::span<const double> detunings,
                      double angle, double half_width, const SweepSettings& settings = {});

struct TraceScenario {
  DriveConfig drive;
  DecayConfig decay;
  Eigen::Vector3cd initial{1.0, 0.0, 0.0};
  double dt_factor = kDefaultDtFactor;
  int record_stride = 10;
};

std::vector<TraceRecord> trace_run(const TraceScenario& scenario);
SweepTable trace_table(const std::vector<TraceRecord>& records);

/// n points from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, int n);

}  // namespace raman

namespace raman {

/// 12 significant digits, the precision used for all emitted tables.
std::string format_number(double v);

}  // namespace raman
