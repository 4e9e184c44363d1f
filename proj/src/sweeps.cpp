#include "raman/sweeps.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "raman/errors.hpp"

namespace raman {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void SweepTable::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) {
    throw std::logic_error("SweepTable row width does not match the column count");
  }
  rows.push_back(std::move(row));
}

std::size_t SweepTable::column_index(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::out_of_range("no column named " + name);
  return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> SweepTable::column(const std::string& name) const {
  const std::size_t k = column_index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[k]);
  return out;
}

void SweepTable::set_meta(const std::string& key, const std::string& value) {
  for (auto& kv : metadata) {
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  }
  metadata.emplace_back(key, value);
}

const std::string* SweepTable::meta(const std::string& key) const {
  for (const auto& kv : metadata) {
    if (kv.first == key) return &kv.second;
  }
  return nullptr;
}

// ---------------------------------------------------------------- fits

namespace {

void check_fit_input(std::span<const double> x, std::span<const double> y, std::size_t min_n) {
  if (x.size() != y.size()) throw ConfigError("fit: x and y differ in length");
  if (x.size() < min_n) throw ConfigError("fit: not enough points");
}

double r_squared(std::span<const double> y, double ss_res) {
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double ss_tot = 0.0;
  for (double v : y) ss_tot += (v - mean) * (v - mean);
  if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : 0.0;
  return std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
}

}  // namespace

std::string FitResult::describe() const {
  std::ostringstream os;
  switch (model) {
    case Model::kLinear: os << "model=linear_with_floor"; break;
    case Model::kLinearThroughOrigin: os << "model=linear_through_origin"; break;
    case Model::kInverse: os << "model=inverse"; break;
  }
  os << ";coefficient=" << format_number(coefficient) << ";intercept=" << format_number(intercept)
     << ";r2=" << format_number(r_squared) << ";max_residual=" << format_number(max_residual);
  return os.str();
}

FitResult fit_linear(std::span<const double> x, std::span<const double> y) {
  check_fit_input(x, y, 2);
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw ConfigError("fit_linear: x values are all equal");
  FitResult r;
  r.model = FitResult::Model::kLinear;
  r.coefficient = sxy / sxx;
  r.intercept = my - r.coefficient * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double res = y[i] - (r.intercept + r.coefficient * x[i]);
    ss += res * res;
    r.max_residual = std::max(r.max_residual, std::abs(res));
  }
  r.r_squared = r_squared(y, ss);
  return r;
}

FitResult fit_linear_through_origin(std::span<const double> x, std::span<const double> y) {
  check_fit_input(x, y, 1);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  if (sxx == 0.0) throw ConfigError("fit_linear_through_origin: all x are zero");
  FitResult r;
  r.model = FitResult::Model::kLinearThroughOrigin;
  r.coefficient = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double res = y[i] - r.coefficient * x[i];
    ss += res * res;
    r.max_residual = std::max(r.max_residual, std::abs(res));
  }
  r.r_squared = r_squared(y, ss);
  return r;
}

FitResult fit_inverse(std::span<const double> x, std::span<const double> y) {
  check_fit_input(x, y, 1);
  double s_yx = 0.0, s_xx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) throw ConfigError("fit_inverse: x must be nonzero");
    s_yx += y[i] / x[i];
    s_xx += 1.0 / (x[i] * x[i]);
  }
  FitResult r;
  r.model = FitResult::Model::kInverse;
  r.coefficient = s_yx / s_xx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double model = r.coefficient / x[i];
    const double res = y[i] - model;
    ss += res * res;
    if (model != 0.0) r.max_residual = std::max(r.max_residual, std::abs(res / model));
  }
  r.r_squared = r_squared(y, ss);
  return r;
}

// ---------------------------------------------------------------- harness

std::vector<std::pair<std::string, std::string>> settings_metadata(const SweepSettings& s) {
  return {
      {"envelope", s.envelope.describe()},
      {"u_b", format_number(s.envelope.half_width)},
      {"steps_per_unit", std::to_string(s.amplitudes.steps_per_unit)},
      {"dt_factor", format_number(s.dt_factor)},
      {"bloch_grid", std::to_string(s.sampling.n_theta) + "x" + std::to_string(s.sampling.n_phi) +
                         (s.sampling.refine ? "+nelder_mead" : "")},
      {"prefactor", format_number(s.lindblad_prefactor)},
      {"mev_to_inv_ns", format_number(s.units.mev_to_inv_ns)},
      {"alpha", format_number(s.alpha)},
      {"beta", format_number(s.beta)},
      {"error_time", "light_off"},
      {"units", "energy=ns^-1;time=ns;hbar=1"},
  };
}

std::vector<double> parallel_map(std::size_t n, unsigned threads,
                                 const std::function<double(std::size_t)>& fn) {
  std::vector<double> out(n);
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

namespace {

void guard(bool ok, const std::string& what, const SweepSettings& s) {
  if (ok) return;
  if (s.enforce_regime) throw ConfigError(what);
  if (s.warn) s.warn("guard overridden: " + what);
}

void check_adiabatic_regime(double detuning, double half_width, const SweepSettings& s) {
  const double chi = detuning * half_width;
  std::ostringstream os;
  os << "chi = Delta*tau = " << format_number(chi) << " is below the adiabatic regime ("
     << kMinAdiabaticChi << ")";
  guard(chi >= kMinAdiabaticChi * (1.0 - kChiGuardSlack), os.str(), s);
}

void check_percent_level(double angle, double gamma, double detuning, const SweepSettings& s) {
  const double est = estimate_spontaneous_error(angle, gamma, detuning);
  std::ostringstream os;
  os << "estimated error " << format_number(est) << " exceeds the percent-level regime ("
     << kMaxPercentLevelEstimate << ")";
  guard(est <= kMaxPercentLevelEstimate, os.str(), s);
}

double mixed_error(double angle, double detuning, double half_width, double gamma0,
                   double gamma1, const SweepSettings& s) {
  const DriveConfig drive =
      DriveConfig::for_rotation(angle, detuning, half_width, s.alpha, s.beta, s.envelope);
  const DecayConfig decay{gamma0, gamma1, s.lindblad_prefactor};
  return gate_error_mixed(drive, decay, make_rotation(angle, s.alpha, s.beta), s.sampling,
                          s.dt_factor)
      .error;
}

void require_positive(std::span<const double> v, const char* what) {
  if (v.empty()) throw ConfigError(std::string(what) + " must not be empty");
  for (double x : v) {
    if (!(x > 0.0)) throw ConfigError(std::string(what) + " values must be positive");
  }
}

void require_nonnegative(std::span<const double> v, const char* what) {
  if (v.empty()) throw ConfigError(std::string(what) + " must not be empty");
  for (double x : v) {
    if (!(x >= 0.0)) throw ConfigError(std::string(what) + " values must be >= 0");
  }
}

SweepTable base_table(const SweepSettings& s, const std::string& kind) {
  SweepTable t;
  t.metadata.emplace_back("sweep", kind);
  for (auto& kv : settings_metadata(s)) t.metadata.push_back(std::move(kv));
  return t;
}

}  // namespace

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw ConfigError("linspace needs at least one point");
  if (n == 1) return {lo};
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  v.back() = hi;
  return v;
}

SweepTable sweep_xmax_vs_chi(double angle, std::span<const double> chis,
                             const SweepSettings& settings) {
  require_positive(chis, "chi range");
  for (std::size_t i = 1; i < chis.size(); ++i) {
    if (!(chis[i] > chis[i - 1])) throw ConfigError("chi range must be increasing");
  }
  SweepTable t = base_table(settings, "xmax_vs_chi");
  t.set_meta("angle", format_number(angle));
  t.columns = {"chi", "x_max"};
  const auto xs = parallel_map(chis.size(), settings.threads, [&](std::size_t i) {
    return solve_xmax(angle, chis[i], settings.envelope);
  });
  for (std::size_t i = 0; i < chis.size(); ++i) t.add_row({chis[i], xs[i]});
  return t;
}

SweepTable sweep_error_vs_chi(std::span<const double> angles, std::span<const double> chis,
                              const std::optional<ChiSweepDecay>& decay,
                              const SweepSettings& settings) {
  require_positive(angles, "angle list");
  require_positive(chis, "chi range");
  const std::size_t n = angles.size() * chis.size();
  auto angle_of = [&](std::size_t k) { return angles[k / chis.size()]; };
  auto chi_of = [&](std::size_t k) { return chis[k % chis.size()]; };

  const auto xs = parallel_map(n, settings.threads, [&](std::size_t k) {
    return solve_xmax(angle_of(k), chi_of(k), settings.envelope);
  });

  if (!decay) {
    SweepTable t = base_table(settings, "error_vs_chi");
    t.columns = {"angle", "chi", "x_max", "error", "abs_c", "abs_d", "p_star"};
    std::vector<GateErrorResult> res(n);
    parallel_map(n, settings.threads, [&](std::size_t k) {
      const auto amps =
          integrate_amplitudes(chi_of(k), xs[k], settings.envelope, settings.amplitudes);
      const double norm = std::sqrt(std::norm(amps.a2) + std::norm(amps.a3));
      res[k] = gate_error_pure(amps.a2 / norm, amps.a3 / norm);
      return res[k].error;
    });
    for (std::size_t k = 0; k < n; ++k) {
      t.add_row({angle_of(k), chi_of(k), xs[k], res[k].error, std::abs(res[k].transfer),
                 std::abs(res[k].leakage), res[k].p_star});
    }
    return t;
  }

  if (!(decay->detuning > 0.0)) throw ConfigError("detuning must be positive");
  SweepTable t = base_table(settings, "error_vs_chi_with_decay");
  t.set_meta("delta_inv_ns", format_number(decay->detuning));
  t.set_meta("gamma0", format_number(decay->gamma0));
  t.set_meta("gamma1", format_number(decay->gamma1));
  t.columns = {"angle", "chi", "tau_ns", "x_max", "error"};
  const auto errs = parallel_map(n, settings.threads, [&](std::size_t k) {
    const double tau = chi_of(k) / decay->detuning;
    return mixed_error(angle_of(k), decay->detuning, tau, decay->gamma0, decay->gamma1,
                       settings);
  });
  for (std::size_t k = 0; k < n; ++k) {
    t.add_row({angle_of(k), chi_of(k), chi_of(k) / decay->detuning, xs[k], errs[k]});
  }
  return t;
}

FittedSweep sweep_error_vs_gamma(std::span<const double> detunings, std::span<const double> gammas,
                                 double angle, double half_width, const SweepSettings& settings) {
  require_positive(detunings, "detuning list");
  require_nonnegative(gammas, "gamma range");
  for (double d : detunings) {
    check_adiabatic_regime(d, half_width, settings);
    for (double g : gammas) check_percent_level(angle, g, d, settings);
  }

  const std::size_t nd = detunings.size(), ng = gammas.size();
  const auto errs = parallel_map(nd * ng, settings.threads, [&](std::size_t k) {
    const double g = gammas[k % ng];
    return mixed_error(angle, detunings[k / ng], half_width, 0.5 * g, 0.5 * g, settings);
  });
  FittedSweep out;
  out.floors = parallel_map(nd, settings.threads, [&](std::size_t i) {
    return mixed_error(angle, detunings[i], half_width, 0.0, 0.0, settings);
  });

  SweepTable& t = out.table;
  t = base_table(settings, "error_vs_gamma");
  t.set_meta("angle", format_number(angle));
  t.set_meta("tau_ns", format_number(half_width));
  t.columns = {"delta_inv_ns", "delta_mev", "chi", "gamma", "error", "error_floor"};
  for (std::size_t i = 0; i < nd; ++i) {
    std::vector<double> ys(errs.begin() + static_cast<std::ptrdiff_t>(i * ng),
                           errs.begin() + static_cast<std::ptrdiff_t>((i + 1) * ng));
    for (std::size_t j = 0; j < ng; ++j) {
      t.add_row({detunings[i], settings.units.energy_to_mev(detunings[i]),
                 detunings[i] * half_width, gammas[j], ys[j], out.floors[i]});
    }
    const FitResult fit = ng >= 2 ? fit_linear(gammas, ys) : FitResult{};
    t.set_meta("fit[delta_inv_ns=" + format_number(detunings[i]) + "]", fit.describe());
    out.fits.push_back(fit);
  }
  return out;
}

FittedSweep sweep_error_vs_delta(std::span<const double> gammas, std::span<const double> detunings,
                                 double angle, double half_width, const SweepSettings& settings) {
  require_nonnegative(gammas, "gamma list");
  require_positive(detunings, "detuning range");
  for (double d : detunings) {
    check_adiabatic_regime(d, half_width, settings);
    for (double g : gammas) check_percent_level(angle, g, d, settings);
  }

  const std::size_t ng = gammas.size(), nd = detunings.size();
  const auto errs = parallel_map(ng * nd, settings.threads, [&](std::size_t k) {
    const double g = gammas[k / nd];
    return mixed_error(angle, detunings[k % nd], half_width, 0.5 * g, 0.5 * g, settings);
  });
  FittedSweep out;
  out.floors = parallel_map(nd, settings.threads, [&](std::size_t i) {
    return mixed_error(angle, detunings[i], half_width, 0.0, 0.0, settings);
  });

  SweepTable& t = out.table;
  t = base_table(settings, "error_vs_delta");
  t.set_meta("angle", format_number(angle));
  t.set_meta("tau_ns", format_number(half_width));
  t.columns = {"gamma", "delta_inv_ns", "delta_mev", "chi", "error", "error_floor",
               "excess_times_delta_mev"};
  for (std::size_t i = 0; i < ng; ++i) {
    std::vector<double> ys(errs.begin() + static_cast<std::ptrdiff_t>(i * nd),
                           errs.begin() + static_cast<std::ptrdiff_t>((i + 1) * nd));
    for (std::size_t j = 0; j < nd; ++j) {
      const double mev = settings.units.energy_to_mev(detunings[j]);
      t.add_row({gammas[i], detunings[j], mev, detunings[j] * half_width, ys[j], out.floors[j],
                 (ys[j] - out.floors[j]) * mev});
    }
    const FitResult fit = fit_inverse(detunings, ys);
    t.set_meta("fit[gamma=" + format_number(gammas[i]) + "]", fit.describe());
    out.fits.push_back(fit);
  }
  return out;
}

SweepTable ratio_grid(std::span<const double> gammas, std::span<const double> detunings,
                      double angle, double half_width, const SweepSettings& settings) {
  require_nonnegative(gammas, "gamma range");
  require_positive(detunings, "detuning range");
  for (double d : detunings) {
    check_adiabatic_regime(d, half_width, settings);
    for (double g : gammas) check_percent_level(angle, g, d, settings);
  }
  const std::size_t ng = gammas.size(), nd = detunings.size();
  const auto errs = parallel_map(ng * nd, settings.threads, [&](std::size_t k) {
    const double g = gammas[k / nd];
    return mixed_error(angle, detunings[k % nd], half_width, 0.5 * g, 0.5 * g, settings);
  });
  const auto floors = parallel_map(nd, settings.threads, [&](std::size_t j) {
    return mixed_error(angle, detunings[j], half_width, 0.0, 0.0, settings);
  });

  SweepTable t = base_table(settings, "ratio_grid");
  t.set_meta("angle", format_number(angle));
  t.set_meta("tau_ns", format_number(half_width));
  t.set_meta("floor_dominated", "1 when the gamma=0 error exceeds 10% of E or the estimate is 0");
  t.columns = {"gamma",    "delta_inv_ns", "delta_mev", "chi",  "error",
               "error_floor", "estimate", "ratio",  "floor_dominated"};
  for (std::size_t i = 0; i < ng; ++i) {
    for (std::size_t j = 0; j < nd; ++j) {
      const double e = errs[i * nd + j];
      const double est = estimate_spontaneous_error(angle, gammas[i], detunings[j]);
      const double ratio = est > 0.0 ? e / est : std::numeric_limits<double>::quiet_NaN();
      const bool floor_dom = est == 0.0 || floors[j] > 0.1 * e;
      t.add_row({gammas[i], detunings[j], settings.units.energy_to_mev(detunings[j]),
                 detunings[j] * half_width, e, floors[j], est, ratio, floor_dom ? 1.0 : 0.0});
    }
  }
  return t;
}

std::vector<TraceRecord> trace_run(const TraceScenario& scenario) {
  if (scenario.record_stride <= 0) throw ConfigError("record_stride must be positive");
  const DensityMatrix3 rho0 = DensityMatrix3::from_pure(scenario.initial);
  const double dt = default_time_step(scenario.drive, scenario.dt_factor);
  return propagate_master(rho0, scenario.drive, scenario.decay, dt, scenario.record_stride)
      .records;
}

SweepTable trace_table(const std::vector<TraceRecord>& records) {
  SweepTable t;
  t.metadata.emplace_back("sweep", "trace");
  t.columns = {"t_ns", "rho00", "rho11", "rho_xx", "purity", "p1", "p2", "p3"};
  for (const auto& r : records) {
    t.add_row({r.t, r.rho00, r.rho11, r.rho_xx, r.purity, r.adiabatic[0], r.adiabatic[1],
               r.adiabatic[2]});
  }
  return t;
}

}  // namespace raman
