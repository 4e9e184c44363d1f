#include "raman/cli.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>
#include <unistd.h>

#include <CLI11.hpp>

#include "raman/errors.hpp"
#include "raman/lindblad.hpp"
#include "raman/nonadiabatic.hpp"

namespace raman::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Parses a leading floating-point number; returns the remainder in `rest`.
std::optional<double> leading_number(std::string_view s, std::string_view& rest) {
  double v = 0.0;
  const auto* begin = s.data();
  const auto* end = s.data() + s.size();
  if (begin != end && *begin == '+') ++begin;
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{}) return std::nullopt;
  rest = std::string_view(res.ptr, static_cast<std::size_t>(end - res.ptr));
  return v;
}

double full_number(std::string_view s, std::string_view what) {
  std::string_view rest;
  const auto v = leading_number(trim(s), rest);
  if (!v || !trim(rest).empty()) {
    throw ConfigError("cannot parse " + std::string(what) + " '" + std::string(s) + "'");
  }
  return *v;
}

}  // namespace

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string_view item =
        trim(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start));
    if (item.empty()) throw ConfigError("empty item in list '" + std::string(text) + "'");
    out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_angle(std::string_view text) {
  const std::string_view s = trim(text);
  const std::size_t pi_pos = s.find("pi");
  if (pi_pos == std::string_view::npos) {
    std::string_view body = s;
    if (body.size() > 3 && body.substr(body.size() - 3) == "rad") body.remove_suffix(3);
    return full_number(body, "angle");
  }
  std::string_view coef = trim(s.substr(0, pi_pos));
  std::string_view tail = trim(s.substr(pi_pos + 2));
  if (!coef.empty() && coef.back() == '*') coef = trim(coef.substr(0, coef.size() - 1));
  double factor = 1.0;
  if (coef == "-") {
    factor = -1.0;
  } else if (!coef.empty()) {
    factor = full_number(coef, "angle coefficient");
  }
  if (!tail.empty()) {
    if (tail.front() != '/') throw ConfigError("cannot parse angle '" + std::string(text) + "'");
    const double denom = full_number(tail.substr(1), "angle denominator");
    if (denom == 0.0) throw ConfigError("angle denominator is zero");
    factor /= denom;
  }
  return factor * std::numbers::pi;
}

double parse_energy(std::string_view text, const PhysicalUnits& units) {
  std::string_view rest;
  const std::string_view s = trim(text);
  const auto v = leading_number(s, rest);
  if (!v) throw ConfigError("cannot parse energy '" + std::string(text) + "'");
  rest = trim(rest);
  if (rest.empty()) {
    if (*v == 0.0) return 0.0;
    throw ConfigError("energy '" + std::string(text) + "' needs a unit (meV or ns^-1)");
  }
  if (rest == "meV") return units.energy_from_mev(*v);
  if (rest == "ns^-1" || rest == "/ns" || rest == "1/ns") return *v;
  throw ConfigError("unknown energy unit in '" + std::string(text) + "'");
}

double parse_time(std::string_view text) {
  std::string_view rest;
  const std::string_view s = trim(text);
  const auto v = leading_number(s, rest);
  if (!v) throw ConfigError("cannot parse time '" + std::string(text) + "'");
  rest = trim(rest);
  if (rest == "ns") return *v;
  if (rest == "ps") return *v * 1e-3;
  if (rest.empty() && *v == 0.0) return 0.0;
  throw ConfigError("time '" + std::string(text) + "' needs a unit (ps or ns)");
}

void write_csv(const SweepTable& table, std::ostream& out) {
  for (const auto& [k, v] : table.metadata) out << "# " << k << '=' << v << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
}

namespace {

// Raw option strings; parsed after CLI11 so unit errors map to exit code 2.
struct Options {
  std::string angle = "pi";
  std::string angles = "pi";
  std::string alpha = "0";
  std::string beta = "pi/4";
  std::string delta;
  std::string tau;
  std::string chi;
  std::string gamma0 = "0";
  std::string gamma1 = "0";
  std::string prefactor = "0.5";
  double ub = 3.0;
  int steps_per_unit = 2000;
  double dt_factor = kDefaultDtFactor;
  int grid_theta = 17;
  int grid_phi = 32;
  bool no_refine = false;
  double mev_to_inv_ns = PhysicalUnits::kRounded;
  bool allow_out_of_regime = false;
  bool master = false;
  bool xmax_only = false;
  std::string initial = "0";
  int stride = 10;
  std::string output;

  double chi_min = 2.0, chi_max = 30.0;
  int chi_points = 16;
  std::string deltas = "1meV,2meV,4meV,8meV";
  std::string gammas = "2ns^-1,4ns^-1,6ns^-1";
  std::string gamma_min = "0", gamma_max = "10ns^-1";
  int gamma_points = 16;
  std::string delta_min = "1meV", delta_max = "8meV";
  int delta_points = 16;
};

void add_physics(CLI::App* sub, Options& o) {
  sub->add_option("--alpha", o.alpha, "relative laser phase (e.g. 0, pi/2)");
  sub->add_option("--beta", o.beta, "mixing angle in [0, pi/2]");
  sub->add_option("--gamma0", o.gamma0, "decay rate |X> -> |0> (ns^-1 or meV)");
  sub->add_option("--gamma1", o.gamma1, "decay rate |X> -> |1> (ns^-1 or meV)");
  sub->add_option("--prefactor", o.prefactor, "dissipator prefactor: 0.5 (standard) or 1");
}

void add_numerics(CLI::App* sub, Options& o) {
  sub->add_option("--ub", o.ub, "envelope truncation half-width in units of tau");
  sub->add_option("--steps-per-unit", o.steps_per_unit, "RK4 steps per unit u (amplitudes)");
  sub->add_option("--dt-factor", o.dt_factor, "master-equation step dt = factor / Z_max");
  sub->add_option("--grid-theta", o.grid_theta, "Bloch grid points in theta");
  sub->add_option("--grid-phi", o.grid_phi, "Bloch grid points in phi");
  sub->add_flag("--no-refine", o.no_refine, "skip Nelder-Mead refinement");
  sub->add_option("--mev-to-inv-ns", o.mev_to_inv_ns, "energy conversion (1500 or 1519.2674)");
  sub->add_option("-o,--output", o.output, "output CSV path (default stdout)");
}

unsigned thread_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("RAMAN_SIM_THREADS")) {
    const double cap = full_number(env, "RAMAN_SIM_THREADS");
    if (!(cap >= 1.0)) throw ConfigError("RAMAN_SIM_THREADS must be >= 1");
    n = std::min(n, static_cast<unsigned>(cap));
  }
  return n;
}

double parse_prefactor(const std::string& s) {
  if (s == "1/2") return 0.5;
  return full_number(s, "prefactor");
}

SweepSettings make_settings(const Options& o) {
  SweepSettings s;
  s.envelope.half_width = o.ub;
  s.envelope.validate();
  s.amplitudes.steps_per_unit = o.steps_per_unit;
  if (!(o.dt_factor > 0.0)) throw ConfigError("--dt-factor must be positive");
  s.dt_factor = o.dt_factor;
  s.sampling = {o.grid_theta, o.grid_phi, !o.no_refine};
  s.lindblad_prefactor = parse_prefactor(o.prefactor);
  DecayConfig{0.0, 0.0, s.lindblad_prefactor}.validate();
  if (!(o.mev_to_inv_ns > 0.0)) throw ConfigError("--mev-to-inv-ns must be positive");
  s.units.mev_to_inv_ns = o.mev_to_inv_ns;
  s.alpha = parse_angle(o.alpha);
  s.beta = parse_angle(o.beta);
  s.threads = thread_count();
  s.enforce_regime = !o.allow_out_of_regime;
  return s;
}

struct Timing {
  double detuning = 0.0;  // 0 when not given
  double half_width = 0.0;
  double chi = 0.0;
};

// Any two of --delta, --tau, --chi fix the third.
Timing resolve_timing(const Options& o, const PhysicalUnits& units, bool need_physical) {
  Timing t;
  if (!o.delta.empty()) t.detuning = parse_energy(o.delta, units);
  if (!o.tau.empty()) t.half_width = parse_time(o.tau);
  if (!o.chi.empty()) t.chi = full_number(o.chi, "chi");
  const int given = !o.delta.empty() + !o.tau.empty() + !o.chi.empty();
  if (given == 3) throw ConfigError("give at most two of --delta, --tau, --chi");
  if (!o.delta.empty() && !(t.detuning > 0.0)) throw ConfigError("--delta must be positive");
  if (!o.tau.empty() && !(t.half_width > 0.0)) throw ConfigError("--tau must be positive");
  if (!o.chi.empty() && !(t.chi > 0.0)) throw ConfigError("--chi must be positive");
  if (t.detuning > 0.0 && t.half_width > 0.0) t.chi = t.detuning * t.half_width;
  if (t.detuning > 0.0 && t.chi > 0.0 && t.half_width == 0.0) t.half_width = t.chi / t.detuning;
  if (t.half_width > 0.0 && t.chi > 0.0 && t.detuning == 0.0) t.detuning = t.chi / t.half_width;
  if (!(t.chi > 0.0)) throw ConfigError("need --chi, or --delta together with --tau");
  if (need_physical && !(t.detuning > 0.0 && t.half_width > 0.0)) {
    throw ConfigError("this command needs a physical drive: give two of --delta, --tau, --chi");
  }
  return t;
}

Eigen::Vector3cd parse_initial(const std::string& s) {
  const double r = std::numbers::sqrt2 / 2.0;
  if (s == "0") return {1.0, 0.0, 0.0};
  if (s == "1") return {0.0, 1.0, 0.0};
  if (s == "X" || s == "x") return {0.0, 0.0, 1.0};
  if (s == "+") return {r, r, 0.0};
  if (s == "-") return {r, -r, 0.0};
  if (s == "+i") return {r, cdouble(0.0, r), 0.0};
  if (s == "-i") return {r, cdouble(0.0, -r), 0.0};
  throw ConfigError("--initial must be one of 0, 1, X, +, -, +i, -i");
}

SweepTable cmd_frame(const Options& o, const SweepSettings& s) {
  const double angle = parse_angle(o.angle);
  const Timing t = resolve_timing(o, s.units, false);
  const double x_max = solve_xmax(angle, t.chi, s.envelope);
  const double i2 = s.envelope.squared_integral();
  const Eigen::Vector3d n = rotation_axis(s.alpha, s.beta);
  const double delta = t.detuning > 0.0 ? t.detuning : 1.0;
  const AdiabaticEigensystem es = eigensystem_polar(delta * x_max, s.beta, delta, s.alpha);

  SweepTable tab;
  tab.metadata.emplace_back("command_kind", "frame");
  for (auto& kv : settings_metadata(s)) tab.metadata.push_back(std::move(kv));
  if (t.detuning > 0.0) tab.set_meta("delta_inv_ns", format_number(t.detuning));
  tab.set_meta("eigen_units", t.detuning > 0.0 ? "ns^-1" : "Delta");
  tab.columns = {"angle",   "chi",         "x_max",     "x_max_small_drive", "rotation_check",
                 "n_x",     "n_y",         "n_z",       "i2",                "omega_peak",
                 "z_peak",  "phi_peak",    "lambda1",   "lambda2",           "lambda3"};
  tab.add_row({angle, t.chi, x_max, std::sqrt(angle / (t.chi * i2)),
               rotation_angle(t.chi, x_max, s.envelope), n.x(), n.y(), n.z(), i2, es.rabi, es.z,
               es.phi, es.eigenvalues[0], es.eigenvalues[1], es.eigenvalues[2]});
  return tab;
}

SweepTable cmd_gate(const Options& o, const SweepSettings& s) {
  const double angle = parse_angle(o.angle);
  const double g0 = parse_energy(o.gamma0, s.units);
  const double g1 = parse_energy(o.gamma1, s.units);
  const bool decays = g0 > 0.0 || g1 > 0.0 || o.master;
  const Timing t = resolve_timing(o, s.units, decays);

  SweepTable tab;
  tab.metadata.emplace_back("command_kind", "gate");
  for (auto& kv : settings_metadata(s)) tab.metadata.push_back(std::move(kv));
  if (!decays) {
    const double x_max = solve_xmax(angle, t.chi, s.envelope);
    const auto r = nonadiabatic_error(angle, t.chi, s.envelope, s.amplitudes);
    tab.set_meta("solver", "adiabatic_amplitudes");
    tab.columns = {"angle", "chi", "x_max", "error", "abs_c", "abs_d", "p_star"};
    tab.add_row({angle, t.chi, x_max, r.error, std::abs(r.transfer), std::abs(r.leakage),
                 r.p_star});
    return tab;
  }
  const DriveConfig drive =
      DriveConfig::for_rotation(angle, t.detuning, t.half_width, s.alpha, s.beta, s.envelope);
  const DecayConfig decay{g0, g1, s.lindblad_prefactor};
  decay.validate();
  const auto r =
      gate_error_mixed(drive, decay, make_rotation(angle, s.alpha, s.beta), s.sampling, s.dt_factor);
  const double est = estimate_spontaneous_error(angle, g0 + g1, t.detuning);
  tab.set_meta("solver", "master_equation");
  tab.columns = {"angle", "chi",   "delta_inv_ns", "tau_ns", "gamma0",    "gamma1", "x_max",
                 "error", "estimate", "ratio",     "theta_star", "phi_star"};
  tab.add_row({angle, t.chi, t.detuning, t.half_width, g0, g1, drive.x_max, r.error, est,
               est > 0.0 ? r.error / est : std::nan(""), r.theta, r.phi});
  return tab;
}

SweepTable cmd_trace(const Options& o, const SweepSettings& s) {
  const double angle = parse_angle(o.angle);
  const Timing t = resolve_timing(o, s.units, true);
  TraceScenario sc;
  sc.drive =
      DriveConfig::for_rotation(angle, t.detuning, t.half_width, s.alpha, s.beta, s.envelope);
  sc.decay = {parse_energy(o.gamma0, s.units), parse_energy(o.gamma1, s.units),
              s.lindblad_prefactor};
  sc.initial = parse_initial(o.initial);
  sc.dt_factor = s.dt_factor;
  sc.record_stride = o.stride;
  SweepTable tab = trace_table(trace_run(sc));
  for (auto& kv : settings_metadata(s)) tab.metadata.push_back(std::move(kv));
  tab.set_meta("angle", format_number(angle));
  tab.set_meta("delta_inv_ns", format_number(t.detuning));
  tab.set_meta("tau_ns", format_number(t.half_width));
  tab.set_meta("x_max", format_number(sc.drive.x_max));
  tab.set_meta("gamma0", format_number(sc.decay.gamma0));
  tab.set_meta("gamma1", format_number(sc.decay.gamma1));
  tab.set_meta("initial", o.initial);
  return tab;
}

SweepTable cmd_sweep_chi(const Options& o, const SweepSettings& s) {
  if (!(o.chi_min > 0.0 && o.chi_max > o.chi_min)) throw ConfigError("need 0 < chi-min < chi-max");
  const auto chis = linspace(o.chi_min, o.chi_max, o.chi_points);
  if (o.xmax_only) return sweep_xmax_vs_chi(parse_angle(o.angle), chis, s);
  const auto angles = parse_list(o.angles, parse_angle);
  const double g0 = parse_energy(o.gamma0, s.units);
  const double g1 = parse_energy(o.gamma1, s.units);
  std::optional<ChiSweepDecay> decay;
  if (g0 > 0.0 || g1 > 0.0 || o.master) {
    if (o.delta.empty()) throw ConfigError("sweep-chi with decay needs --delta");
    decay = ChiSweepDecay{parse_energy(o.delta, s.units), g0, g1};
  }
  return sweep_error_vs_chi(angles, chis, decay, s);
}

std::vector<double> energy_range(const std::string& lo, const std::string& hi, int n,
                                 const PhysicalUnits& units) {
  return linspace(parse_energy(lo, units), parse_energy(hi, units), n);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Raman single-qubit gate simulator"};
  app.require_subcommand(1, 1);

  auto* frame = app.add_subcommand("frame", "x_max, rotation axis and peak eigensystem");
  frame->add_option("--angle", o.angle, "rotation angle (e.g. pi, pi/2)");
  frame->add_option("--delta", o.delta, "detuning (meV or ns^-1)");
  frame->add_option("--tau", o.tau, "gate half-width (ps or ns)");
  frame->add_option("--chi", o.chi, "Delta * tau");
  add_physics(frame, o);
  add_numerics(frame, o);

  auto* gate = app.add_subcommand("gate", "single gate error evaluation");
  gate->add_option("--angle", o.angle, "rotation angle");
  gate->add_option("--delta", o.delta, "detuning (meV or ns^-1)");
  gate->add_option("--tau", o.tau, "gate half-width (ps or ns)");
  gate->add_option("--chi", o.chi, "Delta * tau");
  gate->add_flag("--master", o.master, "use the master equation even without decay");
  add_physics(gate, o);
  add_numerics(gate, o);

  auto* trace = app.add_subcommand("trace", "populations, purity and adiabatic populations vs t");
  trace->add_option("--angle", o.angle, "rotation angle");
  trace->add_option("--delta", o.delta, "detuning (meV or ns^-1)");
  trace->add_option("--tau", o.tau, "gate half-width (ps or ns)");
  trace->add_option("--chi", o.chi, "Delta * tau");
  trace->add_option("--initial", o.initial, "initial state: 0, 1, X, +, -, +i, -i");
  trace->add_option("--stride", o.stride, "record every N integrator steps");
  add_physics(trace, o);
  add_numerics(trace, o);

  auto* schi = app.add_subcommand("sweep-chi", "gate error (or x_max) as a function of chi");
  schi->add_option("--angles", o.angles, "comma separated rotation angles");
  schi->add_option("--angle", o.angle, "rotation angle for --xmax-only");
  schi->add_option("--chi-min", o.chi_min, "smallest chi");
  schi->add_option("--chi-max", o.chi_max, "largest chi");
  schi->add_option("--chi-points", o.chi_points, "number of chi values");
  schi->add_option("--delta", o.delta, "detuning for the decay case");
  schi->add_flag("--xmax-only", o.xmax_only, "tabulate x_max only");
  schi->add_flag("--master", o.master, "use the master equation even without decay");
  add_physics(schi, o);
  add_numerics(schi, o);

  auto* sgam = app.add_subcommand("sweep-gamma", "gate error vs total decay rate per detuning");
  sgam->add_option("--angle", o.angle, "rotation angle");
  sgam->add_option("--tau", o.tau, "gate half-width (default 13.3ps)");
  sgam->add_option("--deltas", o.deltas, "comma separated detunings");
  sgam->add_option("--gamma-min", o.gamma_min, "smallest total gamma");
  sgam->add_option("--gamma-max", o.gamma_max, "largest total gamma");
  sgam->add_option("--gamma-points", o.gamma_points, "number of gamma values");
  sgam->add_flag("--allow-out-of-regime", o.allow_out_of_regime, "warn instead of failing guards");
  add_physics(sgam, o);
  add_numerics(sgam, o);

  auto* sdel = app.add_subcommand("sweep-delta", "gate error vs detuning per decay rate");
  sdel->add_option("--angle", o.angle, "rotation angle");
  sdel->add_option("--tau", o.tau, "gate half-width (default 13.3ps)");
  sdel->add_option("--gammas", o.gammas, "comma separated total gammas");
  sdel->add_option("--delta-min", o.delta_min, "smallest detuning");
  sdel->add_option("--delta-max", o.delta_max, "largest detuning");
  sdel->add_option("--delta-points", o.delta_points, "number of detunings");
  sdel->add_flag("--allow-out-of-regime", o.allow_out_of_regime, "warn instead of failing guards");
  add_physics(sdel, o);
  add_numerics(sdel, o);

  auto* grid = app.add_subcommand("ratio-grid", "error / (Lambda gamma / Delta) over a grid");
  grid->add_option("--angle", o.angle, "rotation angle");
  grid->add_option("--tau", o.tau, "gate half-width (default 13.3ps)");
  grid->add_option("--gamma-min", o.gamma_min, "smallest total gamma");
  grid->add_option("--gamma-max", o.gamma_max, "largest total gamma");
  grid->add_option("--gamma-points", o.gamma_points, "number of gamma values");
  grid->add_option("--delta-min", o.delta_min, "smallest detuning");
  grid->add_option("--delta-max", o.delta_max, "largest detuning");
  grid->add_option("--delta-points", o.delta_points, "number of detunings");
  grid->add_flag("--allow-out-of-regime", o.allow_out_of_regime, "warn instead of failing guards");
  add_physics(grid, o);
  add_numerics(grid, o);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    SweepSettings s = make_settings(o);
    s.warn = [&err](const std::string& msg) { err << "warning: " << msg << '\n'; };

    SweepTable table;
    if (*frame) {
      table = cmd_frame(o, s);
    } else if (*gate) {
      table = cmd_gate(o, s);
    } else if (*trace) {
      table = cmd_trace(o, s);
    } else if (*schi) {
      table = cmd_sweep_chi(o, s);
    } else {
      const double angle = parse_angle(o.angle);
      const double tau = parse_time(o.tau.empty() ? "13.3ps" : o.tau);
      if (!(tau > 0.0)) throw ConfigError("--tau must be positive");
      if (*sgam) {
        const auto deltas = parse_list(o.deltas, [&](std::string_view v) {
          return parse_energy(v, s.units);
        });
        const auto gammas = energy_range(o.gamma_min, o.gamma_max, o.gamma_points, s.units);
        table = sweep_error_vs_gamma(deltas, gammas, angle, tau, s).table;
      } else if (*sdel) {
        const auto gammas = parse_list(o.gammas, [&](std::string_view v) {
          return parse_energy(v, s.units);
        });
        const auto deltas = energy_range(o.delta_min, o.delta_max, o.delta_points, s.units);
        table = sweep_error_vs_delta(gammas, deltas, angle, tau, s).table;
      } else {
        const auto gammas = energy_range(o.gamma_min, o.gamma_max, o.gamma_points, s.units);
        const auto deltas = energy_range(o.delta_min, o.delta_max, o.delta_points, s.units);
        table = ratio_grid(gammas, deltas, angle, tau, s);
      }
    }

    // Record how to regenerate this file; the output path is left out so the
    // content does not depend on where it is written.
    std::string command;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "-o" || args[i] == "--output") {
        ++i;
        continue;
      }
      if (args[i].rfind("--output=", 0) == 0) continue;
      command += (command.empty() ? "" : " ") + args[i];
    }
    SweepTable emitted;
    emitted.metadata = {{"tool", kToolName}, {"version", kToolVersion}, {"command", command}};
    for (auto& kv : table.metadata) {
      if (!emitted.meta(kv.first)) emitted.metadata.push_back(kv);
    }
    emitted.columns = std::move(table.columns);
    emitted.rows = std::move(table.rows);

    if (o.output.empty()) {
      write_csv(emitted, out);
      out.flush();
    } else {
      namespace fs = std::filesystem;
      const fs::path target(o.output);
      fs::path tmp = target;
      tmp += ".tmp." + std::to_string(::getpid());
      {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw ConfigError("cannot open output file " + tmp.string());
        write_csv(emitted, f);
        f.flush();
        if (!f) throw ConfigError("failed writing " + tmp.string());
      }
      std::error_code ec;
      fs::rename(tmp, target, ec);
      if (ec) {
        fs::remove(tmp);
        throw ConfigError("cannot move output into place: " + ec.message());
      }
    }
    return kOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericFailure& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumericFailure;
  }
}

}  // namespace raman::cli
