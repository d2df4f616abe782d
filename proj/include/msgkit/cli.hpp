#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "msgkit/analysis.hpp"
#include "msgkit/dynamics.hpp"
#include "msgkit/errors.hpp"
#include "msgkit/expansion.hpp"
#include "msgkit/fixed_points.hpp"
#include "msgkit/model.hpp"
#include "msgkit/static_solver.hpp"

namespace msgkit::cli {

inline constexpr const char* artifact_name = "msgkit";
inline constexpr const char* artifact_version = "0.1.0";

/// Shortest decimal form that parses back to exactly the same double.
[[nodiscard]] inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Parses plain decimals and pi multiples: "pi", "2pi", "0.5pi", "-pi", "1.25".
[[nodiscard]] inline double parse_angle(const std::string& text) {
  std::string s = text;
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
  const auto fail = [&text]() {
    throw std::invalid_argument("cannot parse '" + text +
                                "' as an angle; use a decimal or a pi multiple "
                                "such as pi, 2pi, 0.5pi, -pi");
  };
  if (s.empty()) fail();
  double sign = 1.0;
  std::size_t pos = 0;
  if (s[0] == '+' || s[0] == '-') {
    if (s[0] == '-') sign = -1.0;
    pos = 1;
  }
  const bool with_pi = s.size() >= pos + 2 && s.compare(s.size() - 2, 2, "pi") == 0;
  const std::string digits = s.substr(pos, s.size() - pos - (with_pi ? 2 : 0));
  double magnitude = 1.0;
  if (!digits.empty()) {
    const char* last = digits.data() + digits.size();
    const auto res = std::from_chars(digits.data(), last, magnitude);
    if (res.ec != std::errc() || res.ptr != last) fail();
  } else if (!with_pi) {
    fail();
  }
  return sign * magnitude * (with_pi ? pi : 1.0);
}

namespace detail {

inline void field(std::string& s, double v) { s += format_double(v); }
inline void field(std::string& s, int v) { s += std::to_string(v); }
inline void field(std::string& s, std::size_t v) { s += std::to_string(v); }
inline void field(std::string& s, bool v) { s += v ? "true" : "false"; }
inline void field(std::string& s, const char* v) { s += v; }
inline void field(std::string& s, const std::string& v) { s += v; }

template <class T, class... Rest>
inline void append_fields(std::string& s, const T& v, const Rest&... rest) {
  field(s, v);
  if constexpr (sizeof...(Rest) > 0) {
    s += ',';
    append_fields(s, rest...);
  }
}

template <class... Ts>
inline void csv_row(std::string& s, const Ts&... vs) {
  append_fields(s, vs...);
  s += '\n';
}

/// Resolved flags recorded in the metadata header; pasting them back as a
/// command line reproduces the run.
struct ArgList {
  std::vector<std::pair<std::string, std::string>> items;
  ArgList& add(std::string flag, std::string value) {
    items.emplace_back(std::move(flag), std::move(value));
    return *this;
  }
  ArgList& add(std::string flag, const char* value) {
    return add(std::move(flag), std::string(value));
  }
  ArgList& add(std::string flag, double v) {
    return add(std::move(flag), format_double(v));
  }
  ArgList& add(std::string flag, int v) {
    return add(std::move(flag), std::to_string(v));
  }
};

struct TableDoc {
  std::string subcommand;
  ArgList args;
  std::vector<std::string> notes;  ///< extra "key: value" metadata lines
  std::string columns;
  std::string body;
};

inline void write_table(std::ostream& os, const TableDoc& doc, double wall_seconds) {
  os << "# " << artifact_name << ' ' << artifact_version << '\n';
  os << "# subcommand: " << doc.subcommand << '\n';
  os << "# args:";
  for (const auto& [flag, value] : doc.args.items) {
    os << ' ' << flag;
    if (!value.empty()) os << ' ' << value;
  }
  os << '\n';
  for (const auto& note : doc.notes) os << "# " << note << '\n';
  os << "# wall_time_s: " << format_double(wall_seconds) << '\n';
  os << "# columns: " << doc.columns << '\n';
  os << doc.columns << '\n';
  os << doc.body;
}

inline void deliver_table(const TableDoc& doc, double wall_seconds,
                          const std::string& out_path, std::ostream& console) {
  if (out_path.empty()) {
    write_table(console, doc, wall_seconds);
    return;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw std::invalid_argument("cannot open output file: " + out_path);
  write_table(file, doc, wall_seconds);
}

class Stopwatch {
 public:
  [[nodiscard]] double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

/// Strided index-parallel loop; emission order is up to the caller, so results
/// land in per-index slots and stay ordered regardless of completion order.
template <class F>
inline void parallel_for(std::size_t count, int jobs, F&& body) {
  const std::size_t threads =
      std::min({static_cast<std::size_t>(std::max(jobs, 1)),
                count == 0 ? std::size_t{1} : count, std::size_t{256}});
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&body, count, threads, t] {
      for (std::size_t i = t; i < count; i += threads) body(i);
    });
  for (auto& th : pool) th.join();
}

inline void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

inline void validate_solver(const SolverConfig& cfg) {
  require(cfg.step > 0.0 && std::isfinite(cfg.step), "--step must be a positive real");
  require(cfg.x_max > 0.0 && std::isfinite(cfg.x_max), "--x-max must be a positive real");
  require(cfg.conservation_tol > 0.0, "--tol must be a positive real");
}

inline void add_solver_args(ArgList& a, const SolverConfig& cfg) {
  a.add("--step", cfg.step).add("--x-max", cfg.x_max).add("--tol", cfg.conservation_tol);
}

/// Launch slope for a phi(0) = pi trajectory at the requested pressure.
/// Pressures below -V(pi) admit no such launch and are a usage error.
[[nodiscard]] inline double slope_from_pressure(const ModelParams& p, double pressure) {
  const double vpi = potential(p, pi);
  if (!(pressure >= -vpi))
    throw std::invalid_argument(
        "P = " + format_double(pressure) + " is below every launch from phi = pi; "
        "valid pressures satisfy P > -V(pi) = " + format_double(-vpi) +
        " (periodic band (-V(pi), 0), separatrix at 0, step-like for P > 0)");
  return std::sqrt(std::max(2.0 * (pressure + vpi), 0.0));
}

struct PotentialOpts {
  int n = 1;
  double eps = 0.0;
  int samples = 401;
  std::string phi_min = "0";
  std::string phi_max = "2pi";
  std::string out_path;
};

inline void run_potential(const PotentialOpts& o, std::ostream& out, std::ostream&) {
  Stopwatch timer;
  const ModelParams params(o.n, o.eps);
  require(o.samples >= 2, "--samples must be >= 2");
  const double lo = parse_angle(o.phi_min);
  const double hi = parse_angle(o.phi_max);
  require(hi > lo, "--phi-max must exceed --phi-min");
  TableDoc doc;
  doc.subcommand = "potential";
  doc.args.add("--n", o.n).add("--eps", o.eps).add("--samples", o.samples);
  doc.args.add("--phi-min", lo).add("--phi-max", hi);
  if (!o.out_path.empty()) doc.args.add("--out", o.out_path);
  doc.columns = "phi,V,dV,d2V";
  for (int i = 0; i < o.samples; ++i) {
    const double phi = lo + (hi - lo) * i / (o.samples - 1);
    csv_row(doc.body, phi, potential(params, phi), potential_derivative(params, phi),
            potential_second_derivative(params, phi));
  }
  deliver_table(doc, timer.seconds(), o.out_path, out);
}

struct KinkOpts {
  int n = 1;
  double eps = 0.0;
  SolverConfig cfg;
  std::string out_path;
};

inline void run_kink(const KinkOpts& o, std::ostream& out, std::ostream& err) {
  Stopwatch timer;
  const ModelParams params(o.n, o.eps);
  validate_solver(o.cfg);
  const KinkProfile profile = kink_profile(params, o.cfg);
  TableDoc doc;
  doc.subcommand = "kink";
  doc.args.add("--n", o.n).add("--eps", o.eps);
  add_solver_args(doc.args, o.cfg);
  if (!o.out_path.empty()) doc.args.add("--out", o.out_path);
  doc.notes.push_back("energy: " + format_double(profile.energy));
  doc.notes.push_back("charge: " + std::to_string(profile.charge));
  doc.notes.push_back("subkinks: " + std::to_string(profile.subkinks));
  doc.columns = "x,phi,slope,rho,pressure";
  for (const FieldState& s : profile.states) {
    const StressSample t = stress(params, s);
    csv_row(doc.body, s.x, s.phi, s.slope, t.rho, t.pressure);
  }
  deliver_table(doc, timer.seconds(), o.out_path, out);
  std::ostream& summary = o.out_path.empty() ? err : out;
  summary << "energy=" << format_double(profile.energy) << " charge=" << profile.charge
          << " subkinks=" << profile.subkinks << '\n';
}

struct StaticOpts {
  int n = 1;
  double eps = 0.0;
  std::optional<double> p;
  std::optional<double> slope0;
  SolverConfig cfg;
  int stride = 1;
  std::string out_path;
};

inline void run_static(const StaticOpts& o, std::ostream& out, std::ostream&) {
  Stopwatch timer;
  const ModelParams params(o.n, o.eps);
  validate_solver(o.cfg);
  require(o.stride >= 1, "--stride must be >= 1");
  require(o.p.has_value() || o.slope0.has_value(),
          "one of --p or --slope0 is required to set the launch");
  const double slope0 = o.p ? slope_from_pressure(params, *o.p) : *o.slope0;
  const Trajectory traj = integrate(params, slope0, o.cfg);
  TableDoc doc;
  doc.subcommand = "static";
  doc.args.add("--n", o.n).add("--eps", o.eps);
  if (o.p)
    doc.args.add("--p", *o.p);
  else
    doc.args.add("--slope0", *o.slope0);
  add_solver_args(doc.args, o.cfg);
  doc.args.add("--stride", o.stride);
  if (!o.out_path.empty()) doc.args.add("--out", o.out_path);
  doc.notes.push_back("pressure: " + format_double(traj.pressure));
  doc.notes.push_back("slope0: " + format_double(slope0));
  doc.notes.push_back(std::string("classification: ") +
                      to_string(traj.classification.kind));
  doc.notes.push_back("subkinks: " +
                      (traj.classification.subkinks
                           ? std::to_string(*traj.classification.subkinks)
                           : std::string("undetermined")));
  doc.notes.push_back(std::string("mirrored: ") + (traj.mirrored ? "true" : "false"));
  doc.notes.push_back("max_drift: " + format_double(traj.max_drift));
  doc.columns = "x,phi,slope,rho,pressure";
  const std::size_t stride = static_cast<std::size_t>(o.stride);
  const std::size_t count = traj.states.size();
  for (std::size_t i = 0; i < count; i += stride) {
    const FieldState& s = traj.states[i];
    const StressSample t = stress(params, s);
    csv_row(doc.body, s.x, s.phi, s.slope, t.rho, t.pressure);
  }
  if (count != 0 && (count - 1) % stride != 0) {
    const FieldState& s = traj.states.back();
    const StressSample t = stress(params, s);
    csv_row(doc.body, s.x, s.phi, s.slope, t.rho, t.pressure);
  }
  deliver_table(doc, timer.seconds(), o.out_path, out);
}

struct ScanOpts {
  int n = 1;
  double eps = 0.0;
  double p_min = 0.0;
  double p_max = 0.0;
  int points = 200;
  int jobs = 1;
  std::string out_path;
};

[[nodiscard]] inline std::vector<double> pressure_grid(const ScanOpts& o) {
  require(std::isfinite(o.p_min) && std::isfinite(o.p_max),
          "--p-min and --p-max must be finite");
  require(o.p_min < o.p_max, "--p-min must lie strictly below --p-max");
  require(o.points >= 2, "--points must be >= 2");
  std::vector<double> grid(static_cast<std::size_t>(o.points));
  for (int i = 0; i < o.points; ++i)
    grid[static_cast<std::size_t>(i)] =
        o.p_min + (o.p_max - o.p_min) * i / (o.points - 1);
  return grid;
}

inline void scan_args(TableDoc& doc, const ScanOpts& o) {
  doc.args.add("--n", o.n).add("--eps", o.eps);
  doc.args.add("--p-min", o.p_min).add("--p-max", o.p_max);
  doc.args.add("--points", o.points).add("--jobs", o.jobs);
  if (!o.out_path.empty()) doc.args.add("--out", o.out_path);
}

inline void emit_skips(std::ostream& err, const std::vector<double>& grid,
                       const std::vector<std::string>& skips) {
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (!skips[i].empty())
      err << "skipped: P=" << format_double(grid[i]) << " (" << skips[i] << ")\n";
}

inline void run_scan_eos(const ScanOpts& o, std::ostream& out, std::ostream& err) {
  Stopwatch timer;
  const ModelParams params(o.n, o.eps);
  const std::vector<double> grid = pressure_grid(o);
  const double septol = pressure_split_tolerance(params);
  std::vector<std::optional<EosPoint>> pts(grid.size());
  std::vector<std::string> skips(grid.size());
  parallel_for(grid.size(), o.jobs, [&](std::size_t i) {
    try {
      pts[i] = grid[i] > septol ? mean_density_steplike(params, grid[i])
                                : mean_density(params, grid[i]);
    } catch (const RegimeError& e) {
      skips[i] = e.what();
    }
  });
  std::vector<EosPoint> ok;
  ok.reserve(grid.size());
  for (const auto& pt : pts)
    if (pt) ok.push_back(*pt);
  // compressibility chi = d(rho_bar)/dP, central differences on the surviving
  // grid, one-sided at the ends
  std::vector<double> chi(ok.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t j = 0; j < ok.size(); ++j) {
    const std::size_t lo = j == 0 ? j : j - 1;
    const std::size_t hi = j + 1 == ok.size() ? j : j + 1;
    if (hi > lo)
      chi[j] = (ok[hi].mean_density - ok[lo].mean_density) /
               (ok[hi].pressure - ok[lo].pressure);
  }
  TableDoc doc;
  doc.subcommand = "scan-eos";
  scan_args(doc, o);
  for (std::size_t j = 1; j < ok.size(); ++j)
    if (chi[j - 1] * chi[j] < 0.0)
      doc.notes.push_back("chi_zero_crossing: between P=" +
                          format_double(ok[j - 1].pressure) + " and P=" +
                          format_double(ok[j].pressure));
  doc.columns = "P,rho_bar,subkinks,chi";
  for (std::size_t j = 0; j < ok.size(); ++j)
    csv_row(doc.body, ok[j].pressure, ok[j].mean_density, ok[j].subkinks, chi[j]);
  deliver_table(doc, timer.seconds(), o.out_path, out);
  emit_skips(err, grid, skips);
}

inline void run_scan_energy(const ScanOpts& o, std::ostream& out, std::ostream& err) {
  Stopwatch timer;
  const ModelParams params(o.n, o.eps);
  const std::vector<double> grid = pressure_grid(o);
  std::vector<std::optional<EnergyPoint>> pts(grid.size());
  std::vector<std::string> skips(grid.size());
  parallel_for(grid.size(), o.jobs, [&](std::size_t i) {
    try {
      pts[i] = energy_per_soliton(params, grid[i]);
    } catch (const RegimeError& e) {
      skips[i] = e.what();
    }
  });
  TableDoc doc;
  doc.subcommand = "scan-energy";
  scan_args(doc, o);
  doc.columns = "P,E,L,subkinks";
  for (const auto& pt : pts)
    if (pt) csv_row(doc.body, pt->pressure, pt->energy, pt->spacing, pt->subkinks);
  deliver_table(doc, timer.seconds(), o.out_path, out);
  emit_skips(err, grid, skips);
}

struct PhaseOpts {
  int n = 1;
  double eps = 0.0;
  double p = 0.0;
  int samples = 512;
  std::string out_path;
};

inline void run_phase(const PhaseOpts& o, std::ostream& out, std::ostream&) {
  Stopwatch timer;
  const ModelParams params(o.n, o.eps);
  require(o.samples >= 2, "--samples must be >= 2");
  const std::vector<PhasePoint> loop = phase_portrait(params, o.p, o.samples);
  TableDoc doc;
  doc.subcommand = "phase";
  doc.args.add("--n", o.n).add("--eps", o.eps).add("--p", o.p);
  doc.args.add("--samples", o.samples);
  if (!o.out_path.empty()) doc.args.add("--out", o.out_path);
  doc.columns = "phi,slope";
  for (const PhasePoint& pt : loop) csv_row(doc.body, pt.phi, pt.slope);
  deliver_table(doc, timer.seconds(), o.out_path, out);
}

struct FixedPointsOpts {
  int n = 1;
  std::optional<double> eps;
  double eps_min = 0.0;
  double eps_max = 1.0;
  int points = 400;
  int jobs = 1;
  std::string out_path;
};

inline void run_fixed_points(const FixedPointsOpts& o, std::ostream& out,
                             std::ostream&) {
  Stopwatch timer;
  TableDoc doc;
  doc.subcommand = "fixed-points";
  doc.columns = "epsilon,phi,curvature,kind";
  if (o.eps) {
    const ModelParams params(o.n, *o.eps);
    doc.args.add("--n", o.n).add("--eps", *o.eps);
    if (!o.out_path.empty()) doc.args.add("--out", o.out_path);
    for (const FixedPoint& fp : find_fixed_points(params))
      csv_row(doc.body, *o.eps, fp.phi, fp.curvature, to_string(fp.kind));
  } else {
    require(o.n >= 1, "--n must be an integer >= 1");
    require(o.points >= 2, "--points must be >= 2");
    require(o.eps_min >= 0.0 && o.eps_max > o.eps_min,
            "the scan needs 0 <= --eps-min < --eps-max");
    doc.args.add("--n", o.n).add("--eps-min", o.eps_min).add("--eps-max", o.eps_max);
    doc.args.add("--points", o.points).add("--jobs", o.jobs);
    if (!o.out_path.empty()) doc.args.add("--out", o.out_path);
    std::vector<double> grid(static_cast<std::size_t>(o.points));
    for (int i = 0; i < o.points; ++i)
      grid[static_cast<std::size_t>(i)] =
          o.eps_min + (o.eps_max - o.eps_min) * i / (o.points - 1);
    std::vector<std::vector<FixedPoint>> rows(grid.size());
    parallel_for(grid.size(), o.jobs, [&](std::size_t i) {
      rows[i] = find_fixed_points(ModelParams(o.n, grid[i]));
    });
    for (std::size_t i = 0; i < grid.size(); ++i)
      for (const FixedPoint& fp : rows[i])
        csv_row(doc.body, grid[i], fp.phi, fp.curvature, to_string(fp.kind));
  }
  deliver_table(doc, timer.seconds(), o.out_path, out);
}

struct DispersionOpts {
  int n = 1;
  double eps = 0.0;
  std::string phi_n = "pi";
  std::optional<double> k;
  double k_min = 0.0;
  double k_max = 5.0;
  int points = 101;
  std::string out_path;
};

inline void run_dispersion(const DispersionOpts& o, std::ostream& out, std::ostream&) {
  Stopwatch timer;
  const ModelParams params(o.n, o.eps);
  const double phi_n = parse_angle(o.phi_n);
  TableDoc doc;
  doc.subcommand = "dispersion";
  doc.args.add("--n", o.n).add("--eps", o.eps).add("--phi-n", phi_n);
  std::vector<double> ks;
  if (o.k) {
    doc.args.add("--k", *o.k);
    ks.push_back(*o.k);
  } else {
    require(o.points >= 2, "--points must be >= 2");
    require(o.k_max > o.k_min, "--k-max must exceed --k-min");
    doc.args.add("--k-min", o.k_min).add("--k-max", o.k_max).add("--points", o.points);
    for (int i = 0; i < o.points; ++i)
      ks.push_back(o.k_min + (o.k_max - o.k_min) * i / (o.points - 1));
  }
  if (!o.out_path.empty()) doc.args.add("--out", o.out_path);
  const std::optional<double> lambda_c = critical_wavelength(params, phi_n);
  doc.notes.push_back("curvature: " +
                      format_double(potential_second_derivative(params, phi_n)));
  doc.notes.push_back("critical_wavelength: " +
                      (lambda_c ? format_double(*lambda_c) : std::string("none")));
  doc.columns = "k,omega_sq,stable";
  for (double k : ks) {
    const DispersionResult d = dispersion(params, phi_n, k);
    csv_row(doc.body, d.k, d.omega_sq, d.stable);
  }
  deliver_table(doc, timer.seconds(), o.out_path, out);
}

struct EvolveOpts {
  int n = 1;
  double eps = 0.0;
  std::string phi_n = "pi";
  double amplitude = 0.01;
  double k = 1.0;
  double amplitude2 = 0.0;
  double k2 = 0.0;
  std::string length = "4pi";
  double dx = 0.05;
  double dt = 0.02;
  int steps = 200;
  int stride = 10;
  std::string table = "snapshots";
  std::string out_path;
};

inline void run_evolve(const EvolveOpts& o, std::ostream& out, std::ostream&) {
  Stopwatch timer;
  const ModelParams params(o.n, o.eps);
  require(o.table == "snapshots" || o.table == "spectrum",
          "--table must be 'snapshots' or 'spectrum'");
  require(!(o.k2 != 0.0 && o.amplitude2 == 0.0),
          "--k2 has no effect without a nonzero --amplitude2");
  PerturbationSpec spec;
  spec.phi_n = parse_angle(o.phi_n);
  spec.amplitude = o.amplitude;
  spec.k = o.k;
  spec.amplitude2 = o.amplitude2;
  spec.k2 = o.k2;
  spec.domain_length = parse_angle(o.length);
  spec.dx = o.dx;
  spec.dt = o.dt;
  spec.steps = o.steps;
  spec.snapshot_stride = o.stride;
  const EvolutionRecord rec = evolve(params, spec);
  TableDoc doc;
  doc.subcommand = "evolve";
  doc.args.add("--n", o.n).add("--eps", o.eps).add("--phi-n", spec.phi_n);
  doc.args.add("--amplitude", spec.amplitude).add("--k", spec.k);
  if (spec.amplitude2 != 0.0) {
    doc.args.add("--amplitude2", spec.amplitude2).add("--k2", spec.k2);
  }
  doc.args.add("--length", spec.domain_length).add("--dx", spec.dx);
  doc.args.add("--dt", spec.dt).add("--steps", spec.steps);
  doc.args.add("--stride", spec.snapshot_stride).add("--table", o.table);
  if (!o.out_path.empty()) doc.args.add("--out", o.out_path);
  doc.notes.push_back("dx_effective: " + format_double(rec.dx_effective));
  doc.notes.push_back("k_effective: " + format_double(rec.k_effective));
  if (spec.amplitude2 != 0.0)
    doc.notes.push_back("k2_effective: " + format_double(rec.k2_effective));
  const double e0 = rec.energies.front();
  const double e1 = rec.energies.back();
  doc.notes.push_back("energy_initial: " + format_double(e0));
  doc.notes.push_back("energy_final: " + format_double(e1));
  doc.notes.push_back("energy_drift_rel: " +
                      format_double(std::abs(e1 - e0) /
                                    std::max(std::abs(e0), 1e-300)));
  if (o.table == "snapshots") {
    doc.columns = "t,x,phi";
    for (std::size_t si = 0; si < rec.times.size(); ++si)
      for (std::size_t i = 0; i < rec.x.size(); ++i)
        csv_row(doc.body, rec.times[si], rec.x[i], rec.snapshots[si][i]);
  } else {
    doc.columns = "t,k,amplitude";
    for (std::size_t si = 0; si < rec.times.size(); ++si)
      for (std::size_t j = 0; j < rec.wavenumbers.size(); ++j)
        csv_row(doc.body, rec.times[si], rec.wavenumbers[j],
                rec.mode_amplitudes[si][j]);
  }
  deliver_table(doc, timer.seconds(), o.out_path, out);
}

struct ExpandOpts {
  std::string shape = "triangle";
  double eps = 1.0;
  int terms = 8;
  std::string center = "pi";
  std::string width = "pi";
  std::string out_path;
};

inline void run_expand(const ExpandOpts& o, std::ostream& out, std::ostream&) {
  Stopwatch timer;
  require(o.terms >= 1, "--terms must be >= 1");
  TableDoc doc;
  doc.subcommand = "expand";
  doc.args.add("--shape", o.shape).add("--eps", o.eps).add("--terms", o.terms);
  PeriodicFunction f;
  if (o.shape == "triangle") {
    f = make_triangle_wave();
  } else if (o.shape == "raised-cosine") {
    const double center = parse_angle(o.center);
    const double width = parse_angle(o.width);
    doc.args.add("--center", center).add("--width", width);
    f = make_raised_cosine(center, width);
  } else {
    throw std::invalid_argument("--shape must be 'triangle' or 'raised-cosine'");
  }
  if (!o.out_path.empty()) doc.args.add("--out", o.out_path);
  const ExpansionResult res = expand_in_msg_basis(f, o.eps, o.terms);
  doc.notes.push_back("shape: " + o.shape);
  doc.notes.push_back("coeff_sum: " + format_double(res.coeff_sum));
  doc.notes.push_back("boundary_residual: " + format_double(res.boundary_residual));
  doc.notes.push_back(std::string("boundary_ok: ") +
                      (res.boundary_ok ? "true" : "false"));
  doc.notes.push_back(std::string("truncation_warning: ") +
                      (res.truncation_warning ? "true" : "false"));
  doc.notes.push_back("max_reconstruction_error: " +
                      format_double(res.max_reconstruction_error));
  doc.columns = "index,b,a";
  for (int i = 0; i <= o.terms; ++i)
    csv_row(doc.body, i, res.fourier_coeffs[static_cast<std::size_t>(i)],
            res.msg_coeffs[static_cast<std::size_t>(i)]);
  deliver_table(doc, timer.seconds(), o.out_path, out);
}

}  // namespace detail

/// Dispatches a full command line (without the program name). Returns 0 on
/// success, 1 on usage errors, 2 on numerical failures (conservation loss,
/// regime violations, blow-up, CFL, non-equilibrium base points).
[[nodiscard]] inline int run(const std::vector<std::string>& args, std::ostream& out,
                             std::ostream& err) {
  CLI::App app{"static structure, soliton chains and linear dynamics of "
               "multi-harmonic sine-Gordon scalar field theories",
               "msgkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(artifact_version));

  const char* help_n = "harmonic order N, integer >= 1";
  const char* help_eps = "N-th harmonic coupling, real >= 0";
  const char* help_out = "write the CSV to this file instead of stdout";

  auto po = std::make_shared<detail::PotentialOpts>();
  auto* c_pot = app.add_subcommand("potential",
                                   "sample V, dV/dphi and d2V/dphi2 on a phi grid");
  c_pot->add_option("--n", po->n, help_n)->required();
  c_pot->add_option("--eps", po->eps, help_eps)->required();
  c_pot->add_option("--samples", po->samples, "grid rows (default 401)");
  c_pot->add_option("--phi-min", po->phi_min, "grid start, accepts pi literals (default 0)");
  c_pot->add_option("--phi-max", po->phi_max, "grid end, accepts pi literals (default 2pi)");
  c_pot->add_option("--out", po->out_path, help_out);
  c_pot->callback([po, &out, &err] { detail::run_potential(*po, out, err); });

  auto ko = std::make_shared<detail::KinkOpts>();
  auto* c_kink = app.add_subcommand(
      "kink", "single-soliton profile on the separatrix, with energy and charge");
  c_kink->add_option("--n", ko->n, help_n)->required();
  c_kink->add_option("--eps", ko->eps, help_eps)->required();
  c_kink->add_option("--step", ko->cfg.step, "RK4 spatial step (default 0.001)");
  c_kink->add_option("--x-max", ko->cfg.x_max, "integration horizon (default 200)");
  c_kink->add_option("--tol", ko->cfg.conservation_tol,
                     "allowed first-integral drift (default 1e-6)");
  c_kink->add_option("--out", ko->out_path, help_out);
  c_kink->callback([ko, &out, &err] { detail::run_kink(*ko, out, err); });

  auto so = std::make_shared<detail::StaticOpts>();
  auto* c_static = app.add_subcommand(
      "static", "integrate the static field equation from phi(0) = pi");
  c_static->add_option("--n", so->n, help_n)->required();
  c_static->add_option("--eps", so->eps, help_eps)->required();
  auto* opt_p = c_static->add_option(
      "--p", so->p, "launch pressure; sets slope0 = sqrt(2 (P + V(pi)))");
  auto* opt_s = c_static->add_option("--slope0", so->slope0, "launch slope at x = 0");
  opt_p->excludes(opt_s);
  c_static->add_option("--step", so->cfg.step, "RK4 spatial step (default 0.001)");
  c_static->add_option("--x-max", so->cfg.x_max, "integration horizon (default 200)");
  c_static->add_option("--tol", so->cfg.conservation_tol,
                       "allowed first-integral drift (default 1e-6)");
  c_static->add_option("--stride", so->stride, "emit every k-th sample (default 1)");
  c_static->add_option("--out", so->out_path, help_out);
  c_static->callback([so, &out, &err] { detail::run_static(*so, out, err); });

  auto eo = std::make_shared<detail::ScanOpts>();
  auto* c_eos = app.add_subcommand(
      "scan-eos", "mean energy density vs pressure over a pressure grid");
  c_eos->add_option("--n", eo->n, help_n)->required();
  c_eos->add_option("--eps", eo->eps, help_eps)->required();
  c_eos->add_option("--p-min", eo->p_min, "grid start")->required();
  c_eos->add_option("--p-max", eo->p_max, "grid end")->required();
  c_eos->add_option("--points", eo->points, "grid size (default 200)");
  c_eos->add_option("--jobs", eo->jobs, "worker threads (default 1)");
  c_eos->add_option("--out", eo->out_path, help_out);
  c_eos->callback([eo, &out, &err] { detail::run_scan_eos(*eo, out, err); });

  auto go = std::make_shared<detail::ScanOpts>();
  auto* c_energy = app.add_subcommand(
      "scan-energy", "energy per soliton and chain spacing over a pressure grid");
  c_energy->add_option("--n", go->n, help_n)->required();
  c_energy->add_option("--eps", go->eps, help_eps)->required();
  c_energy->add_option("--p-min", go->p_min, "grid start")->required();
  c_energy->add_option("--p-max", go->p_max, "grid end")->required();
  c_energy->add_option("--points", go->points, "grid size (default 200)");
  c_energy->add_option("--jobs", go->jobs, "worker threads (default 1)");
  c_energy->add_option("--out", go->out_path, help_out);
  c_energy->callback([go, &out, &err] { detail::run_scan_energy(*go, out, err); });

  auto pho = std::make_shared<detail::PhaseOpts>();
  auto* c_phase = app.add_subcommand(
      "phase", "closed phase-space loop (phi, dphi/dx) of a periodic solution");
  c_phase->add_option("--n", pho->n, help_n)->required();
  c_phase->add_option("--eps", pho->eps, help_eps)->required();
  c_phase->add_option("--p", pho->p, "pressure inside the periodic band")->required();
  c_phase->add_option("--samples", pho->samples, "points per branch (default 512)");
  c_phase->add_option("--out", pho->out_path, help_out);
  c_phase->callback([pho, &out, &err] { detail::run_phase(*pho, out, err); });

  auto fo = std::make_shared<detail::FixedPointsOpts>();
  auto* c_fixed = app.add_subcommand(
      "fixed-points", "equilibria of the potential, single eps or an eps scan");
  c_fixed->add_option("--n", fo->n, help_n)->required();
  auto* opt_eps = c_fixed->add_option("--eps", fo->eps, "single coupling value");
  auto* opt_emin = c_fixed->add_option("--eps-min", fo->eps_min,
                                       "scan start (default 0)");
  auto* opt_emax = c_fixed->add_option("--eps-max", fo->eps_max,
                                       "scan end (default 1)");
  auto* opt_epts = c_fixed->add_option("--points", fo->points,
                                       "scan size (default 400)");
  opt_eps->excludes(opt_emin);
  opt_eps->excludes(opt_emax);
  opt_eps->excludes(opt_epts);
  c_fixed->add_option("--jobs", fo->jobs, "worker threads (default 1)");
  c_fixed->add_option("--out", fo->out_path, help_out);
  c_fixed->callback([fo, &out, &err] { detail::run_fixed_points(*fo, out, err); });

  auto dso = std::make_shared<detail::DispersionOpts>();
  auto* c_disp = app.add_subcommand(
      "dispersion", "small-oscillation omega^2(k) about an equilibrium");
  c_disp->add_option("--n", dso->n, help_n)->required();
  c_disp->add_option("--eps", dso->eps, help_eps)->required();
  c_disp->add_option("--phi-n", dso->phi_n,
                     "equilibrium, accepts pi literals (default pi)");
  auto* opt_k = c_disp->add_option("--k", dso->k, "single wave number");
  auto* opt_kmin = c_disp->add_option("--k-min", dso->k_min, "grid start (default 0)");
  auto* opt_kmax = c_disp->add_option("--k-max", dso->k_max, "grid end (default 5)");
  auto* opt_kpts = c_disp->add_option("--points", dso->points, "grid size (default 101)");
  opt_k->excludes(opt_kmin);
  opt_k->excludes(opt_kmax);
  opt_k->excludes(opt_kpts);
  c_disp->add_option("--out", dso->out_path, help_out);
  c_disp->callback([dso, &out, &err] { detail::run_dispersion(*dso, out, err); });

  auto vo = std::make_shared<detail::EvolveOpts>();
  auto* c_evolve = app.add_subcommand(
      "evolve", "leapfrog evolution of a cosine perturbation about an equilibrium");
  c_evolve->add_option("--n", vo->n, help_n)->required();
  c_evolve->add_option("--eps", vo->eps, help_eps)->required();
  c_evolve->add_option("--phi-n", vo->phi_n,
                       "base equilibrium, accepts pi literals (default pi)");
  c_evolve->add_option("--amplitude", vo->amplitude,
                       "perturbation amplitude, |A| <= 0.1 (default 0.01)");
  c_evolve->add_option("--k", vo->k, "perturbation wave number (default 1)");
  c_evolve->add_option("--amplitude2", vo->amplitude2,
                       "second superposed mode amplitude (default 0)");
  c_evolve->add_option("--k2", vo->k2, "second mode wave number (default 0)");
  c_evolve->add_option("--length", vo->length,
                       "periodic domain length, accepts pi literals (default 4pi)");
  c_evolve->add_option("--dx", vo->dx, "grid spacing (default 0.05)");
  c_evolve->add_option("--dt", vo->dt, "time step, must be <= 0.5 dx (default 0.02)");
  c_evolve->add_option("--steps", vo->steps, "number of time steps (default 200)");
  c_evolve->add_option("--stride", vo->stride, "snapshot cadence (default 10)");
  c_evolve->add_option("--table", vo->table,
                       "'snapshots' (t,x,phi) or 'spectrum' (t,k,amplitude)")
      ->check(CLI::IsMember({"snapshots", "spectrum"}));
  c_evolve->add_option("--out", vo->out_path, help_out);
  c_evolve->callback([vo, &out, &err] { detail::run_evolve(*vo, out, err); });

  auto xo = std::make_shared<detail::ExpandOpts>();
  auto* c_expand = app.add_subcommand(
      "expand", "expand a periodic shape in the potential's harmonic basis");
  c_expand->add_option("--shape", xo->shape, "'triangle' or 'raised-cosine'")
      ->check(CLI::IsMember({"triangle", "raised-cosine"}));
  c_expand->add_option("--eps", xo->eps, "basis coupling, real > 0 (default 1)");
  c_expand->add_option("--terms", xo->terms, "highest coefficient index M (default 8)");
  c_expand->add_option("--center", xo->center,
                       "raised-cosine center, accepts pi literals (default pi)");
  c_expand->add_option("--width", xo->width,
                       "raised-cosine support width (default pi)");
  c_expand->add_option("--out", xo->out_path, help_out);
  c_expand->callback([xo, &out, &err] { detail::run_expand(*xo, out, err); });

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back(artifact_name);
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(argv_store.size());
  for (const std::string& s : argv_store) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << artifact_version << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    err << "run '" << artifact_name << " --help' for the command list\n";
    return 1;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

[[nodiscard]] inline int run(int argc, const char* const* argv, std::ostream& out,
                             std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace msgkit::cli
