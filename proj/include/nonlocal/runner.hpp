#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nonlocal/analysis.hpp"
#include "nonlocal/config.hpp"
#include "nonlocal/csv.hpp"
#include "nonlocal/errors.hpp"
#include "nonlocal/kernels.hpp"
#include "nonlocal/parts_identity.hpp"
#include "nonlocal/seminorms.hpp"
#include "nonlocal/solver.hpp"

namespace nonlocal {

inline constexpr const char* library_version = "1.0.0";

// Process exit codes of the command-line front end.
enum run_status : int {
  run_success = 0,
  run_config_failure = 2,        // config unreadable, malformed, or invalid
  run_numerical_failure = 3,     // a computation could not be completed
  run_verification_failure = 4,  // a declared invariant failed beyond tolerance
};

// Command-line flag overrides; unset fields defer to the config file.
struct RunOverrides {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<double> tolerance;
};

// A fully resolved run: the chosen command, the parsed config, and the
// effective values of every overridable knob.
struct RunConfig {
  std::string command;
  ConfigFile file;
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 42;
  int threads = 1;
  double tolerance = 1e-3;
};

namespace detail {

// ---- Config-to-object builders. Throwing config_error here keeps every
// ---- value problem on the exit-2 path; numerical failures come later.

inline KernelSpec make_kernel(const ConfigFile& cfg) {
  const std::string family = get_string_or(cfg, "kernel", "family", "fractional");
  const double s = get_double(cfg, "kernel", "s");
  if (!(s > 0.0 && s < 1.0))
    throw config_error("[kernel] s must lie in (0,1)");
  try {
    if (family == "fractional") return frac_laplacian_kernel(s);
    if (family == "truncated")
      return truncated_kernel(s, get_double_or(cfg, "kernel", "cutoff", 2.0));
    if (family == "hoelder") return holder_coefficient_kernel(s);
  } catch (const error& e) {
    throw config_error(std::string("[kernel] invalid: ") + e.what());
  }
  throw config_error("[kernel] unknown family '" + family +
                     "' (expected fractional, truncated, or hoelder)");
}

inline Domain1D make_domain(const ConfigFile& cfg) {
  const double a = get_double(cfg, "domain", "a");
  const double b = get_double(cfg, "domain", "b");
  if (!(a < b)) throw config_error("[domain] requires a < b");
  return Domain1D::interval(a, b);
}

inline int mesh_cells(const ConfigFile& cfg) {
  const int cells = get_int_or(cfg, "domain", "mesh_size", 64);
  if (cells < 2) throw config_error("[domain] mesh_size must be at least 2");
  return cells;
}

struct SourceSpec {
  std::function<double(double)> f;
  std::vector<double> breaks;
  std::string describe;
};

inline SourceSpec make_source(const ConfigFile& cfg) {
  const std::string kind = get_string_or(cfg, "rhs", "kind", "constant");
  if (kind == "constant") {
    const double value = get_double_or(cfg, "rhs", "value", 1.0);
    return {[value](double) { return value; }, {},
            "constant " + format_double(value)};
  }
  if (kind == "singular") {
    const double expo = get_double(cfg, "rhs", "exponent");
    const double center = get_double_or(cfg, "rhs", "center", 0.0);
    // The load and source-norm quadratures need a square-integrable datum.
    if (!(expo > -0.5 && expo < 0.0))
      throw config_error("[rhs] singular exponent must lie in (-0.5, 0)");
    return {[expo, center](double x) {
              const double d = std::abs(x - center);
              return d > 0.0 ? std::pow(d, expo) : 0.0;
            },
            {center},
            "|x - " + format_double(center) + "|^" + format_double(expo)};
  }
  throw config_error("[rhs] unknown kind '" + kind +
                     "' (expected constant or singular)");
}

inline GridFunction make_subject(const ConfigFile& cfg) {
  const Domain1D dom = make_domain(cfg);
  const std::string builtin = get_string(cfg, "function", "builtin");
  const int cells = get_int_or(cfg, "function", "cells", 64);
  if (cells < 2) throw config_error("[function] cells must be at least 2");
  if (builtin == "gaussian")
    return GridFunction::analytic(dom, cells,
                                  [](double t) { return std::exp(-t * t); });
  if (builtin == "kink")
    return GridFunction::analytic(
        dom, cells, [](double t) { return std::max(t, 0.0); },
        std::vector<double>{0.0});
  if (builtin == "power") {
    const double expo = get_double_or(cfg, "function", "exponent", 0.5);
    if (!(expo > 0.0 && expo < 2.0))
      throw config_error("[function] power exponent must lie in (0,2)");
    return GridFunction::analytic(
        dom, cells,
        [expo](double t) { return t > 0.0 ? std::pow(t, expo) : 0.0; },
        std::vector<double>{0.0});
  }
  if (builtin == "bump")
    return GridFunction::analytic(
        dom, cells,
        [](double t) {
          const double w = 1.0 - t * t;
          return w > 0.0 ? w * w * w : 0.0;
        },
        std::vector<double>{-1.0, 1.0});
  throw config_error("[function] unknown builtin '" + builtin +
                     "' (expected gaussian, kink, power, or bump)");
}

inline WeakProblem make_problem(const ConfigFile& cfg) {
  const SourceSpec src = make_source(cfg);
  return WeakProblem{make_domain(cfg), make_kernel(cfg), src.f, src.breaks};
}

// ---- Command handlers. Each writes its artifacts into rc.out_dir, extends
// ---- the manifest, and returns run_success or run_verification_failure.

inline int cmd_seminorm(const RunConfig& rc, Manifest& man) {
  const GridFunction u = make_subject(rc.file);
  const double s = get_double(rc.file, "analysis", "smoothness");
  const double p = get_double_or(rc.file, "analysis", "p", 2.0);
  const int l = get_int_or(rc.file, "analysis", "order", 2);
  const double lambda = get_double_or(rc.file, "analysis", "lambda", p);
  if (!(s > 0.0)) throw config_error("[analysis] smoothness must be positive");
  if (!(static_cast<double>(l) > s))
    throw config_error("[analysis] order must exceed smoothness");
  if (!(p >= 1.0 && lambda >= 1.0))
    throw config_error("[analysis] p and lambda must be >= 1");

  const double diam = u.domain().length();
  CsvTable table({"name", "s", "p", "l", "lambda", "delta", "value",
                  "error_estimate"});
  if (s < 1.0) {
    const quad_result g = gagliardo_direct(u, s, p);
    table.cell("gagliardo").cell(s).cell(p).cell(1).cell(p).cell(diam)
        .cell(g.value).cell(g.error);
    table.end_row();
  }
  const double nik = nikolskii_seminorm(u, s, p, l);
  table.cell("nikolskii").cell(s).cell(p).cell(l).cell("inf")
      .cell(diam / l).cell(nik).cell(0.0);
  table.end_row();
  const quad_result bes = besov_seminorm(u, s, p, lambda, l);
  table.cell("besov").cell(s).cell(p).cell(l).cell(lambda).cell(diam / l)
      .cell(bes.value).cell(bes.error);
  table.end_row();
  table.write(rc.out_dir / "seminorms.csv");
  man.add("artifact", std::string("seminorms.csv"));
  return run_success;
}

inline int cmd_solve(const RunConfig& rc, Manifest& man) {
  const WeakProblem prob = make_problem(rc.file);
  const int cells = mesh_cells(rc.file);
  assembly_options opt;
  opt.cells = cells;
  opt.threads = rc.threads;
  const GridFunction u = solve_weak_problem(prob, opt);
  const Mesh1D mesh(prob.domain, cells);
  CsvTable table({"node_x", "value"});
  for (int i = 0; i <= cells; ++i) {
    const double x = mesh.node(i);
    table.cell(x).cell(u(x));
    table.end_row();
  }
  table.write(rc.out_dir / "solution.csv");
  man.add("artifact", std::string("solution.csv"));
  man.add("cells", cells);
  return run_success;
}

inline int cmd_caccioppoli(const RunConfig& rc, Manifest& man) {
  const WeakProblem prob = make_problem(rc.file);
  const int cells = mesh_cells(rc.file);
  const double x0 = get_double(rc.file, "analysis", "ball_center");
  const double r = get_double(rc.file, "analysis", "ball_radius");
  assembly_options opt;
  opt.cells = cells;
  opt.threads = rc.threads;
  const GridFunction u = solve_weak_problem(prob, opt);
  const CaccioppoliReport rep = caccioppoli_check(u, prob, x0, r);
  CsvTable table({"lhs", "norm_solution", "norm_tail", "norm_source", "ratio"});
  table.cell(rep.lhs).cell(rep.norm_solution).cell(rep.norm_tail)
      .cell(rep.norm_source).cell(rep.ratio);
  table.end_row();
  table.write(rc.out_dir / "caccioppoli.csv");
  man.add("artifact", std::string("caccioppoli.csv"));
  man.add("ball_center", x0);
  man.add("ball_radius", r);
  return run_success;
}

inline int cmd_fit_exponent(const RunConfig& rc, Manifest& man) {
  const GridFunction u = make_subject(rc.file);
  const double wa = get_double(rc.file, "analysis", "window_a");
  const double wb = get_double(rc.file, "analysis", "window_b");
  if (!(wa < wb)) throw config_error("[analysis] requires window_a < window_b");
  const double z_min = get_double(rc.file, "analysis", "z_min");
  const double z_max = get_double(rc.file, "analysis", "z_max");
  const int l = get_int_or(rc.file, "analysis", "order", 2);
  const double p = get_double_or(rc.file, "analysis", "p", 2.0);
  ExponentFit fit;
  try {
    fit = fit_regularity_exponent(u, Domain1D::interval(wa, wb), z_min, z_max,
                                  l, p);
  } catch (const window_too_narrow& e) {
    // Window geometry is part of the configuration, not a numerical accident.
    throw config_error(std::string("[analysis] window: ") + e.what());
  }
  CsvTable table({"slope", "intercept", "residual", "z_min", "z_max",
                  "samples"});
  table.cell(fit.slope).cell(fit.intercept).cell(fit.residual).cell(fit.z_min)
      .cell(fit.z_max).cell(fit.samples);
  table.end_row();
  table.write(rc.out_dir / "exponent_fit.csv");
  man.add("artifact", std::string("exponent_fit.csv"));
  man.add("slope", fit.slope);
  return run_success;
}

inline int cmd_counterexample(const RunConfig& rc, Manifest& man) {
  const double s = get_double(rc.file, "kernel", "s");
  if (!(s >= 0.5 && s < 1.0))
    throw config_error("[kernel] counterexample requires s in [0.5, 1)");
  std::vector<double> eps{0.25, 0.0625, 0.015625, 0.00390625};
  if (rc.file.has_key("analysis", "epsilons"))
    eps = get_double_list(rc.file, "analysis", "epsilons");
  CounterexampleReport rep;
  try {
    rep = counterexample_suite(s, eps);
  } catch (const invalid_parameter& e) {
    throw config_error(std::string("[analysis] epsilons: ") + e.what());
  }

  CsvTable energy({"eps", "energy", "lower_bound", "dominates"});
  for (const EnergyRow& row : rep.energy_table) {
    energy.cell(row.eps).cell(row.energy).cell(row.lower_bound)
        .cell(row.energy >= row.lower_bound);
    energy.end_row();
  }
  energy.write(rc.out_dir / "counterexample_energy.csv");
  man.add("artifact", std::string("counterexample_energy.csv"));

  bool residuals_ok = true;
  CsvTable res({"t", "residual", "within_tolerance"});
  for (const auto& [t, r] : rep.harmonicity_residuals) {
    const bool ok = std::abs(r) < rc.tolerance;
    residuals_ok = residuals_ok && ok;
    res.cell(t).cell(r).cell(ok);
    res.end_row();
  }
  res.write(rc.out_dir / "counterexample_residuals.csv");
  man.add("artifact", std::string("counterexample_residuals.csv"));

  man.add("s", rep.s);
  man.add("transverse_constant", rep.varpi);
  man.add("divergence_slope", rep.divergence_slope);
  man.add("log_divergence", rep.log_divergence);
  man.add("lower_bound_check", rep.lower_bound_check);
  man.add("residuals_within_tolerance", residuals_ok);
  return (rep.lower_bound_check && residuals_ok) ? run_success
                                                 : run_verification_failure;
}

inline int cmd_verify_kernel(const RunConfig& rc, Manifest& man) {
  const KernelSpec K = make_kernel(rc.file);
  const long samples = get_long_or(rc.file, "analysis", "samples", 100000);
  if (samples < 1) throw config_error("[analysis] samples must be positive");
  const bounds_report b = verify_bounds(K, samples, rc.seed);
  const holder_report h = verify_holder(K, samples, rc.seed + 1);

  CsvTable bt({"samples", "violations", "worst_short_low", "worst_short_high",
               "worst_tail", "symmetry_defect"});
  bt.cell(static_cast<long long>(b.samples))
      .cell(static_cast<long long>(b.violations)).cell(b.worst_short_low)
      .cell(b.worst_short_high).cell(b.worst_tail).cell(b.symmetry_defect);
  bt.end_row();
  bt.write(rc.out_dir / "kernel_bounds.csv");
  man.add("artifact", std::string("kernel_bounds.csv"));

  CsvTable ht({"samples", "violations", "gamma_estimate", "diverged"});
  ht.cell(static_cast<long long>(h.samples))
      .cell(static_cast<long long>(h.violations)).cell(h.gamma_estimate)
      .cell(h.diverged);
  ht.end_row();
  ht.write(rc.out_dir / "kernel_holder.csv");
  man.add("artifact", std::string("kernel_holder.csv"));

  man.add("kernel", K.name);
  man.add("bounds_violations", static_cast<long long>(b.violations));
  man.add("holder_violations", static_cast<long long>(h.violations));
  man.add("holder_diverged", h.diverged);
  const bool ok = b.violations == 0 && h.violations == 0 && !h.diverged &&
                  b.symmetry_defect <= 1e-12;
  return ok ? run_success : run_verification_failure;
}

inline int cmd_parts_identity(const RunConfig& rc, Manifest& man) {
  const KernelSpec K = make_kernel(rc.file);
  const double R = get_double_or(rc.file, "analysis", "radius", 0.5);
  const double z = get_double_or(rc.file, "analysis", "shift", 0.1);
  const double c = get_double_or(rc.file, "analysis", "center", 0.0);
  const int cells = get_int_or(rc.file, "analysis", "cells", 16);
  if (!(R > 0.0)) throw config_error("[analysis] radius must be positive");
  if (!(std::abs(z) < R))
    throw config_error("[analysis] shift magnitude must stay below radius");
  if (cells < 2) throw config_error("[analysis] cells must be at least 2");

  // Deterministic smooth bumps: the outer function spans three radii, the
  // test function stays well inside the core ball and is deliberately
  // asymmetric so no term vanishes by parity.
  const GridFunction u = GridFunction::sampled(
      Domain1D::interval(c - 3.0 * R, c + 3.0 * R), cells, [c, R](double x) {
        const double t = (x - c) / (3.0 * R);
        const double w = 1.0 - t * t;
        return w > 0.0 ? w * w * w : 0.0;
      });
  const GridFunction v = GridFunction::sampled(
      Domain1D::interval(c - 1.5 * R, c + 1.5 * R), cells, [c, R](double x) {
        const double t = (x - c) / (1.5 * R);
        const double w = 1.0 - t * t;
        return w > 0.0 ? w * w * (1.0 + 0.3 * t) : 0.0;
      });
  const parts_identity_report rep = parts_identity_check(u, v, K, z, R, c);

  CsvTable table({"lhs", "t1", "t2", "t3", "rhs", "gap", "error_estimate",
                  "consistent"});
  table.cell(rep.lhs).cell(rep.t1).cell(rep.t2).cell(rep.t3).cell(rep.rhs)
      .cell(rep.gap).cell(rep.error_estimate).cell(rep.consistent);
  table.end_row();
  table.write(rc.out_dir / "parts_identity.csv");
  man.add("artifact", std::string("parts_identity.csv"));
  man.add("gap", rep.gap);
  man.add("consistent", rep.consistent);
  return rep.consistent ? run_success : run_verification_failure;
}

}  // namespace detail

// Resolves the effective run parameters: explicit command-line overrides win
// over config values, which win over defaults.
inline RunConfig resolve_run(const std::string& command,
                             const std::string& config_path,
                             const RunOverrides& ov) {
  RunConfig rc;
  rc.command = command;
  rc.file = load_config(config_path);
  rc.out_dir = ov.out_dir ? *ov.out_dir
                          : get_string_or(rc.file, "output", "directory", "out");
  rc.seed = ov.seed ? *ov.seed
                    : static_cast<std::uint64_t>(
                          get_long_or(rc.file, "analysis", "seed", 42));
  rc.threads =
      ov.threads ? *ov.threads : get_int_or(rc.file, "analysis", "threads", 1);
  if (rc.threads < 1) throw config_error("threads must be at least 1");
  rc.tolerance = ov.tolerance
                     ? *ov.tolerance
                     : get_double_or(rc.file, "analysis", "tolerance", 1e-3);
  if (!(rc.tolerance > 0.0)) throw config_error("tolerance must be positive");
  return rc;
}

// Executes one resolved run: dispatches to the command handler, writes the
// manifest, and maps failures onto the documented exit codes.
inline int run(const RunConfig& rc, std::ostream& log) {
  try {
    std::error_code ec;
    std::filesystem::create_directories(rc.out_dir, ec);
    if (ec)
      throw config_error("cannot create output directory " +
                         rc.out_dir.string() + ": " + ec.message());

    Manifest man;
    man.add("command", rc.command);
    man.add("version", std::string(library_version));
    man.add("config_hash", fnv1a_hex(rc.file.raw));
    man.add("seed", static_cast<long long>(rc.seed));
    man.add("threads", rc.threads);
    man.add("tolerance", rc.tolerance);

    int code;
    if (rc.command == "seminorm")
      code = detail::cmd_seminorm(rc, man);
    else if (rc.command == "solve")
      code = detail::cmd_solve(rc, man);
    else if (rc.command == "caccioppoli")
      code = detail::cmd_caccioppoli(rc, man);
    else if (rc.command == "fit-exponent")
      code = detail::cmd_fit_exponent(rc, man);
    else if (rc.command == "counterexample")
      code = detail::cmd_counterexample(rc, man);
    else if (rc.command == "verify-kernel")
      code = detail::cmd_verify_kernel(rc, man);
    else if (rc.command == "parts-identity")
      code = detail::cmd_parts_identity(rc, man);
    else
      throw config_error("unknown command '" + rc.command + "'");

    man.add("status", code == run_success ? "ok" : "verification-failed");
    man.write(rc.out_dir / "manifest.txt");
    if (code != run_success)
      log << rc.command << ": a declared invariant failed beyond tolerance\n";
    return code;
  } catch (const config_error& e) {
    log << "config error: " << e.what() << "\n";
    return run_config_failure;
  } catch (const error& e) {
    log << "numerical failure: " << e.what() << "\n";
    return run_numerical_failure;
  } catch (const std::exception& e) {
    log << "numerical failure: " << e.what() << "\n";
    return run_numerical_failure;
  }
}

inline int run_command(const std::string& command,
                       const std::string& config_path, const RunOverrides& ov,
                       std::ostream& log) {
  try {
    return run(resolve_run(command, config_path, ov), log);
  } catch (const config_error& e) {
    log << "config error: " << e.what() << "\n";
    return run_config_failure;
  }
}

}  // namespace nonlocal
