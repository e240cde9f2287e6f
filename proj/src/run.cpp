#include "lsda/run.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <fmt/format.h>

#include "lsda/error.hpp"
#include "lsda/output.hpp"
#include "lsda/verify.hpp"

namespace lsda {

Command parse_command(const std::string& s) {
  if (s == "solve") return Command::solve;
  if (s == "sweep") return Command::sweep;
  if (s == "verify") return Command::verify;
  if (s == "fliptest") return Command::fliptest;
  throw ConfigError("unknown subcommand '" + s + "'");
}

std::string to_string(Command c) {
  switch (c) {
    case Command::solve: return "solve";
    case Command::sweep: return "sweep";
    case Command::verify: return "verify";
    case Command::fliptest: return "fliptest";
  }
  return "solve";
}

namespace {

void describe_state(Report& rep, const ScfState& s) {
  rep.add("converged", std::string(s.converged ? "true" : "false"));
  rep.add("iterations", static_cast<long long>(s.iterations));
  rep.add("start", s.start);
  rep.add("flipped", std::string(s.flipped ? "true" : "false"));
  rep.add("fermi_hartree", s.fermi);
  rep.add("total_hartree", s.energy.total);
}

void add_sweep(Report& rep, const SweepReport& sweep) {
  rep.begin("sweep");
  rep.add("grid", sweep.grid);
  rep.add("mode", sweep.mode);
  rep.add("tol_bind", sweep.tol_bind);
  rep.add("note", std::string("energies are upper bounds from SCF on the discretized functional"));
  for (const auto& p : sweep.points) {
    rep.begin(fmt::format("sweep point lambda={}", p.lambda));
    rep.add("I_lambda", p.energy);
    rep.add("converged", std::string(p.converged ? "true" : "false"));
    rep.add("iterations", static_cast<long long>(p.iterations));
    rep.add("start", p.start);
    rep.add("I_inf", p.energy_inf);
    rep.add("converged_inf", std::string(p.converged_inf ? "true" : "false"));
    rep.add("iterations_inf", static_cast<long long>(p.iterations_inf));
    rep.add("coleman_violations", static_cast<long long>(p.coleman_violations));
    if (!p.error.empty()) rep.add("error", p.error);
  }
  for (const auto& c : sweep.checks) rep.add(c);
}

RunOutcome run_solve(const RunConfig& config) {
  const ScfState s = scf_solve(config.problem());
  Report rep;
  rep.begin("solve");
  rep.add("mode", to_string(config.mode));
  rep.add("lambda", config.lambda);
  describe_state(rep, s);
  rep.add("coleman_violations", static_cast<long long>(coleman_violations(s, config.lambda)));
  RunOutcome out;
  out.artifacts = {{"energies.csv", energies_csv(s.energy)},
                   {"density.dat", density_dump(s.density)},
                   {"orbitals.csv", orbitals_csv(s)},
                   {"history.csv", history_csv(s)},
                   {"solve_report.txt", rep.str()},
                   {"config_used.txt", render_config(config)}};
  out.summary = fmt::format("total {} hartree after {} iterations", format_real(s.energy.total), s.iterations);
  return out;
}

RunOutcome run_sweep(const RunConfig& config) {
  const SweepReport sweep = sweep_lambda(config.problem(), config.sweep_lambdas, config.tol_bind);
  Report rep;
  add_sweep(rep, sweep);
  RunOutcome out;
  out.artifacts = {{"sweep.csv", sweep_csv(sweep)}, {"sweep_report.txt", rep.str()},
                   {"config_used.txt", render_config(config)}};
  out.summary = fmt::format("{} sweep points", sweep.points.size());
  return out;
}

std::vector<ExactIdentities> flip_runs(const RunConfig& config) {
  const Grid g = config.grid();
  const RealField v = nuclear_potential(config.external(), g);
  std::vector<ExactIdentities> out;
  for (auto seed : config.verify_seeds) out.push_back(exact_identities(g, v, config.mu, seed));
  return out;
}

RunOutcome run_fliptest(const RunConfig& config) {
  const auto runs = flip_runs(config);
  std::string csv = "seed,flip_zeeman,flip_kinetic,flip_density,flip_magnetization\n";
  RunOutcome out;
  for (const auto& r : runs) {
    csv += fmt::format("{},{},{},{},{}\n", r.seed, format_real(r.flip_zeeman), format_real(r.flip_kinetic),
                       format_real(r.flip_density), format_real(r.flip_magnetization));
    out.failed = out.failed ||
                 std::max({r.flip_zeeman, r.flip_kinetic, r.flip_density, r.flip_magnetization}) > 1e-12;
  }
  out.artifacts = {{"fliptest.csv", csv}};
  out.summary = out.failed ? "flip identities violated" : "flip identities hold";
  return out;
}

RunOutcome run_verify(const RunConfig& config) {
  Report rep;
  RunOutcome out;
  std::vector<CheckResult> checks;
  rep.begin("verify");
  rep.add("scope", std::string("checks certify the discretized functional, not the continuum statements"));
  rep.add("grid", fmt::format("n={} L={}", config.grid_n, config.grid_length));
  std::string seeds;
  for (auto s : config.verify_seeds) seeds += (seeds.empty() ? "" : " ") + std::to_string(s);
  rep.add("seeds", seeds);

  for (const auto& r : flip_runs(config)) {
    const std::string tag = fmt::format(" seed={}", r.seed);
    checks.push_back(make_check("flip zeeman" + tag, CheckClass::exact, r.flip_zeeman, 1e-12));
    checks.push_back(make_check("external decomposition" + tag, CheckClass::exact, r.decomposition, 1e-12));
    checks.push_back(make_check("pointwise bounds" + tag, CheckClass::exact, r.pointwise, 1e-12));
    checks.push_back(make_check("rho_pm vs dense" + tag, CheckClass::exact, r.rho_pm_vs_dense, 1e-12));
    checks.push_back(make_check("flip kinetic" + tag, CheckClass::exact, r.flip_kinetic, 1e-12));
    checks.push_back(make_check("flip density" + tag, CheckClass::exact, r.flip_density, 1e-12));
    checks.push_back(make_check("flip magnetization" + tag, CheckClass::exact, r.flip_magnetization, 1e-12));
    checks.push_back(make_check("hermiticity" + tag, CheckClass::exact, r.hermiticity, 1e-12));
  }

  const Grid g = config.grid();
  for (int count : {1, 2}) {
    const OccupiedSet s = gaussian_mixture_set(g, count, g.length() / 12.0, config.verify_seeds.front());
    const HoffmanOstenhof ho = check_hoffman_ostenhof(s);
    checks.push_back(make_check(fmt::format("hoffman-ostenhof orbitals={}", count), CheckClass::soft, ho.margin(), 0.0,
                                fmt::format("up {:.6e} <= {:.6e}, down {:.6e} <= {:.6e}", ho.gradient_up,
                                            ho.kinetic_up, ho.gradient_down, ho.kinetic_down)));
  }

  const XcFunctional xc = config.functional();
  for (double l : config.sweep_lambdas) {
    if (l > 1.0) continue;
    const ScalingTrialReport st = scaling_trial(l, default_sigmas(), xc);
    checks.push_back(make_check(fmt::format("scaling trial negative lambda={}", l), CheckClass::soft, st.min_energy,
                                0.0,
                                fmt::format("min at sigma={:.4g} aspect={}", st.argmin_sigma, st.argmin_aspect)));
    checks.push_back(make_check(fmt::format("scaling trial grid agreement lambda={}", l), CheckClass::soft,
                                st.grid_checks.back().worst(), 1e-2,
                                fmt::format("coarse {:.3e}, fine {:.3e}", st.grid_checks.front().worst(),
                                            st.grid_checks.back().worst())));
  }

  const ScfProblem problem = config.problem();
  const ScfState s = scf_solve(problem);
  rep.begin("state");
  describe_state(rep, s);
  checks.push_back(make_check("coleman every iterate", CheckClass::exact, coleman_violations(s, config.lambda), 0.0));
  checks.push_back(make_check("aufbau", CheckClass::soft,
                              check_aufbau(s.orbital_energies, s.occupied.occupations, s.fermi, config.scf.deg_tol),
                              0.0));
  checks.push_back(make_check("fermi negative", CheckClass::soft, s.fermi, 0.0));
  if (config.mode != Mode::collinear && config.mode != Mode::unpolarized) {
    const DerivativeCheck d = check_energy_derivative(s, prepare(problem), config.verify_seeds.front());
    checks.push_back(make_check("energy directional derivative", CheckClass::soft, d.error(), 1e-5,
                                fmt::format("analytic {:.10e} fd {:.10e}", d.analytic, d.finite_difference)));
  }
  try {
    const DecayFit fit = fit_decay(s.density.trace(), config.nuclei);
    const double expected = 2.0 * std::sqrt(std::max(-2.0 * s.fermi, 0.0));
    const double ratio = expected > 0.0 ? -fit.slope / expected : std::nan("");
    checks.push_back(make_check("decay slope negative", CheckClass::soft, fit.slope, 0.0,
                                fmt::format("window [{:.3g}, {:.3g}], {} shells, correlation {:.6f}", fit.r_min,
                                            fit.r_max, fit.radii.size(), fit.correlation)));
    checks.push_back(make_check("decay slope within factor 2", CheckClass::soft, std::abs(std::log2(ratio)), 1.0,
                                fmt::format("slope {:.6f}, 2 sqrt(-2 eps_F) = {:.6f}", fit.slope, expected)));
  } catch (const ConfigError& e) {
    checks.push_back(make_check("decay fit", CheckClass::soft, std::nan(""), 0.0, e.what()));
  }

  const SweepReport sweep = sweep_lambda(problem, config.sweep_lambdas, config.tol_bind);
  for (const auto& c : checks) {
    rep.add(c);
    out.failed = out.failed || c.verdict == Verdict::fail;
  }
  add_sweep(rep, sweep);
  out.artifacts = {{"verify_report.txt", rep.str()}, {"verify.csv", sweep_csv(sweep)},
                   {"config_used.txt", render_config(config)}};
  out.summary = out.failed ? "exact checks failed" : "exact checks passed";
  return out;
}

}  // namespace

RunOutcome run(Command command, const RunConfig& config) {
  validate(config);
  switch (command) {
    case Command::solve: return run_solve(config);
    case Command::sweep: return run_sweep(config);
    case Command::verify: return run_verify(config);
    case Command::fliptest: return run_fliptest(config);
  }
  throw ConfigError("unknown subcommand");
}

void write_artifacts(const std::string& dir, const std::vector<Artifact>& artifacts) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
  for (const auto& a : artifacts) {
    const fs::path path = fs::path(dir) / a.name;
    std::ofstream out(path, std::ios::binary);
    out << a.content;
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  }
}

}  // namespace lsda
