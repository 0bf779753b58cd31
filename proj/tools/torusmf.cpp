// Batch front end: torusmf <command> [--config file] [--out dir] [overrides]

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>

#include "torusmf/config.hpp"
#include "torusmf/random.hpp"
#include "torusmf/sweep.hpp"
#include "torusmf/testfunctions.hpp"

using namespace torusmf;

namespace {

constexpr double kPi = std::numbers::pi;

struct Run {
  RunConfig cfg;
  std::filesystem::path out;
  Json results = Json::object();
  Json files = Json::array();
  bool ok = true;
  std::string failure;

  std::filesystem::path file(const std::string& name) {
    files.push_back(name);
    return out / name;
  }
};

Json node_json(Node p) { return Json::array({p.i, p.j}); }

Json vec_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

void cmd_minimize(Run& run) {
  const ProblemSpec spec = problem_from_config(run.cfg);
  const ScalarField init = initial_field(run.cfg, spec);
  const MinimizeResult res = minimize(spec, init, minimize_options(run.cfg));
  write_field_csv(run.file("minimize_u.csv"), res.u, spec.grid.v_preset());
  {
    std::ofstream os(run.file("minimize_history.csv"));
    os << "iteration,jvalue\n";
    for (std::size_t i = 0; i < res.j_history.size(); ++i) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, res.j_history[i]);
      os << buf;
    }
  }
  double umax = 0.0;
  for (double x : res.u.values()) umax = std::max(umax, std::abs(x));
  Json& r = run.results;
  r["rho"] = spec.rho;
  r["jvalue"] = res.jvalue;
  r["j_at_zero"] = evaluate_j(ScalarField(spec.grid.n()), spec);
  r["mu"] = res.mu;
  r["lambda1"] = res.lambda1;
  r["residual"] = res.residual;
  r["full_el_residual"] = full_el_residual(res.u, spec);
  r["iterations"] = res.iterations;
  r["newton_steps"] = res.newton_steps;
  r["converged"] = res.converged;
  r["supercritical"] = res.supercritical;
  r["overflow_hit"] = res.overflow_hit;
  r["u_max_abs"] = umax;
  r["kernel_dim"] = spec.kb.dim;
  r["u"] = field_descriptor(res.u, spec.grid.v_preset(), "minimize_u.csv");
  if (!res.converged && !res.supercritical) {
    run.ok = false;
    run.failure = "minimization did not converge";
  }
}

void cmd_sweep(Run& run) {
  const ProblemSpec spec = problem_from_config(run.cfg);
  const ScalarField init = initial_field(run.cfg, spec);
  const auto recs = subcritical_sweep(spec, run.cfg.sweep_kmax, init, minimize_options(run.cfg));
  {
    std::ofstream os(run.file("sweep.csv"));
    os << "k,rho,c,x_i,x_j,mu,lambda1,energy,jvalue,r_scale,residual,iterations,converged,overflow\n";
    for (const auto& r : recs) {
      char buf[512];
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%zu,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d,%d\n", r.k, r.rho,
                    r.c, r.x.i, r.x.j, r.mu, r.lambda1, r.energy, r.jvalue, r.r_scale, r.residual, r.iterations,
                    r.converged ? 1 : 0, r.overflow ? 1 : 0);
      os << buf;
    }
  }
  if (!recs.empty() && recs.back().u.size() != 0) {
    write_field_csv(run.file("sweep_last_u.csv"), recs.back().u, spec.grid.v_preset());
  }
  Json& r = run.results;
  r["records"] = recs.size();
  bool all_converged = true;
  for (const auto& rec : recs) all_converged = all_converged && rec.converged;
  r["all_converged"] = all_converged;
  if (recs.size() >= 4) {
    const BlowupReport rep = blowup_diagnostics(recs, spec);
    Json d;
    d["classification"] = rep.classification;
    d["reason"] = rep.reason;
    d["c_slope"] = rep.c_slope;
    d["min_mu"] = rep.min_mu;
    d["mu_above_floor"] = rep.mu_above_floor;
    d["lambda1_max"] = rep.lambda1_max;
    d["lambda1_bound"] = rep.lambda1_bound;
    d["C0"] = rep.C0;
    d["energy_height_holds"] = rep.energy_height_holds;
    d["r_scale_positive"] = rep.r_scale_positive;
    d["j_tail"] = rep.j_tail;
    d["min_r_over_h"] = rep.min_r_over_h;
    if (rep.classification == "BLOWUP-CANDIDATE") {
      d["log_mu_ratio"] = vec_json(rep.log_mu_ratio);
      d["c_ratio"] = vec_json(rep.c_ratio);
      d["decay"] = vec_json(rep.decay);
      d["concentration"] = rep.concentration;
      d["phi_distance"] = vec_json(rep.phi_distance);
      d["psi_distance"] = vec_json(rep.psi_distance);
      d["phi_distance_nonincreasing"] = rep.phi_distance_nonincreasing;
    }
    r["diagnostics"] = d;
  }
  if (!all_converged) {
    run.ok = false;
    run.failure = "some sweep steps did not converge";
  }
}

void cmd_green(Run& run) {
  const ProblemSpec spec = problem_from_config(run.cfg);
  const Node p = pole_from_config(run.cfg);
  const GreenData gd = solve_green(p, spec, green_options(run.cfg));
  const RingFit fit = ring_fit(gd, spec.grid);
  write_field_csv(run.file("green_G.csv"), gd.G, spec.grid.v_preset());
  write_field_csv(run.file("green_eta.csv"), gd.eta, spec.grid.v_preset());
  Json& r = run.results;
  r["p"] = node_json(p);
  r["backend"] = run.cfg.backend;
  r["A_p"] = gd.A_p;
  r["lambda1"] = gd.lambda1;
  r["meanG"] = gd.meanG;
  r["Lambda"] = critical_value(gd, spec);
  r["solvability_residual"] = gd.solvability_residual;
  r["ring_fit"] = {{"constant", fit.constant}, {"quadratic", fit.quadratic}, {"rms", fit.rms}, {"samples", fit.samples}};
}

void cmd_critmap(Run& run) {
  const ProblemSpec spec = problem_from_config(run.cfg);
  const CriticalMap map = critical_value_map(spec, run.cfg.stride, green_options(run.cfg), run.cfg.threads);
  {
    std::ofstream os(run.file("critmap.csv"));
    os << "i,j,Lambda\n";
    for (std::size_t q = 0; q < map.nodes.size(); ++q) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g\n", map.nodes[q].i, map.nodes[q].j, map.values[q]);
      os << buf;
    }
  }
  Json& r = run.results;
  r["stride"] = map.stride;
  r["nodes"] = map.nodes.size();
  r["min"] = map.min;
  r["max"] = map.max;
  r["argmin"] = node_json(map.argmin);
  r["argmax"] = node_json(map.argmax);
}

void cmd_moser(Run& run) {
  const ProblemSpec spec = problem_from_config(run.cfg);
  std::vector<int> ks;
  for (int k = std::max(2, run.cfg.moser_kmin); k <= run.cfg.moser_kmax; k *= 2) ks.push_back(k);
  if (ks.size() < 2) throw InvalidArgument("moser: need kmax >= 2 kmin");
  const Node z = pole_from_config(run.cfg);
  const auto probes = tm_probe(run.cfg.alpha, ks, z, run.cfg.delta, spec);
  std::vector<double> totals, plateaus;
  bool diverged = false;
  {
    std::ofstream os(run.file("moser.csv"));
    os << "k,energy,total,plateau,diverged\n";
    for (const auto& pv : probes) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%d\n", pv.k, pv.energy, pv.total, pv.plateau, pv.diverged ? 1 : 0);
      os << buf;
      diverged = diverged || pv.diverged;
      totals.push_back(pv.total);
      plateaus.push_back(pv.plateau);
    }
  }
  Json& r = run.results;
  r["alpha"] = run.cfg.alpha;
  r["alpha_over_pi"] = run.cfg.alpha / kPi;
  r["delta"] = run.cfg.delta;
  r["ks"] = ks;
  r["any_diverged"] = diverged;
  r["predicted_slope"] = run.cfg.alpha / (4.0 * kPi) - 1.0;
  if (!diverged) {
    r["plateau_slope"] = log_slope(ks, plateaus);
    r["total_slope"] = log_slope(ks, totals);
    const auto [lo, hi] = std::minmax_element(totals.begin(), totals.end());
    r["total_ratio"] = *hi / *lo;
  }
}

void cmd_bubble(Run& run) {
  const BubbleReport rep = bubble_checks();
  Json& r = run.results;
  r["mass"] = rep.mass;
  r["mass_target"] = 8.0 * kPi;
  r["mass_error"] = rep.mass_error;
  Json e = Json::array();
  for (const auto& b : rep.energies) {
    e.push_back({{"R", b.R}, {"measured", b.measured}, {"closed_form", b.closed_form}, {"leading", b.leading},
                 {"relative_error", b.relative_error}});
  }
  r["energies"] = e;
}

void cmd_qk(Run& run) {
  const ProblemSpec spec = problem_from_config(run.cfg);
  const Node p = pole_from_config(run.cfg);
  const GreenData gd = solve_green(p, spec, green_options(run.cfg));
  std::vector<int> ks;
  std::vector<double> js;
  Json audits = Json::array();
  std::ofstream os(run.file("qk.csv"));
  os << "k,energy,energy_closed,log_mass,log_mass_closed,jvalue,Lambda,gap,projection_shift\n";
  for (int k : run.cfg.qk_k) {
    const QkFamily q = build_qk(gd, k, spec);
    const QkAudit a = qk_audit(q, spec);
    ks.push_back(k);
    js.push_back(a.jvalue);
    char buf[400];
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", k, a.energy, a.energy_closed,
                  a.log_mass, a.log_mass_closed, a.jvalue, a.critical, a.gap, a.projection_shift);
    os << buf;
    audits.push_back({{"k", k},
                      {"R", q.R},
                      {"c", q.c},
                      {"energy", a.energy},
                      {"energy_closed", a.energy_closed},
                      {"energy_relative_error", a.energy_relative_error},
                      {"cap_energy", a.cap_energy},
                      {"cap_energy_closed", a.cap_energy_closed},
                      {"log_mass", a.log_mass},
                      {"log_mass_closed", a.log_mass_closed},
                      {"log_mass_error", a.log_mass_error},
                      {"jvalue", a.jvalue},
                      {"gap", a.gap},
                      {"projection_shift", a.projection_shift},
                      {"matching_jump", a.matching_jump}});
    if (k == run.cfg.qk_k.back()) write_field_csv(run.file("qk_field.csv"), q.field, spec.grid.v_preset());
  }
  Json& r = run.results;
  r["p"] = node_json(p);
  r["A_p"] = gd.A_p;
  r["meanG"] = gd.meanG;
  r["Lambda"] = critical_value(gd, spec);
  r["audits"] = audits;
  if (ks.size() >= 3) r["richardson_limit"] = richardson_limit(ks, js);
}

void cmd_reduce(Run& run) {
  const ProblemSpec spec = problem_from_config(run.cfg);
  double wmax = 0.0;
  for (double x : spec.conn.omega.c1.values()) wmax = std::max(wmax, std::abs(x));
  for (double x : spec.conn.omega.c2.values()) wmax = std::max(wmax, std::abs(x));
  if (wmax != 0.0) throw ConfigError("reduce-check needs connection = zero");
  double worst = 0.0;
  Json rows = Json::array();
  for (int s = 0; s < run.cfg.reduce_samples; ++s) {
    const auto seed = run.cfg.seed + static_cast<std::uint64_t>(s);
    const ScalarField u = smooth_random_field(spec.grid.n(), seed, 4, 1.0);
    const double a = evaluate_j(u, spec);
    const double b = classical_j(u, spec.grid, spec.hweight, spec.rho);
    worst = std::max(worst, std::abs(a - b));
    rows.push_back({{"seed", seed}, {"bundle_route", a}, {"classical_route", b}});
  }
  Json& r = run.results;
  r["samples"] = rows;
  r["max_discrepancy"] = worst;
  r["tolerance"] = 1e-12;
  if (!(worst <= 1e-12)) {
    run.ok = false;
    run.failure = "two evaluations of the functional disagree";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean-field functional toolkit on the flat torus"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "JSON or key = value configuration file");
  app.add_option("--out", out_dir, "output directory (default from config, \"out\")");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--n", n, "grid nodes per axis");
  app.add_option("--set", sets, "override any config key: key=value");

  std::string keys = "configuration keys and defaults:\n";
  for (const auto& [k, v] : config_keys()) keys += "  " + k + " = " + v + "\n";
  keys += "exit status: 0 success, 1 numerical failure, 2 usage error";
  app.footer(keys);

  std::map<std::string, std::optional<std::string>> over;
  auto opt = [&](CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
    sub->add_option(flag, over[key], help);
  };

  auto* c_min = app.add_subcommand("minimize", "minimize the functional over H1");
  opt(c_min, "--rho", "rho", "parameter rho");
  opt(c_min, "--init", "init", "random, zero or file:<path>");
  auto* c_sweep = app.add_subcommand("sweep", "minimize along rho_k = 8 pi - 1/k and classify");
  opt(c_sweep, "--kmax", "sweep.kmax", "last k");
  opt(c_sweep, "--init", "init", "random, zero or file:<path>");
  auto* c_green = app.add_subcommand("green", "Green section, A_p and the critical value at p");
  opt(c_green, "--p", "green.p", "pole i,j");
  opt(c_green, "--backend", "green.backend", "spectral or fd");
  auto* c_map = app.add_subcommand("critmap", "critical value at every stride-th node");
  opt(c_map, "--stride", "critmap.stride", "node stride");
  opt(c_map, "--backend", "green.backend", "spectral or fd");
  opt(c_map, "--threads", "threads", "worker threads (0: all cores)");
  auto* c_moser = app.add_subcommand("moser", "exponential integrals on the Moser family");
  opt(c_moser, "--alpha", "moser.alpha", "exponent (accepts e.g. 4.1pi)");
  opt(c_moser, "--kmax", "moser.kmax", "largest k (powers of two from moser.kmin)");
  opt(c_moser, "--delta", "moser.delta", "outer radius");
  opt(c_moser, "--p", "green.p", "centre i,j");
  auto* c_bubble = app.add_subcommand("bubble", "mass and energy of the Liouville bubble");
  auto* c_qk = app.add_subcommand("qk", "critical test sections and their audit");
  opt(c_qk, "--p", "green.p", "pole i,j");
  opt(c_qk, "--k", "qk.k", "k or comma-separated list");
  auto* c_reduce = app.add_subcommand("reduce-check", "bundle vs classical evaluation with omega = 0");
  opt(c_reduce, "--samples", "reduce.samples", "number of random fields");
  opt(c_reduce, "--rho", "rho", "parameter rho");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  const std::map<std::string, std::function<void(Run&)>> commands = {
      {"minimize", cmd_minimize}, {"sweep", cmd_sweep}, {"green", cmd_green}, {"critmap", cmd_critmap},
      {"moser", cmd_moser},       {"bubble", cmd_bubble}, {"qk", cmd_qk},     {"reduce-check", cmd_reduce}};
  (void)c_bubble;

  Run run;
  try {
    if (!config_path.empty()) run.cfg = load_config(config_path);
    if (seed) run.cfg.seed = *seed;
    if (n) run.cfg.n = *n;
    if (!out_dir.empty()) run.cfg.out = out_dir;
    for (const auto& [key, value] : over) {
      if (value) apply_setting(run.cfg, key, *value);
    }
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
      apply_setting(run.cfg, s.substr(0, eq), s.substr(eq + 1));
    }
  } catch (const Error& e) {
    std::cerr << "torusmf: " << e.what() << "\n";
    return 2;
  }
  run.out = run.cfg.out;
  std::error_code ec;
  std::filesystem::create_directories(run.out, ec);
  if (ec) {
    std::cerr << "torusmf: cannot create " << run.out.string() << ": " << ec.message() << "\n";
    return 2;
  }

  const auto t0 = std::chrono::steady_clock::now();
  int status = 0;
  std::string status_name = "ok", error;
  try {
    commands.at(command)(run);
    if (!run.ok) {
      status = 1;
      status_name = "failed";
      error = run.failure;
    }
  } catch (const InvalidArgument& e) {
    status = 2;
    status_name = "usage-error";
    error = e.what();
  } catch (const std::exception& e) {
    status = 1;
    status_name = "failed";
    error = e.what();
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  Json summary;
  summary["command"] = command;
  summary["status"] = status_name;
  if (!error.empty()) summary["error"] = error;
  summary["config"] = to_json(run.cfg);
  summary["config_hash"] = config_hash(run.cfg);
  Json versions;
  for (const auto& [k, v] : version_info()) versions[k] = v;
  summary["versions"] = versions;
  summary["results"] = run.results;
  summary["files"] = run.files;
  summary["wall_time_s"] = wall;
  try {
    write_json(run.out / (command + ".json"), summary);
  } catch (const std::exception& e) {
    std::cerr << "torusmf: " << e.what() << "\n";
    return 1;
  }
  if (!error.empty()) std::cerr << "torusmf " << command << ": " << error << "\n";
  std::cout << (run.out / (command + ".json")).string() << "\n";
  return status;
}
