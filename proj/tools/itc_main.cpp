// Batch driver for the impulsive transport control library: four pipelines
// (simulate, optimize, reconstruct, check-pmp) over a JSON scenario config,
// writing tidy CSV/JSON artifacts plus a manifest for exact reruns.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "itc/config.hpp"
#include "itc/version.hpp"

namespace {

using namespace itc;
using nlohmann::json;

struct CliArgs {
  std::string config_path;
  std::string out_dir = "itc_out";
  std::string control_path;      // reduced-control CSV for reconstruct/check-pmp
  std::string certificate_path;  // certificate JSON for check-pmp
  bool project = false;
  ConfigOverrides overrides;
};

struct LoadedScenario {
  ScenarioConfig cfg;
  std::string canonical;
  std::string hash;
};

LoadedScenario load_scenario(const CliArgs& args) {
  std::ifstream in(args.config_path);
  if (!in) throw ConfigError("cannot open config: " + args.config_path);
  std::ostringstream ss;
  ss << in.rdbuf();
  LoadedScenario out;
  out.cfg = parse_config(ss.str(), args.overrides);
  out.canonical = config_canonical_json(out.cfg);
  out.hash = fnv1a_hex(out.canonical);
  return out;
}

void write_manifest(const fs::path& dir, const std::string& subcommand,
                    const LoadedScenario& sc,
                    const std::vector<std::string>& artifacts) {
  const auto& cfg = sc.cfg;
  json doc;
  doc["version"] = kVersion;
  doc["subcommand"] = subcommand;
  doc["config_hash"] = sc.hash;
  doc["grid_cells"] = cfg.solver.grid_cells;
  doc["t_cells"] = cfg.solver.t_cells;
  doc["particles"] = cfg.spec.theta.size();
  doc["workers"] = cfg.solver.workers;
  doc["seed"] = cfg.solver.seed;
  doc["tolerances"] = {{"tol_gap", cfg.solver.tol_gap},
                       {"tol_t", default_tol_t(cfg.spec.s_length())},
                       {"checker_tol", cfg.solver.checker_tol},
                       {"eps_alpha", cfg.solver.eps_alpha},
                       {"eps_beta", cfg.solver.eps_beta}};
  doc["artifacts"] = artifacts;
  doc["resolved_config"] = json::parse(sc.canonical);
  std::ofstream out(dir / "manifest.json");
  out << doc.dump(2) << "\n";
}

ReducedControl input_control(const CliArgs& args, const ScenarioConfig& cfg) {
  if (!args.control_path.empty()) return read_control_csv(args.control_path);
  if (cfg.control_reduced) return *cfg.control_reduced;
  if (!cfg.control_csv.empty()) return read_control_csv(cfg.control_csv);
  if (cfg.control_u) {
    double var = cfg.control_u->variation();
    if (var > cfg.spec.budget + default_tol_t(cfg.spec.s_length()))
      throw ConstraintError("input control exceeds the budget M");
    return embed_control(*cfg.control_u, cfg.spec.horizon, var,
                         cfg.solver.grid_cells);
  }
  throw ConfigError("no input control: provide --control or a config control");
}

ProjectionOptions projection_options(const ScenarioConfig& cfg) {
  ProjectionOptions opts;
  opts.t_cells = cfg.solver.t_cells;
  opts.eps_alpha = cfg.solver.eps_alpha;
  opts.eps_beta = cfg.solver.eps_beta;
  return opts;
}

int run_simulate(const CliArgs& args) {
  auto sc = load_scenario(args);
  const auto& cfg = sc.cfg;
  fs::create_directories(args.out_dir);
  ReducedControl ctrl = input_control(args, cfg);
  auto traj = solve_forward(cfg.spec, ctrl, cfg.solver.workers);
  double cost = terminal_cost(cfg.spec, traj);

  std::vector<std::string> artifacts = {"control.csv", "trajectory.csv",
                                        "terminal_measure.csv"};
  write_control_csv(fs::path(args.out_dir) / "control.csv", ctrl);
  write_trajectory_csv(fs::path(args.out_dir) / "trajectory.csv", traj);
  write_measure_csv(fs::path(args.out_dir) / "terminal_measure.csv",
                    traj.measure_at_node(traj.cells()));
  if (args.project || cfg.project) {
    auto imp = project_to_impulsive(cfg.spec, ctrl, traj, projection_options(cfg));
    write_impulsive(args.out_dir, "impulsive", imp);
    artifacts.push_back("impulsive.json");
    artifacts.push_back("impulsive_trajectory.csv");
  }
  write_manifest(args.out_dir, "simulate", sc, artifacts);
  std::cout << "simulate: terminal cost " << cost << ", field sup "
            << traj.observed_field_sup << " (declared C " << cfg.spec.sup_c
            << ")\n";
  return 0;
}

int run_optimize(const CliArgs& args) {
  auto sc = load_scenario(args);
  const auto& cfg = sc.cfg;
  fs::create_directories(args.out_dir);

  auto init = ReducedControl::constant(
      cfg.spec.s_length(), cfg.solver.grid_cells,
      cfg.spec.horizon / cfg.spec.s_length(), Vec::Zero(cfg.spec.m));
  FrankWolfeOptions opts;
  opts.tol_gap_rel = cfg.solver.tol_gap;
  opts.max_iterations = cfg.solver.max_iterations;
  opts.workers = cfg.solver.workers;
  auto [ctrl, cert] = frank_wolfe(cfg.spec, init, opts);

  auto traj = solve_forward(cfg.spec, ctrl, cfg.solver.workers);
  auto lifted = solve_backward(cfg.spec, ctrl, traj, cfg.solver.workers);
  auto cells = compute_cell_hamiltonians(cfg.spec, ctrl, traj, lifted);

  fs::path out(args.out_dir);
  write_control_csv(out / "control.csv", ctrl);
  write_certificate_json(out / "certificate.json", cert);
  write_trajectory_csv(out / "trajectory.csv", traj);
  write_lifted_csv(out / "lifted.csv", lifted);
  write_hamiltonian_trace_csv(out / "hamiltonian_trace.csv", cfg.spec, ctrl,
                              cells, cert.lambda);
  write_measure_csv(out / "terminal_measure.csv",
                    traj.measure_at_node(traj.cells()));
  write_manifest(args.out_dir, "optimize", sc,
                 {"control.csv", "certificate.json", "trajectory.csv",
                  "lifted.csv", "hamiltonian_trace.csv", "terminal_measure.csv"});
  std::cout << "optimize: cost " << cert.cost << ", residual " << cert.residual
            << ", lambda " << cert.lambda << ", iterations " << cert.iterations
            << (cert.stagnated ? " (stagnated)" : "") << "\n";
  return 0;
}

int run_reconstruct(const CliArgs& args) {
  auto sc = load_scenario(args);
  const auto& cfg = sc.cfg;
  fs::create_directories(args.out_dir);
  ReducedControl ctrl = input_control(args, cfg);
  auto traj = solve_forward(cfg.spec, ctrl, cfg.solver.workers);
  auto imp = project_to_impulsive(cfg.spec, ctrl, traj, projection_options(cfg));
  imp.validate();
  write_impulsive(args.out_dir, "impulsive", imp);
  write_control_csv(fs::path(args.out_dir) / "control.csv", ctrl);
  write_manifest(args.out_dir, "reconstruct", sc,
                 {"control.csv", "impulsive.json", "impulsive_trajectory.csv"});
  std::cout << "reconstruct: " << imp.jumps.size() << " jump(s), V(T) = "
            << imp.variation_total << " (budget M = " << cfg.spec.budget
            << "), " << imp.dead_runs.size() << " dead run(s) removed\n";
  return 0;
}

int run_check_pmp(const CliArgs& args) {
  auto sc = load_scenario(args);
  const auto& cfg = sc.cfg;
  fs::create_directories(args.out_dir);
  ReducedControl ctrl = input_control(args, cfg);
  auto traj = solve_forward(cfg.spec, ctrl, cfg.solver.workers);
  auto lifted = solve_backward(cfg.spec, ctrl, traj, cfg.solver.workers);
  auto cells = compute_cell_hamiltonians(cfg.spec, ctrl, traj, lifted);

  std::optional<double> lambda;
  if (!args.certificate_path.empty()) {
    std::ifstream in(args.certificate_path);
    if (!in) throw ConfigError("cannot open certificate: " + args.certificate_path);
    json doc = json::parse(in, nullptr, true, true);
    lambda = doc.at("lambda").get<double>();
  }
  if (!lambda)
    lambda = find_lambda(cfg.spec, cells, cfg.spec.s_length(), cfg.spec.horizon,
                         default_tol_t(cfg.spec.s_length()))
                 .lambda;

  auto reduced_rep = check_reduced(cfg.spec, ctrl, traj, lifted, *lambda,
                                   cfg.solver.checker_tol);
  auto imp = project_to_impulsive(cfg.spec, ctrl, traj, projection_options(cfg));
  auto impulsive_rep = check_impulsive(cfg.spec, imp, ctrl, lifted, *lambda,
                                       cfg.solver.checker_tol,
                                       projection_options(cfg));

  fs::path out(args.out_dir);
  write_reduced_report_json(out / "reduced_report.json", reduced_rep);
  write_impulsive_report_json(out / "impulsive_report.json", impulsive_rep);
  write_manifest(args.out_dir, "check-pmp", sc,
                 {"reduced_report.json", "impulsive_report.json"});
  std::cout << reduced_rep.summary() << "\n" << impulsive_rep.summary() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"impulsive control of nonlocal transport equations"};
  app.set_version_flag("--version", itc::kVersion);
  app.require_subcommand(1);

  CliArgs args;
  std::optional<int> grid_cells, t_cells, particles, workers;
  std::optional<double> tol_gap;
  std::optional<std::uint64_t> seed;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", args.config_path, "scenario JSON (or manifest)")
        ->required();
    cmd->add_option("--out-dir", args.out_dir, "output directory")
        ->envname("ITC_OUT_DIR");
    cmd->add_option("--grid-cells", grid_cells, "reduced grid cells")
        ->envname("ITC_GRID_CELLS");
    cmd->add_option("--t-cells", t_cells, "impulsive t-grid cells")
        ->envname("ITC_T_CELLS");
    cmd->add_option("--particles", particles, "particle count override")
        ->envname("ITC_PARTICLES");
    cmd->add_option("--tol-gap", tol_gap, "relative Frank-Wolfe gap tolerance")
        ->envname("ITC_TOL_GAP");
    cmd->add_option("--workers", workers, "worker threads for inner kernels")
        ->envname("ITC_WORKERS");
    cmd->add_option("--seed", seed, "RNG seed for sampled initial data")
        ->envname("ITC_SEED");
  };

  auto* simulate = app.add_subcommand("simulate", "forward solve a control");
  add_common(simulate);
  simulate->add_flag("--project", args.project, "also write the impulsive projection");

  auto* optimize = app.add_subcommand("optimize", "run the conditional-gradient solver");
  add_common(optimize);

  auto* reconstruct =
      app.add_subcommand("reconstruct", "project a reduced control to impulsive form");
  add_common(reconstruct);
  reconstruct->add_option("--control", args.control_path, "reduced control CSV");

  auto* check = app.add_subcommand("check-pmp", "certify a control against the maximum principles");
  add_common(check);
  check->add_option("--control", args.control_path, "reduced control CSV");
  check->add_option("--certificate", args.certificate_path,
                    "certificate JSON supplying the multiplier");

  CLI11_PARSE(app, argc, argv);

  args.overrides.grid_cells = grid_cells;
  args.overrides.t_cells = t_cells;
  args.overrides.particles = particles;
  args.overrides.workers = workers;
  args.overrides.tol_gap = tol_gap;
  args.overrides.seed = seed;

  try {
    if (simulate->parsed()) return run_simulate(args);
    if (optimize->parsed()) return run_optimize(args);
    if (reconstruct->parsed()) return run_reconstruct(args);
    return run_check_pmp(args);
  } catch (const itc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const itc::ConstraintError& e) {
    std::cerr << "constraint error: " << e.what() << "\n";
    return 1;
  } catch (const itc::DimensionError& e) {
    std::cerr << "dimension error: " << e.what() << "\n";
    return 1;
  } catch (const itc::IntegrationError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
}
