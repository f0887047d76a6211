#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "itc/io.hpp"

namespace itc {

struct SolverConfig {
  int grid_cells = 400;
  int t_cells = 200;
  double tol_gap = 1e-6;  // relative gap tolerance
  int max_iterations = 500;
  int workers = 1;
  std::uint64_t seed = 0;
  double checker_tol = 1e-4;
  double eps_alpha = 1e-9;
  double eps_beta = 1e-9;
};

/// A parsed scenario: the problem data plus solver options and an optional
/// input control for simulate / reconstruct runs.
struct ScenarioConfig {
  ProblemSpec spec;
  SolverConfig solver;
  std::optional<PiecewiseControl> control_u;       // original-time control
  std::optional<ReducedControl> control_reduced;   // reduced control inline
  std::string control_csv;                         // or a control CSV path
  bool project = false;                            // simulate: also reconstruct
};

/// Knobs that outrank the config file (command line and environment).
struct ConfigOverrides {
  std::optional<int> grid_cells;
  std::optional<int> t_cells;
  std::optional<int> particles;
  std::optional<int> workers;
  std::optional<double> tol_gap;
  std::optional<std::uint64_t> seed;
};

/// Loads a scenario from a JSON document; also accepts a manifest written
/// by the CLI (its resolved_config is used, which makes reruns exact).
ScenarioConfig load_config(const fs::path& path);
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig parse_config(const std::string& text, const ConfigOverrides& ov);

/// Canonical JSON for the fully resolved scenario. Deterministic; hashing
/// it fingerprints a run.
std::string config_canonical_json(const ScenarioConfig& cfg);

/// JSON descriptor {"kind": ..., "params": {...}} round-trip for built-in
/// fields and costs.
std::string field_to_json(const VectorField& f);
FieldPtr field_from_json(const std::string& text, int n);
std::string cost_to_json(const TerminalCost& c);
CostPtr cost_from_json(const std::string& text, int n);

}  // namespace itc
