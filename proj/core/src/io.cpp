#include "itc/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace itc {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open for writing: " + path.string());
  return out;
}

std::vector<double> parse_csv_row(const std::string& line) {
  std::vector<double> row;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
  return row;
}

json vec_to_json(const Vec& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

}  // namespace

void write_measure_csv(const fs::path& path, const EmpiricalMeasure& m) {
  auto out = open_out(path);
  for (const auto& p : m.points()) {
    for (Eigen::Index i = 0; i < p.size(); ++i)
      out << (i ? "," : "") << fmt(p[i]);
    out << "\n";
  }
}

EmpiricalMeasure read_measure_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open for reading: " + path.string());
  std::vector<Vec> pts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto row = parse_csv_row(line);
    Vec p(row.size());
    for (size_t i = 0; i < row.size(); ++i) p[i] = row[i];
    pts.push_back(std::move(p));
  }
  return EmpiricalMeasure(std::move(pts));
}

std::string measure_to_json(const EmpiricalMeasure& m) {
  json arr = json::array();
  for (const auto& p : m.points()) arr.push_back(vec_to_json(p));
  return arr.dump();
}

EmpiricalMeasure measure_from_json(const std::string& text) {
  json arr = json::parse(text);
  std::vector<Vec> pts;
  for (const auto& row : arr) {
    Vec p(row.size());
    for (size_t i = 0; i < row.size(); ++i) p[i] = row[i].get<double>();
    pts.push_back(std::move(p));
  }
  return EmpiricalMeasure(std::move(pts));
}

void write_control_csv(const fs::path& path, const ReducedControl& ctrl) {
  auto out = open_out(path);
  out << "cell,s_mid,alpha";
  for (int i = 1; i <= ctrl.control_dim(); ++i) out << ",beta_" << i;
  out << "\n";
  const double h = ctrl.ds();
  for (int c = 0; c < ctrl.cells(); ++c) {
    out << c << "," << fmt((c + 0.5) * h) << "," << fmt(ctrl.alpha[c]);
    for (int i = 0; i < ctrl.control_dim(); ++i) out << "," << fmt(ctrl.beta[c][i]);
    out << "\n";
  }
}

ReducedControl read_control_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open for reading: " + path.string());
  std::string line;
  std::getline(in, line);  // header
  ReducedControl ctrl;
  double last_mid = 0.0, first_mid = -1.0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto row = parse_csv_row(line);
    if (row.size() < 3) throw ConfigError("control csv: malformed row");
    if (first_mid < 0) first_mid = row[1];
    last_mid = row[1];
    ctrl.alpha.push_back(row[2]);
    Vec b(row.size() - 3);
    for (size_t i = 3; i < row.size(); ++i) b[i - 3] = row[i];
    ctrl.beta.push_back(std::move(b));
  }
  if (ctrl.alpha.empty()) throw ConfigError("control csv: no cells");
  // Uniform grid: the first midpoint pins the cell width.
  ctrl.s_end = 2.0 * first_mid * ctrl.cells();
  if (std::abs((last_mid - first_mid) - (ctrl.cells() - 1) * 2.0 * first_mid) >
      1e-9 * (1.0 + ctrl.s_end))
    throw ConfigError("control csv: grid is not uniform");
  return ctrl;
}

void write_trajectory_csv(const fs::path& path, const ParticleTrajectory& traj) {
  auto out = open_out(path);
  const int n = traj.states[0][0].size();
  out << "s,k";
  for (int i = 1; i <= n; ++i) out << ",y_" << i;
  out << "\n";
  for (size_t j = 0; j < traj.s_nodes.size(); ++j)
    for (size_t k = 0; k < traj.states[j].size(); ++k) {
      out << fmt(traj.s_nodes[j]) << "," << k;
      for (int i = 0; i < n; ++i) out << "," << fmt(traj.states[j][k][i]);
      out << "\n";
    }
}

void write_original_csv(const fs::path& path, const OriginalTrajectory& traj) {
  auto out = open_out(path);
  const int n = traj.states[0][0].size();
  out << "t,k";
  for (int i = 1; i <= n; ++i) out << ",x_" << i;
  out << "\n";
  for (size_t j = 0; j < traj.t_nodes.size(); ++j)
    for (size_t k = 0; k < traj.states[j].size(); ++k) {
      out << fmt(traj.t_nodes[j]) << "," << k;
      for (int i = 0; i < n; ++i) out << "," << fmt(traj.states[j][k][i]);
      out << "\n";
    }
}

void write_lifted_csv(const fs::path& path, const LiftedTrajectory& lifted) {
  auto out = open_out(path);
  const int n = lifted.nodes[0].y[0].size();
  out << "s,k";
  for (int i = 1; i <= n; ++i) out << ",y_" << i;
  for (int i = 1; i <= n; ++i) out << ",p_" << i;
  out << "\n";
  for (size_t j = 0; j < lifted.s_nodes.size(); ++j)
    for (int k = 0; k < lifted.nodes[j].size(); ++k) {
      out << fmt(lifted.s_nodes[j]) << "," << k;
      for (int i = 0; i < n; ++i) out << "," << fmt(lifted.nodes[j].y[k][i]);
      for (int i = 0; i < n; ++i) out << "," << fmt(lifted.nodes[j].p[k][i]);
      out << "\n";
    }
}

void write_hamiltonian_trace_csv(const fs::path& path, const ProblemSpec& spec,
                                 const ReducedControl& ctrl,
                                 const CellHamiltonians& cells, double lambda) {
  auto out = open_out(path);
  out << "cell,s_mid,h1,h0,h_total\n";
  const double h = ctrl.ds();
  for (int c = 0; c < cells.cells(); ++c) {
    double h1 = cells.drift_sym[c] + lambda;
    double h0 = 0.0;
    for (int i = 0; i < spec.m; ++i)
      h0 = std::max(h0, std::abs(cells.control(i, c)));
    double total = ctrl.alpha[c] * h1;
    for (int i = 0; i < spec.m; ++i)
      total += ctrl.beta[c][i] * cells.control(i, c);
    out << c << "," << fmt((c + 0.5) * h) << "," << fmt(h1) << "," << fmt(h0)
        << "," << fmt(total) << "\n";
  }
}

void write_impulsive(const fs::path& dir, const std::string& stem,
                     const ImpulsiveSolution& imp) {
  fs::create_directories(dir);
  json doc;
  doc["t_grid"] = imp.t_grid;
  doc["V"] = imp.cumulative_variation;
  doc["variation_total"] = imp.variation_total;
  json ujson = json::array();
  for (const auto& u : imp.cumulative_control) ujson.push_back(vec_to_json(u));
  doc["U"] = ujson;
  json jumps = json::array();
  for (size_t j = 0; j < imp.jumps.size(); ++j) {
    const auto& jump = imp.jumps[j];
    char name[64];
    std::snprintf(name, sizeof name, "%s_jump_%03zu_completion.csv", stem.c_str(), j);
    json atom;
    atom["tau"] = jump.tau;
    atom["length"] = jump.length;
    atom["omega"] = vec_to_json(jump.omega);
    atom["cell_begin"] = jump.cell_begin;
    atom["cell_end"] = jump.cell_end;
    atom["fast_nodes"] = jump.fast_nodes;
    json uc = json::array();
    for (const auto& u : jump.attached_control) uc.push_back(vec_to_json(u));
    atom["attached_control"] = uc;
    atom["completion_csv"] = name;
    jumps.push_back(atom);

    auto out = open_out(dir / name);
    const int n = jump.left_state.dim();
    out << "sigma,k";
    for (int i = 1; i <= n; ++i) out << ",x_" << i;
    out << "\n";
    for (size_t q = 0; q < jump.fast_nodes.size(); ++q)
      for (int k = 0; k < jump.completion[q].size(); ++k) {
        out << fmt(jump.fast_nodes[q]) << "," << k;
        for (int i = 0; i < n; ++i) out << "," << fmt(jump.completion[q].point(k)[i]);
        out << "\n";
      }
  }
  doc["jumps"] = jumps;
  json dead = json::array();
  for (const auto& d : imp.dead_runs) dead.push_back({d.first, d.second});
  doc["dead_runs"] = dead;
  open_out(dir / (stem + ".json")) << doc.dump(2) << "\n";

  auto out = open_out(dir / (stem + "_trajectory.csv"));
  const int n = imp.mu.front().dim();
  out << "t,k";
  for (int i = 1; i <= n; ++i) out << ",x_" << i;
  out << "\n";
  for (size_t j = 0; j < imp.t_grid.size(); ++j)
    for (int k = 0; k < imp.mu[j].size(); ++k) {
      out << fmt(imp.t_grid[j]) << "," << k;
      for (int i = 0; i < n; ++i) out << "," << fmt(imp.mu[j].point(k)[i]);
      out << "\n";
    }
}

void write_certificate_json(const fs::path& path, const ExtremalCertificate& cert) {
  json doc;
  doc["lambda"] = cert.lambda;
  doc["residual"] = cert.residual;
  doc["cost"] = cert.cost;
  doc["iterations"] = cert.iterations;
  doc["lambda_bracket"] = {cert.lambda_lo, cert.lambda_hi};
  doc["degenerate_lambda"] = cert.degenerate_lambda;
  doc["stagnated"] = cert.stagnated;
  json hist = json::array();
  for (const auto& rec : cert.history)
    hist.push_back({{"cost", rec.cost}, {"residual", rec.residual}, {"step", rec.step}});
  doc["history"] = hist;
  open_out(path) << doc.dump(2) << "\n";
}

namespace {

json suite_to_json(const ConditionSuite& s) {
  json violations = json::array();
  for (const auto& v : s.violations)
    violations.push_back({{"cell", v.cell}, {"defect", v.defect}});
  return json{{"passed", s.passed},
              {"cells_checked", s.cells_checked},
              {"integrated_defect", s.integrated_defect},
              {"worst_defect", s.worst_defect},
              {"worst_cell", s.worst_cell},
              {"violations", violations}};
}

}  // namespace

void write_reduced_report_json(const fs::path& path, const ReducedCheckReport& rep) {
  json violations = json::array();
  for (const auto& v : rep.violations)
    violations.push_back({{"cell", v.cell}, {"defect", v.defect}});
  json doc{{"passed", rep.passed},
           {"tol", rep.tol},
           {"integrated_defect", rep.integrated_defect},
           {"worst_defect", rep.worst_defect},
           {"worst_cell", rep.worst_cell},
           {"boundary_residual", rep.boundary_residual},
           {"initial_residual", rep.initial_residual},
           {"violations", violations}};
  open_out(path) << doc.dump(2) << "\n";
}

void write_impulsive_report_json(const fs::path& path,
                                 const ImpulsiveCheckReport& rep) {
  json doc{{"passed", rep.passed},
           {"tol", rep.tol},
           {"conditions",
            {{"maxcond1", suite_to_json(rep.maxcond1)},
             {"maxcond2", suite_to_json(rep.maxcond2)},
             {"maxcond3", suite_to_json(rep.maxcond3)}}},
           {"worst_cell", rep.worst_cell},
           {"integrated_defect", rep.integrated_defect},
           {"completion_ode_residual", rep.completion_ode_residual}};
  open_out(path) << doc.dump(2) << "\n";
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 0x100000001b3ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, hash);
  return buf;
}

}  // namespace itc
