#include "itc/config.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace itc {

namespace {

using nlohmann::json;

Vec vec_from(const json& arr, int want = -1) {
  if (!arr.is_array()) throw ConfigError("expected a JSON array of numbers");
  Vec v(arr.size());
  for (size_t i = 0; i < arr.size(); ++i) v[i] = arr[i].get<double>();
  if (want >= 0 && v.size() != want)
    throw ConfigError("vector has wrong length in config");
  return v;
}

json vec_json(const Vec& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Mat mat_from(const json& rows, int want) {
  if (!rows.is_array() || rows.empty()) throw ConfigError("expected a JSON matrix");
  Mat a(rows.size(), rows[0].size());
  for (size_t r = 0; r < rows.size(); ++r) {
    if (static_cast<int>(rows[r].size()) != a.cols())
      throw ConfigError("ragged JSON matrix");
    for (int c = 0; c < a.cols(); ++c) a(r, c) = rows[r][c].get<double>();
  }
  if (want >= 0 && (a.rows() != want || a.cols() != want))
    throw ConfigError("matrix has wrong shape in config");
  return a;
}

json mat_json(const Mat& a) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < a.cols(); ++c) row.push_back(a(r, c));
    rows.push_back(row);
  }
  return rows;
}

FieldPtr field_from(const json& doc, int n) {
  std::string kind = doc.at("kind").get<std::string>();
  json params = doc.value("params", json::object());
  if (kind == "zero") return std::make_shared<ZeroField>(n);
  if (kind == "constant")
    return std::make_shared<ConstantField>(vec_from(params.at("value"), n));
  if (kind == "linear")
    return std::make_shared<LinearField>(mat_from(params.at("matrix"), n));
  if (kind == "tanh") {
    Vec amp;
    if (params.at("amplitude").is_number())
      amp = Vec::Constant(n, params.at("amplitude").get<double>());
    else
      amp = vec_from(params.at("amplitude"), n);
    return std::make_shared<TanhField>(amp, params.value("rate", 1.0));
  }
  if (kind == "attraction_repulsion")
    return builtin_attraction_repulsion(
        n, params.at("c_a").get<double>(), params.at("l_a").get<double>(),
        params.at("c_r").get<double>(), params.at("l_r").get<double>());
  throw ConfigError("unknown field kind: " + kind);
}

json field_json(const VectorField& f) {
  json doc;
  doc["kind"] = f.kind();
  json params = json::object();
  if (auto* c = dynamic_cast<const ConstantField*>(&f)) {
    params["value"] = vec_json(c->value());
  } else if (auto* l = dynamic_cast<const LinearField*>(&f)) {
    params["matrix"] = mat_json(l->matrix());
  } else if (auto* t = dynamic_cast<const TanhField*>(&f)) {
    params["amplitude"] = vec_json(t->amplitude());
    params["rate"] = t->rate();
  } else if (auto* ar = dynamic_cast<const AttractionRepulsionKernel*>(&f)) {
    params["c_a"] = ar->c_a();
    params["l_a"] = ar->l_a();
    params["c_r"] = ar->c_r();
    params["l_r"] = ar->l_r();
  }
  doc["params"] = params;
  return doc;
}

CostPtr cost_from(const json& doc, int n) {
  std::string kind = doc.at("kind").get<std::string>();
  json params = doc.value("params", json::object());
  if (kind == "zero") return std::make_shared<ZeroCost>(n);
  if (kind == "tanh") {
    Vec w = params.contains("weights") ? vec_from(params.at("weights"), n)
                                       : Vec::Ones(n);
    return std::make_shared<TanhCost>(w);
  }
  if (kind == "quadratic")
    return std::make_shared<QuadraticCost>(vec_from(params.at("target"), n));
  if (kind == "linear")
    return std::make_shared<LinearCost>(vec_from(params.at("weights"), n));
  throw ConfigError("unknown cost kind: " + kind);
}

json cost_json(const TerminalCost& c) {
  json doc;
  doc["kind"] = c.kind();
  json params = json::object();
  if (auto* t = dynamic_cast<const TanhCost*>(&c)) {
    params["weights"] = vec_json(t->weights());
  } else if (auto* q = dynamic_cast<const QuadraticCost*>(&c)) {
    params["target"] = vec_json(q->target());
  } else if (auto* l = dynamic_cast<const LinearCost*>(&c)) {
    params["weights"] = vec_json(l->weights());
  }
  doc["params"] = params;
  return doc;
}

// Portable uniform double in [-1, 1) from a mt19937_64 stream.
double unit_draw(std::mt19937_64& rng) {
  return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
}

EmpiricalMeasure theta_from(const json& doc, int n, std::uint64_t seed) {
  std::string kind = doc.at("kind").get<std::string>();
  json params = doc.value("params", json::object());
  if (kind == "points") {
    std::vector<Vec> pts;
    for (const auto& row : params.at("points")) pts.push_back(vec_from(row, n));
    return EmpiricalMeasure(std::move(pts));
  }
  if (kind == "dirac") {
    return EmpiricalMeasure::dirac(vec_from(params.at("point"), n),
                                   params.value("count", 1));
  }
  if (kind == "uniform") {
    Vec center = params.contains("center") ? vec_from(params.at("center"), n)
                                           : Vec::Zero(n);
    double radius = params.value("radius", 1.0);
    int count = params.value("count", 10);
    std::mt19937_64 rng(seed);
    std::vector<Vec> pts;
    pts.reserve(count);
    for (int k = 0; k < count; ++k) {
      Vec x(n);
      for (int i = 0; i < n; ++i) x[i] = center[i] + radius * unit_draw(rng);
      pts.push_back(std::move(x));
    }
    return EmpiricalMeasure(std::move(pts));
  }
  throw ConfigError("unknown theta kind: " + kind);
}

json theta_json(const EmpiricalMeasure& m) {
  json rows = json::array();
  for (const auto& p : m.points()) rows.push_back(vec_json(p));
  return json{{"kind", "points"}, {"params", {{"points", rows}}}};
}

PiecewiseControl piecewise_from(const json& doc) {
  PiecewiseControl u;
  for (const auto& t : doc.at("times")) u.times.push_back(t.get<double>());
  for (const auto& v : doc.at("values")) u.values.push_back(vec_from(v));
  return u;
}

json piecewise_json(const PiecewiseControl& u) {
  json vals = json::array();
  for (const auto& v : u.values) vals.push_back(vec_json(v));
  return json{{"times", u.times}, {"values", vals}};
}

ReducedControl reduced_from(const json& doc) {
  ReducedControl ctrl;
  ctrl.s_end = doc.at("s_end").get<double>();
  for (const auto& a : doc.at("alpha")) ctrl.alpha.push_back(a.get<double>());
  for (const auto& b : doc.at("beta")) ctrl.beta.push_back(vec_from(b));
  return ctrl;
}

json reduced_json(const ReducedControl& ctrl) {
  json betas = json::array();
  for (const auto& b : ctrl.beta) betas.push_back(vec_json(b));
  return json{{"s_end", ctrl.s_end}, {"alpha", ctrl.alpha}, {"beta", betas}};
}

ScenarioConfig config_from(const json& doc) {
  ScenarioConfig cfg;
  auto& spec = cfg.spec;
  spec.name = doc.value("name", "scenario");
  spec.n = doc.at("n").get<int>();
  spec.m = doc.at("m").get<int>();
  spec.horizon = doc.at("horizon").get<double>();
  spec.budget = doc.at("budget").get<double>();
  spec.relax_a3 = doc.value("relax_a3", false);

  if (doc.contains("solver")) {
    const json& s = doc.at("solver");
    cfg.solver.grid_cells = s.value("grid_cells", cfg.solver.grid_cells);
    cfg.solver.t_cells = s.value("t_cells", cfg.solver.t_cells);
    cfg.solver.tol_gap = s.value("tol_gap", cfg.solver.tol_gap);
    cfg.solver.max_iterations = s.value("max_iterations", cfg.solver.max_iterations);
    cfg.solver.workers = s.value("workers", cfg.solver.workers);
    cfg.solver.seed = s.value("seed", cfg.solver.seed);
    cfg.solver.checker_tol = s.value("checker_tol", cfg.solver.checker_tol);
    cfg.solver.eps_alpha = s.value("eps_alpha", cfg.solver.eps_alpha);
    cfg.solver.eps_beta = s.value("eps_beta", cfg.solver.eps_beta);
  }

  spec.drift = field_from(doc.at("drift"), spec.n);
  spec.kernel = field_from(doc.at("kernel"), spec.n);
  if (static_cast<int>(doc.at("control_fields").size()) != spec.m)
    throw ConfigError("control_fields must list exactly m fields");
  for (const auto& f : doc.at("control_fields"))
    spec.controls.push_back(field_from(f, spec.n));
  spec.cost = cost_from(doc.at("cost"), spec.n);
  spec.theta = theta_from(doc.at("theta"), spec.n, cfg.solver.seed);

  if (doc.contains("bounds")) {
    spec.sup_c = doc.at("bounds").value("C", spec.sup_c);
    spec.lipschitz_l = doc.at("bounds").value("L", spec.lipschitz_l);
  }

  if (doc.contains("control")) {
    const json& c = doc.at("control");
    std::string kind = c.at("kind").get<std::string>();
    if (kind == "piecewise")
      cfg.control_u = piecewise_from(c);
    else if (kind == "reduced")
      cfg.control_reduced = reduced_from(c);
    else if (kind == "csv")
      cfg.control_csv = c.at("path").get<std::string>();
    else
      throw ConfigError("unknown control kind: " + kind);
  }
  cfg.project = doc.value("project", false);

  cfg.spec.validate();
  return cfg;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  return parse_config(text, ConfigOverrides{});
}

ScenarioConfig parse_config(const std::string& text, const ConfigOverrides& ov) {
  try {
    json doc = json::parse(text);
    // A manifest embeds the fully resolved scenario; rerunning from it
    // reproduces the original run.
    if (doc.contains("resolved_config")) doc = doc.at("resolved_config");
    if (ov.grid_cells) doc["solver"]["grid_cells"] = *ov.grid_cells;
    if (ov.t_cells) doc["solver"]["t_cells"] = *ov.t_cells;
    if (ov.workers) doc["solver"]["workers"] = *ov.workers;
    if (ov.tol_gap) doc["solver"]["tol_gap"] = *ov.tol_gap;
    if (ov.seed) doc["solver"]["seed"] = *ov.seed;
    if (ov.particles) {
      auto& theta = doc.at("theta");
      if (theta.at("kind").get<std::string>() == "points")
        throw ConfigError(
            "cannot override the particle count of an explicit point list");
      theta["params"]["count"] = *ov.particles;
    }
    return config_from(doc);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
}

ScenarioConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_canonical_json(const ScenarioConfig& cfg) {
  const auto& spec = cfg.spec;
  json doc;
  doc["name"] = spec.name;
  doc["n"] = spec.n;
  doc["m"] = spec.m;
  doc["horizon"] = spec.horizon;
  doc["budget"] = spec.budget;
  doc["relax_a3"] = spec.relax_a3;
  doc["drift"] = field_json(*spec.drift);
  doc["kernel"] = field_json(*spec.kernel);
  json ctrls = json::array();
  for (const auto& f : spec.controls) ctrls.push_back(field_json(*f));
  doc["control_fields"] = ctrls;
  doc["cost"] = cost_json(*spec.cost);
  doc["theta"] = theta_json(spec.theta);
  doc["bounds"] = {{"C", spec.sup_c}, {"L", spec.lipschitz_l}};
  doc["solver"] = {{"grid_cells", cfg.solver.grid_cells},
                   {"t_cells", cfg.solver.t_cells},
                   {"tol_gap", cfg.solver.tol_gap},
                   {"max_iterations", cfg.solver.max_iterations},
                   {"workers", cfg.solver.workers},
                   {"seed", cfg.solver.seed},
                   {"checker_tol", cfg.solver.checker_tol},
                   {"eps_alpha", cfg.solver.eps_alpha},
                   {"eps_beta", cfg.solver.eps_beta}};
  if (cfg.control_u) {
    doc["control"] = piecewise_json(*cfg.control_u);
    doc["control"]["kind"] = "piecewise";
  } else if (cfg.control_reduced) {
    doc["control"] = reduced_json(*cfg.control_reduced);
    doc["control"]["kind"] = "reduced";
  } else if (!cfg.control_csv.empty()) {
    doc["control"] = {{"kind", "csv"}, {"path", cfg.control_csv}};
  }
  doc["project"] = cfg.project;
  return doc.dump(2);
}

std::string field_to_json(const VectorField& f) { return field_json(f).dump(); }

FieldPtr field_from_json(const std::string& text, int n) {
  return field_from(json::parse(text), n);
}

std::string cost_to_json(const TerminalCost& c) { return cost_json(c).dump(); }

CostPtr cost_from_json(const std::string& text, int n) {
  return cost_from(json::parse(text), n);
}

}  // namespace itc
