#include "itc/time_change.hpp"

#include <algorithm>
#include <cmath>

namespace itc {

double TimeChange::value(double s) const {
  const int nc = static_cast<int>(nodes.size()) - 1;
  s = std::clamp(s, 0.0, s_end);
  const double h = ds();
  int c = std::min(static_cast<int>(s / h), nc - 1);
  double w = (s - h * c) / h;
  return (1.0 - w) * nodes[c] + w * nodes[c + 1];
}

double TimeChange::pseudo_inverse(double t) const {
  const double horizon = nodes.back();
  if (t < -1e-12 || t > horizon + 1e-9 * (1.0 + horizon))
    throw ConstraintError("pseudo_inverse: t outside [0, T]");
  if (t >= horizon) return s_end;
  t = std::max(t, 0.0);
  // First node strictly above level t; the crossing lives in the cell
  // before it. Flat stretches at level t are skipped by construction.
  auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
  int j = static_cast<int>(it - nodes.begin());
  const double h = ds();
  double lo = nodes[j - 1], hi = nodes[j];
  return h * (j - 1) + (t - lo) / (hi - lo) * h;
}

TimeChange xi(const ReducedControl& ctrl) {
  ctrl.validate_cells();
  TimeChange tc;
  tc.s_end = ctrl.s_end;
  tc.nodes.resize(ctrl.cells() + 1);
  tc.nodes[0] = 0.0;
  const double h = ctrl.ds();
  for (int c = 0; c < ctrl.cells(); ++c)
    tc.nodes[c + 1] = tc.nodes[c] + ctrl.alpha[c] * h;
  return tc;
}

void ImpulsiveSolution::validate(double tol) const {
  for (size_t j = 0; j + 1 < t_grid.size(); ++j) {
    double dv = cumulative_variation[j + 1] - cumulative_variation[j];
    if (dv < -tol)
      throw ConstraintError("impulsive solution: V must be nondecreasing");
    double du = (cumulative_control[j + 1] - cumulative_control[j]).lpNorm<1>();
    if (du > dv + tol)
      throw ConstraintError("impulsive solution: |U| increments exceed V increments");
  }
  for (const auto& jump : jumps) {
    if (w1_distance(jump.completion.front(), jump.left_state) > tol)
      throw ConstraintError("impulsive solution: completion does not start at mu(tau-)");
    Vec integral = Vec::Zero(jump.omega.size());
    for (size_t c = 0; c + 1 < jump.fast_nodes.size(); ++c) {
      double len = jump.fast_nodes[c + 1] - jump.fast_nodes[c];
      if (std::abs(jump.attached_control[c].lpNorm<1>() - 1.0) > 1e-12)
        throw ConstraintError("impulsive solution: attached control not unit");
      integral += len * jump.attached_control[c];
    }
    if ((integral - jump.omega).lpNorm<1>() > tol)
      throw ConstraintError("impulsive solution: attached control integral misses omega");
  }
}

namespace {

struct Run {
  int begin = 0;  // [begin, end) cells with alpha <= eps_alpha
  int end = 0;
  bool active = false;
};

std::vector<Run> detect_runs(const ReducedControl& ctrl,
                             const ProjectionOptions& opts) {
  std::vector<Run> runs;
  const int nc = ctrl.cells();
  int c = 0;
  while (c < nc) {
    if (ctrl.alpha[c] > opts.eps_alpha) {
      ++c;
      continue;
    }
    Run r;
    r.begin = c;
    while (c < nc && ctrl.alpha[c] <= opts.eps_alpha) ++c;
    r.end = c;
    runs.push_back(r);
  }
  // Merge runs separated by fewer than merge_gap cells.
  std::vector<Run> merged;
  for (const auto& r : runs) {
    if (!merged.empty() && r.begin - merged.back().end < opts.merge_gap)
      merged.back().end = r.end;
    else
      merged.push_back(r);
  }
  for (auto& r : merged)
    for (int q = r.begin; q < r.end; ++q)
      if (ctrl.beta[q].lpNorm<1>() > opts.eps_beta) r.active = true;
  return merged;
}

}  // namespace

ImpulsiveSolution project_to_impulsive(const ProblemSpec& spec,
                                       const ReducedControl& ctrl,
                                       const ParticleTrajectory& traj,
                                       const ProjectionOptions& opts) {
  if (traj.cells() != ctrl.cells())
    throw DimensionError("project_to_impulsive: trajectory and control grids disagree");
  const int nc = ctrl.cells();
  const double h = ctrl.ds();
  const TimeChange tc = xi(ctrl);
  const double horizon = tc.horizon();

  ImpulsiveSolution imp;

  // Cumulative control and variation along reduced time.
  std::vector<Vec> ucum(nc + 1, Vec::Zero(spec.m));
  std::vector<double> vcum(nc + 1, 0.0);
  for (int c = 0; c < nc; ++c) {
    ucum[c + 1] = ucum[c] + h * ctrl.beta[c];
    vcum[c + 1] = vcum[c] + h * ctrl.beta[c].lpNorm<1>();
  }
  imp.variation_total = vcum[nc];

  for (const auto& r : detect_runs(ctrl, opts)) {
    if (!r.active) {
      imp.dead_runs.emplace_back(r.begin, r.end);
      continue;
    }
    JumpAtom jump;
    jump.cell_begin = r.begin;
    jump.cell_end = r.end;
    jump.tau = tc.nodes[r.begin];
    jump.left_state = traj.measure_at_node(r.begin);
    jump.omega = Vec::Zero(spec.m);
    jump.fast_nodes.push_back(0.0);
    jump.completion.push_back(jump.left_state);
    for (int c = r.begin; c < r.end; ++c) {
      double mass = ctrl.beta[c].lpNorm<1>();
      if (mass <= opts.eps_beta) continue;  // d-sigma-null cell
      jump.active_cells.push_back(c);
      jump.omega += h * ctrl.beta[c];
      Vec unit = ctrl.beta[c] / mass;
      unit /= unit.lpNorm<1>();
      jump.attached_control.push_back(std::move(unit));
      jump.fast_nodes.push_back(jump.fast_nodes.back() + h * mass);
      jump.completion.push_back(traj.measure_at_node(c + 1));
    }
    jump.length = jump.fast_nodes.back();
    // Bridge a stationary dead tail so the completion ends at mu(tau).
    jump.completion.back() = traj.measure_at_node(r.end);
    imp.jumps.push_back(std::move(jump));
  }

  // Sample mu, U, V on the uniform t-grid through the pseudo-inverse.
  const int nt = opts.t_cells;
  imp.t_grid.resize(nt + 1);
  imp.mu.reserve(nt + 1);
  imp.cumulative_control.resize(nt + 1);
  imp.cumulative_variation.resize(nt + 1);
  auto interp_cum = [&](double s, const std::vector<double>& nodes) {
    int c = std::min(static_cast<int>(s / h), nc - 1);
    double w = (s - h * c) / h;
    return (1.0 - w) * nodes[c] + w * nodes[c + 1];
  };
  for (int j = 0; j <= nt; ++j) {
    double t = horizon * j / nt;
    imp.t_grid[j] = t;
    double s = tc.pseudo_inverse(t);
    imp.mu.push_back(EmpiricalMeasure(traj.states_at(s)));
    int c = std::min(static_cast<int>(s / h), nc - 1);
    double w = (s - h * c) / h;
    imp.cumulative_control[j] = (1.0 - w) * ucum[c] + w * ucum[c + 1];
    imp.cumulative_variation[j] = interp_cum(s, vcum);
  }
  return imp;
}

EmpiricalMeasure commutative_jump_map(const ProblemSpec& spec,
                                      const EmpiricalMeasure& left,
                                      const Vec& omega,
                                      const JumpMapOptions& opts) {
  if (omega.size() != spec.m)
    throw DimensionError("commutative_jump_map: omega has wrong dimension");
  double defect = 0.0;
  for (int i = 1; i <= spec.m; ++i)
    for (int j = i + 1; j <= spec.m; ++j)
      defect = std::max(defect, commutator_defect(spec, i, j, left.points()));
  if (defect > opts.tol_comm)
    throw ConstraintError(
        "commutative_jump_map: control fields do not commute on the support "
        "(defect " + std::to_string(defect) + ")");

  std::vector<int> order = opts.order;
  if (order.empty()) {
    order.resize(spec.m);
    for (int i = 0; i < spec.m; ++i) order[i] = i + 1;
  }

  std::vector<Vec> pts = left.points();
  for (int idx : order) {
    if (idx < 1 || idx > spec.m)
      throw DimensionError("commutative_jump_map: bad composition order");
    const auto& f = *spec.controls[idx - 1];
    const double w = omega[idx - 1];
    if (w == 0.0) continue;
    const double hstep = w / opts.substeps;  // negative w flows backward
    for (auto& x : pts) {
      for (int st = 0; st < opts.substeps; ++st) {
        Vec k1 = f.eval(x);
        Vec k2 = f.eval(x + 0.5 * hstep * k1);
        Vec k3 = f.eval(x + 0.5 * hstep * k2);
        Vec k4 = f.eval(x + hstep * k3);
        x += (hstep / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      if (!x.allFinite())
        throw IntegrationError("commutative_jump_map: non-finite state in flow " +
                               std::to_string(idx));
    }
  }
  return EmpiricalMeasure(std::move(pts));
}

}  // namespace itc
