#include "itc/pmp_checker.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace itc {

std::string ReducedCheckReport::summary() const {
  std::ostringstream os;
  os << (passed ? "PASS" : "FAIL") << " reduced maximum condition: "
     << violations.size() << " cell(s) above tol, integrated defect "
     << integrated_defect << ", worst " << worst_defect << " at cell "
     << worst_cell << ", boundary residual " << boundary_residual;
  return os.str();
}

ReducedCheckReport check_reduced(const ProblemSpec& spec,
                                 const ReducedControl& ctrl,
                                 const ParticleTrajectory& traj,
                                 const LiftedTrajectory& lifted, double lambda,
                                 double tol_rel) {
  if (lifted.cells() != ctrl.cells())
    throw DimensionError("check_reduced: control and lifted grids disagree");
  CellHamiltonians cells = compute_cell_hamiltonians(spec, ctrl, traj, lifted);
  const int nc = ctrl.cells();
  const double ds = ctrl.ds();

  ReducedCheckReport rep;
  for (int c = 0; c < nc; ++c) {
    double h1 = cells.drift_sym[c] + lambda;
    double h0 = 0.0;
    for (int i = 0; i < spec.m; ++i)
      h0 = std::max(h0, std::abs(cells.control(i, c)));
    double current = ctrl.alpha[c] * h1;
    for (int i = 0; i < spec.m; ++i)
      current += ctrl.beta[c][i] * cells.control(i, c);
    double defect = std::max(h1, h0) - current;
    rep.integrated_defect += ds * defect;
    if (defect > rep.worst_defect) {
      rep.worst_defect = defect;
      rep.worst_cell = c;
    }
    double tol = checker_tol(h1, h0, tol_rel);
    rep.tol = std::max(rep.tol, tol);
    if (defect > tol) rep.violations.push_back({c, defect});
  }

  const auto& last = lifted.nodes.back();
  for (int k = 0; k < last.size(); ++k) {
    Vec want = -spec.cost->gradient(last.y[k]);
    rep.boundary_residual =
        std::max(rep.boundary_residual, (last.p[k] - want).lpNorm<1>());
  }
  const auto& first = lifted.nodes.front();
  for (int k = 0; k < first.size(); ++k)
    rep.initial_residual = std::max(
        rep.initial_residual, (first.y[k] - spec.theta.point(k)).lpNorm<1>());

  rep.passed = rep.violations.empty() && rep.boundary_residual <= 1e-9 &&
               rep.initial_residual <= 1e-12;
  return rep;
}

std::string ImpulsiveCheckReport::summary() const {
  std::ostringstream os;
  auto line = [&os](const char* name, const ConditionSuite& s) {
    os << "  " << name << ": " << (s.passed ? "PASS" : "FAIL") << " ("
       << s.cells_checked << " cells, worst defect " << s.worst_defect
       << " at cell " << s.worst_cell << ")\n";
  };
  os << (passed ? "PASS" : "FAIL") << " impulsive maximum conditions\n";
  line("MaxCond1 (H1 >= H0 off spt dV)  ", maxcond1);
  line("MaxCond2 (H1 == H0 on a.c. part)", maxcond2);
  line("MaxCond3 (H1 <= H0 along jumps) ", maxcond3);
  os << "  completion characteristic residual " << completion_ode_residual;
  return os.str();
}

namespace {

void record(ConditionSuite& suite, int cell, double defect, double weight,
            double tol) {
  ++suite.cells_checked;
  suite.integrated_defect += weight * defect;
  if (defect > suite.worst_defect) {
    suite.worst_defect = defect;
    suite.worst_cell = cell;
  }
  if (defect > tol) {
    suite.violations.push_back({cell, defect});
    suite.passed = false;
  }
}

}  // namespace

ImpulsiveCheckReport check_impulsive(const ProblemSpec& spec,
                                     const ImpulsiveSolution& imp,
                                     const ReducedControl& ctrl,
                                     const LiftedTrajectory& lifted,
                                     double lambda, double tol_rel,
                                     const ProjectionOptions& opts) {
  if (lifted.cells() != ctrl.cells())
    throw DimensionError("check_impulsive: missing or mismatched costate projection");
  const int nc = ctrl.cells();
  const double ds = ctrl.ds();

  ImpulsiveCheckReport rep;
  rep.classes.assign(nc, CellClass::NoImpulse);
  for (const auto& jump : imp.jumps)
    for (int c = jump.cell_begin; c < jump.cell_end; ++c)
      rep.classes[c] = CellClass::Jump;
  for (const auto& dead : imp.dead_runs)
    for (int c = dead.first; c < dead.second; ++c) rep.classes[c] = CellClass::Dead;
  for (int c = 0; c < nc; ++c) {
    if (rep.classes[c] != CellClass::NoImpulse) continue;
    if (ctrl.beta[c].lpNorm<1>() > opts.eps_beta) rep.classes[c] = CellClass::AcControl;
  }

  // Cell Hamiltonians along the projected costate flow: on absolutely
  // continuous stretches rho_t and gamma_s are the same ensembles, and the
  // fast ensembles omega^tau are gamma over the jump run, so all three
  // suites evaluate on the reduced grid.
  ParticleTrajectory traj;
  traj.s_nodes = lifted.s_nodes;
  traj.states.reserve(lifted.nodes.size());
  for (const auto& node : lifted.nodes) traj.states.push_back(node.y);
  CellHamiltonians cells = compute_cell_hamiltonians(spec, ctrl, traj, lifted);

  for (int c = 0; c < nc; ++c) {
    double h1 = cells.drift_sym[c] + lambda;
    double h0 = 0.0;
    for (int i = 0; i < spec.m; ++i)
      h0 = std::max(h0, std::abs(cells.control(i, c)));
    double tol = checker_tol(h1, h0, tol_rel);
    rep.tol = std::max(rep.tol, tol);
    switch (rep.classes[c]) {
      case CellClass::NoImpulse:
        // weight dt = alpha ds
        record(rep.maxcond1, c, std::max(0.0, h0 - h1), ctrl.alpha[c] * ds, tol);
        break;
      case CellClass::AcControl:
        // weight dV = |beta| ds
        record(rep.maxcond2, c, std::abs(h1 - h0), ctrl.beta[c].lpNorm<1>() * ds,
               tol);
        break;
      case CellClass::Jump:
        if (ctrl.beta[c].lpNorm<1>() > opts.eps_beta)
          record(rep.maxcond3, c, std::max(0.0, h1 - h0),
                 ctrl.beta[c].lpNorm<1>() * ds, tol);
        break;
      case CellClass::Dead:
        break;
    }
  }

  // Characteristic form of the jump-phase transport: along every completion
  // the projected pairs must solve dy/dsigma = sum u_i f_i(y),
  // dp/dsigma = -(sum u_i Jf_i(y))^T p, certified by finite differences.
  for (const auto& jump : imp.jumps) {
    for (size_t fc = 0; fc + 1 < jump.fast_nodes.size(); ++fc) {
      if (fc >= jump.active_cells.size()) break;
      int c = jump.active_cells[fc];
      double len = jump.fast_nodes[fc + 1] - jump.fast_nodes[fc];
      if (len <= 0) continue;
      const Vec& u = jump.attached_control[fc];
      const auto& left = lifted.nodes[c];
      const auto& right = lifted.nodes[c + 1];
      for (int k = 0; k < left.size(); ++k) {
        Vec ymid = 0.5 * (left.y[k] + right.y[k]);
        Vec pmid = 0.5 * (left.p[k] + right.p[k]);
        Vec fy = Vec::Zero(spec.n);
        Mat jf = Mat::Zero(spec.n, spec.n);
        for (int i = 0; i < spec.m; ++i) {
          fy += u[i] * spec.controls[i]->eval(ymid);
          jf += u[i] * spec.controls[i]->jacobian(ymid);
        }
        double ry = ((right.y[k] - left.y[k]) / len - fy).lpNorm<1>();
        double rp = ((right.p[k] - left.p[k]) / len + jf.transpose() * pmid).lpNorm<1>();
        rep.completion_ode_residual =
            std::max({rep.completion_ode_residual, ry, rp});
      }
    }
  }

  rep.integrated_defect = rep.maxcond1.integrated_defect +
                          rep.maxcond2.integrated_defect +
                          rep.maxcond3.integrated_defect;
  rep.worst_cell = rep.maxcond1.worst_cell;
  double worst = rep.maxcond1.worst_defect;
  if (rep.maxcond2.worst_defect > worst) {
    worst = rep.maxcond2.worst_defect;
    rep.worst_cell = rep.maxcond2.worst_cell;
  }
  if (rep.maxcond3.worst_defect > worst) rep.worst_cell = rep.maxcond3.worst_cell;
  rep.passed = rep.maxcond1.passed && rep.maxcond2.passed && rep.maxcond3.passed;
  return rep;
}

}  // namespace itc
