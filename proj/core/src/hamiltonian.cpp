#include "itc/hamiltonian.hpp"

#include <cmath>

#include "itc/parallel.hpp"

namespace itc {

void costate_rhs(const ProblemSpec& spec, double a, const Vec& b,
                 const std::vector<Vec>& y, const std::vector<Vec>& p,
                 std::vector<Vec>& out, int workers) {
  const int count = static_cast<int>(y.size());
  const bool no_kernel = spec.kernel->is_zero();
  parallel_for(count, workers, [&](int kk) {
    Mat j = a * spec.drift->jacobian(y[kk]);
    for (int i = 0; i < spec.m; ++i)
      j += b[i] * spec.controls[i]->jacobian(y[kk]);
    Vec v = -(j.transpose() * p[kk]);
    if (!no_kernel && a != 0.0) {
      Vec acc = Vec::Zero(spec.n);
      for (int q = 0; q < count; ++q)
        acc += spec.kernel->jacobian(y[kk] - y[q]).transpose() * (p[kk] - p[q]);
      v -= (a / count) * acc;
    }
    out[kk] = std::move(v);
  });
}

LiftedTrajectory solve_backward(const ProblemSpec& spec,
                                const ReducedControl& ctrl,
                                const ParticleTrajectory& traj, int workers) {
  if (traj.cells() != ctrl.cells())
    throw DimensionError("solve_backward: trajectory and control grids disagree");
  const int nc = ctrl.cells();
  const int count = traj.particles();
  const double ds = ctrl.ds();

  LiftedTrajectory lifted;
  lifted.s_nodes = traj.s_nodes;
  lifted.nodes.resize(nc + 1);
  for (int j = 0; j <= nc; ++j) lifted.nodes[j].y = traj.states[j];

  auto& terminal = lifted.nodes[nc].p;
  terminal.resize(count);
  for (int kk = 0; kk < count; ++kk)
    terminal[kk] = -spec.cost->gradient(traj.states[nc][kk]);

  std::vector<Vec> fl(count), fr(count), ymid(count);
  std::vector<Vec> k1(count), k2(count), k3(count), k4(count), tmp(count);
  const double h = -ds;
  for (int c = nc - 1; c >= 0; --c) {
    const double a = ctrl.alpha[c];
    const Vec& b = ctrl.beta[c];
    const auto& yl = traj.states[c];
    const auto& yr = traj.states[c + 1];
    reduced_rhs(spec, a, b, yl, fl, workers);
    reduced_rhs(spec, a, b, yr, fr, workers);
    for (int kk = 0; kk < count; ++kk)
      ymid[kk] = 0.5 * (yl[kk] + yr[kk]) + (ds / 8.0) * (fl[kk] - fr[kk]);

    const auto& pr = lifted.nodes[c + 1].p;
    costate_rhs(spec, a, b, yr, pr, k1, workers);
    for (int kk = 0; kk < count; ++kk) tmp[kk] = pr[kk] + 0.5 * h * k1[kk];
    costate_rhs(spec, a, b, ymid, tmp, k2, workers);
    for (int kk = 0; kk < count; ++kk) tmp[kk] = pr[kk] + 0.5 * h * k2[kk];
    costate_rhs(spec, a, b, ymid, tmp, k3, workers);
    for (int kk = 0; kk < count; ++kk) tmp[kk] = pr[kk] + h * k3[kk];
    costate_rhs(spec, a, b, yl, tmp, k4, workers);

    auto& pl = lifted.nodes[c].p;
    pl.resize(count);
    for (int kk = 0; kk < count; ++kk) {
      pl[kk] = pr[kk] + (h / 6.0) * (k1[kk] + 2.0 * k2[kk] + 2.0 * k3[kk] + k4[kk]);
      if (!pl[kk].allFinite())
        throw IntegrationError("solve_backward: non-finite costate in cell " +
                               std::to_string(c));
    }
  }
  return lifted;
}

namespace {

// Interaction term in the symmetric form (1/(2N^2)) sum (p_k - p_j) g(y_k - y_j).
double interaction_sym(const ProblemSpec& spec, const EnsembleState& gamma) {
  if (spec.kernel->is_zero()) return 0.0;
  const int count = gamma.size();
  double acc = 0.0;
  for (int k = 0; k < count; ++k)
    for (int j = 0; j < count; ++j)
      acc += (gamma.p[k] - gamma.p[j]).dot(spec.kernel->eval(gamma.y[k] - gamma.y[j]));
  return 0.5 * acc / (static_cast<double>(count) * count);
}

// Same quantity through the raw route (1/N^2) sum p_k g(y_k - y_j).
double interaction_raw(const ProblemSpec& spec, const EnsembleState& gamma) {
  if (spec.kernel->is_zero()) return 0.0;
  const int count = gamma.size();
  double acc = 0.0;
  for (int k = 0; k < count; ++k)
    for (int j = 0; j < count; ++j)
      acc += gamma.p[k].dot(spec.kernel->eval(gamma.y[k] - gamma.y[j]));
  return acc / (static_cast<double>(count) * count);
}

double drift_pairing(const ProblemSpec& spec, const EnsembleState& gamma) {
  const int count = gamma.size();
  double acc = 0.0;
  for (int k = 0; k < count; ++k) acc += gamma.p[k].dot(spec.drift->eval(gamma.y[k]));
  return acc / count;
}

double control_pairing(const ProblemSpec& spec, const EnsembleState& gamma, int i) {
  const int count = gamma.size();
  double acc = 0.0;
  for (int k = 0; k < count; ++k)
    acc += gamma.p[k].dot(spec.controls[i]->eval(gamma.y[k]));
  return acc / count;
}

}  // namespace

double hamiltonian_h1(const ProblemSpec& spec, const EnsembleState& gamma,
                      double lambda) {
  return interaction_sym(spec, gamma) + drift_pairing(spec, gamma) + lambda;
}

double hamiltonian_h0(const ProblemSpec& spec, const EnsembleState& gamma) {
  double best = 0.0;
  for (int i = 0; i < spec.m; ++i)
    best = std::max(best, std::abs(control_pairing(spec, gamma, i)));
  return best;
}

double hamiltonian_total(const ProblemSpec& spec, const EnsembleState& gamma,
                         double lambda, double a, const Vec& b) {
  double acc = a * (interaction_sym(spec, gamma) + drift_pairing(spec, gamma) + lambda);
  for (int i = 0; i < spec.m; ++i) acc += b[i] * control_pairing(spec, gamma, i);
  return acc;
}

CellHamiltonians compute_cell_hamiltonians(const ProblemSpec& spec,
                                           const ReducedControl& ctrl,
                                           const ParticleTrajectory& traj,
                                           const LiftedTrajectory& lifted) {
  if (lifted.cells() != ctrl.cells() || traj.cells() != ctrl.cells())
    throw DimensionError("compute_cell_hamiltonians: grids disagree");
  const int nc = ctrl.cells();
  const int count = lifted.particles();
  const double ds = ctrl.ds();

  CellHamiltonians cells;
  cells.drift_sym.resize(nc);
  cells.drift_raw.resize(nc);
  cells.control = Mat::Zero(spec.m, nc);

  std::vector<Vec> fl(count), fr(count), gl(count), gr(count);
  EnsembleState mid;
  mid.y.resize(count);
  mid.p.resize(count);
  for (int c = 0; c < nc; ++c) {
    const double a = ctrl.alpha[c];
    const Vec& b = ctrl.beta[c];
    const EnsembleState& left = lifted.nodes[c];
    const EnsembleState& right = lifted.nodes[c + 1];
    reduced_rhs(spec, a, b, left.y, fl);
    reduced_rhs(spec, a, b, right.y, fr);
    costate_rhs(spec, a, b, left.y, left.p, gl);
    costate_rhs(spec, a, b, right.y, right.p, gr);
    for (int kk = 0; kk < count; ++kk) {
      mid.y[kk] = 0.5 * (left.y[kk] + right.y[kk]) + (ds / 8.0) * (fl[kk] - fr[kk]);
      mid.p[kk] = 0.5 * (left.p[kk] + right.p[kk]) + (ds / 8.0) * (gl[kk] - gr[kk]);
    }
    auto simpson = [](double l, double m, double r) {
      return (l + 4.0 * m + r) / 6.0;
    };
    cells.drift_sym[c] = simpson(
        interaction_sym(spec, left) + drift_pairing(spec, left),
        interaction_sym(spec, mid) + drift_pairing(spec, mid),
        interaction_sym(spec, right) + drift_pairing(spec, right));
    cells.drift_raw[c] = simpson(
        interaction_raw(spec, left) + drift_pairing(spec, left),
        interaction_raw(spec, mid) + drift_pairing(spec, mid),
        interaction_raw(spec, right) + drift_pairing(spec, right));
    for (int i = 0; i < spec.m; ++i)
      cells.control(i, c) = simpson(control_pairing(spec, left, i),
                                    control_pairing(spec, mid, i),
                                    control_pairing(spec, right, i));
  }
  return cells;
}

double control_derivative(const ProblemSpec& spec, const ReducedControl& ctrl,
                          const CellHamiltonians& cells,
                          const std::vector<double>& d_alpha,
                          const std::vector<Vec>& d_beta) {
  if (static_cast<int>(d_alpha.size()) != ctrl.cells() ||
      static_cast<int>(d_beta.size()) != ctrl.cells())
    throw DimensionError("control_derivative: perturbation grid disagrees");
  const double ds = ctrl.ds();
  double acc = 0.0;
  for (int c = 0; c < ctrl.cells(); ++c) {
    double cell = d_alpha[c] * cells.drift_raw[c];
    for (int i = 0; i < spec.m; ++i) cell += d_beta[c][i] * cells.control(i, c);
    acc += ds * cell;
  }
  return -acc;
}

}  // namespace itc
