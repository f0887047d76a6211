#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "itc/reduced_system.hpp"

namespace itc {

/// Piecewise-linear cumulative time change xi(s) = int_0^s alpha on the
/// control grid, with its right-continuous pseudo-inverse.
struct TimeChange {
  double s_end = 0.0;
  std::vector<double> nodes;  // xi at the grid nodes; nodes[0] == 0

  double horizon() const { return nodes.back(); }
  double ds() const { return s_end / (nodes.size() - 1); }
  double value(double s) const;
  /// inf{s : xi(s) > t} for t < xi(S); returns S at t = xi(S). On flat
  /// stretches at level t this is the right endpoint of the stretch.
  double pseudo_inverse(double t) const;
};

TimeChange xi(const ReducedControl& ctrl);

/// One atom of the variation measure: a jump of the measure trajectory.
struct JumpAtom {
  double tau = 0.0;     // jump time in [0, T]
  double length = 0.0;  // T_tau, the fast-time extent of the jump
  Vec omega;            // attached-control impulse, U(tau) - U(tau-)
  int cell_begin = 0;   // reduced-grid run [cell_begin, cell_end)
  int cell_end = 0;
  EmpiricalMeasure left_state;                // mu at tau-
  std::vector<double> fast_nodes;             // graph-completion grid on [0, T_tau]
  std::vector<EmpiricalMeasure> completion;   // m^tau at the fast nodes
  std::vector<Vec> attached_control;          // u^tau per fast cell, sum_i |u_i| = 1
  std::vector<int> active_cells;              // reduced cells driving the fast cells
};

/// BV-in-time measure curve with jump atoms, cumulative control U and
/// cumulative variation V (right-continuous at jumps).
struct ImpulsiveSolution {
  std::vector<double> t_grid;
  std::vector<EmpiricalMeasure> mu;
  std::vector<Vec> cumulative_control;        // U at the t-nodes
  std::vector<double> cumulative_variation;   // V at the t-nodes
  std::vector<JumpAtom> jumps;
  std::vector<std::pair<int, int>> dead_runs;  // removed (alpha ~ 0, beta ~ 0) runs
  double variation_total = 0.0;                // V(T)

  /// Structural invariants: V nondecreasing, |U| increments dominated by V
  /// increments, completion endpoints matching, unit attached controls.
  void validate(double tol = 1e-8) const;
};

struct ProjectionOptions {
  int t_cells = 200;
  double eps_alpha = 1e-9;  // cells with alpha <= eps_alpha count as stopped time
  double eps_beta = 1e-9;   // |beta|_1 <= eps_beta counts as inactive
  int merge_gap = 2;        // runs separated by fewer cells merge
};

/// Projects a reduced process to the impulsive picture: detects jump runs,
/// builds U and V, graph completions with attached controls, and samples mu
/// on a uniform t-grid through the pseudo-inverse of xi.
ImpulsiveSolution project_to_impulsive(const ProblemSpec& spec,
                                       const ReducedControl& ctrl,
                                       const ParticleTrajectory& traj,
                                       const ProjectionOptions& opts = {});

struct JumpMapOptions {
  int substeps = 256;       // RK4 steps per composed flow
  double tol_comm = 1e-8;   // commutator defect tolerance on the support
  std::vector<int> order;   // 1-based composition order; empty = 1..m
};

/// Jump exit map for commuting control fields: pushforward of `left`
/// through the composed flows of f_i over times omega_i. Refuses (with the
/// measured defect) when the fields fail to commute on the support.
EmpiricalMeasure commutative_jump_map(const ProblemSpec& spec,
                                      const EmpiricalMeasure& left,
                                      const Vec& omega,
                                      const JumpMapOptions& opts = {});

}  // namespace itc
