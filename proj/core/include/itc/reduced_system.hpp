#pragma once

#include <vector>

#include "itc/fields.hpp"

namespace itc {

/// Piecewise-constant original-time control u on [0, T].
struct PiecewiseControl {
  std::vector<double> times;  // K+1 breakpoints, times.front() == 0
  std::vector<Vec> values;    // K cell values in R^m

  int pieces() const { return static_cast<int>(values.size()); }
  int control_dim() const { return values.empty() ? 0 : static_cast<int>(values[0].size()); }
  /// Integral of sum_i |u_i| over [0, T].
  double variation() const;
  Vec value_at(double t) const;
  void validate(double horizon) const;
};

/// Piecewise-constant reduced control (alpha, beta) on a uniform grid of
/// [0, S]. Cell values must lie in A = {a >= 0, a + sum_i |b_i| <= 1}.
struct ReducedControl {
  double s_end = 0.0;         // S
  std::vector<double> alpha;  // one value per cell
  std::vector<Vec> beta;      // one value per cell, each in R^m

  int cells() const { return static_cast<int>(alpha.size()); }
  int control_dim() const { return beta.empty() ? 0 : static_cast<int>(beta[0].size()); }
  double ds() const { return s_end / cells(); }
  double node(int j) const { return s_end * j / cells(); }
  /// Quadrature value of the time-speed integral, sum_c alpha_c ds.
  double alpha_integral() const;

  /// Cellwise A-membership and finiteness.
  void validate_cells() const;
  /// validate_cells plus |integral(alpha) - horizon| <= tol_t.
  void validate(double horizon, double tol_t) const;

  static ReducedControl constant(double s_end, int cells, double a, const Vec& b);
};

/// Node-sampled solution of the reduced particle system on [0, S].
struct ParticleTrajectory {
  std::vector<double> s_nodes;
  std::vector<std::vector<Vec>> states;  // per node, N positions

  int cells() const { return static_cast<int>(s_nodes.size()) - 1; }
  int particles() const { return states.empty() ? 0 : static_cast<int>(states[0].size()); }
  EmpiricalMeasure measure_at_node(int j) const;
  /// Linear interpolation of particle positions at an arbitrary s in [0, S].
  std::vector<Vec> states_at(double s) const;

  // Largest visited value of sum_i |f_i| + |g * nu| (Manhattan), for
  // auditing the declared (A1) constant.
  double observed_field_sup = 0.0;
};

/// Default quadrature tolerance for the integral constraint on alpha.
inline double default_tol_t(double s_end) { return 1e-9 * s_end; }

/// Embeds an original control with variation M into the reduced system:
/// alpha = 1/(1 + |u|), beta = u/(1 + |u|) on the image grid of the time
/// change, then resampled to a uniform grid by exact cell averaging.
ReducedControl embed_control(const PiecewiseControl& u, double horizon,
                             double budget, int cells, double tol_t = -1.0);

/// Spends the remaining budget M - var(u) through a canceling pulse pair of
/// height about (M - var(u)) k on [0, 1/(2k)] and (1/(2k), 1/k] in the first
/// component; the returned control has variation exactly M.
PiecewiseControl saturate_budget(const PiecewiseControl& u, double budget,
                                 int k, double tol_t = 1e-12);

/// RK4 integration of the coupled reduced particle system, one step per
/// control cell, controls frozen per cell, interaction evaluated from the
/// concurrent ensemble at every stage.
ParticleTrajectory solve_forward(const ProblemSpec& spec,
                                 const ReducedControl& ctrl, int workers = 1);

/// (1/N) sum_k l(y_k(S)).
double terminal_cost(const ProblemSpec& spec, const ParticleTrajectory& traj);

/// Node-sampled solution of the original system on [0, T].
struct OriginalTrajectory {
  std::vector<double> t_nodes;
  std::vector<std::vector<Vec>> states;
  EmpiricalMeasure measure_at_node(int j) const;
};

/// Direct RK4 integration of the original system under u, independent of
/// the reduced-time machinery. States are reported on a uniform grid of
/// sample_cells+1 nodes; integration substeps never exceed max_dt.
OriginalTrajectory solve_original(const ProblemSpec& spec,
                                  const PiecewiseControl& u, int sample_cells,
                                  double max_dt);

/// RHS of the reduced particle system for one frozen control value; out
/// must have N entries. Exposed for integrators and quadrature helpers.
void reduced_rhs(const ProblemSpec& spec, double a, const Vec& b,
                 const std::vector<Vec>& y, std::vector<Vec>& out,
                 int workers = 1);

}  // namespace itc
