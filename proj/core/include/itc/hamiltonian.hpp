#pragma once

#include <vector>

#include "itc/reduced_system.hpp"

namespace itc {

/// One-node lifted ensemble: N state-costate pairs realizing gamma^N.
struct EnsembleState {
  std::vector<Vec> y;
  std::vector<Vec> p;
  int size() const { return static_cast<int>(y.size()); }
};

/// Node-sampled state-costate ensemble on [0, S]. The terminal node always
/// satisfies p_k(S) = -grad l(y_k(S)); the first state marginal is theta.
struct LiftedTrajectory {
  std::vector<double> s_nodes;
  std::vector<EnsembleState> nodes;
  int cells() const { return static_cast<int>(s_nodes.size()) - 1; }
  int particles() const { return nodes.empty() ? 0 : nodes[0].size(); }
};

/// RHS of the costate system for one frozen control value:
///   out_k = -(a/N) sum_j Jg(y_k - y_j)^T (p_k - p_j)
///           - (a Jf_0(y_k) + sum_i b_i Jf_i(y_k))^T p_k.
void costate_rhs(const ProblemSpec& spec, double a, const Vec& b,
                 const std::vector<Vec>& y, const std::vector<Vec>& p,
                 std::vector<Vec>& out, int workers = 1);

/// Backward RK4 sweep of the costates against the stored forward states
/// (cubic-Hermite interpolated at the half stages), from the terminal
/// condition p_k(S) = -grad l(y_k(S)).
LiftedTrajectory solve_backward(const ProblemSpec& spec,
                                const ReducedControl& ctrl,
                                const ParticleTrajectory& traj,
                                int workers = 1);

/// H^1(gamma, lambda) = (1/2) iint (p-q) g(y-z) dgamma dgamma
///                      + int p f_0 dgamma + lambda.
double hamiltonian_h1(const ProblemSpec& spec, const EnsembleState& gamma,
                      double lambda);

/// H^0(gamma) = max_i |int p f_i dgamma|.
double hamiltonian_h0(const ProblemSpec& spec, const EnsembleState& gamma);

/// H(gamma, lambda, a, b), affine in (a, b); its maximum over A equals
/// max{H^1, H^0}.
double hamiltonian_total(const ProblemSpec& spec, const EnsembleState& gamma,
                         double lambda, double a, const Vec& b);

/// Per-cell Simpson quadrature of the Hamiltonian components along a lifted
/// trajectory, with cubic-Hermite midpoints.
///   drift_sym: symmetric interaction form plus int p f_0 dgamma
///   drift_raw: plain route (1/N^2) sum_{k,j} p_k g(y_k - y_j) + int p f_0
///   control(i, c): int p f_i dgamma on cell c
struct CellHamiltonians {
  std::vector<double> drift_sym;
  std::vector<double> drift_raw;
  Mat control;  // m x cells
  int cells() const { return static_cast<int>(drift_sym.size()); }
};

CellHamiltonians compute_cell_hamiltonians(const ProblemSpec& spec,
                                           const ReducedControl& ctrl,
                                           const ParticleTrajectory& traj,
                                           const LiftedTrajectory& lifted);

/// Derivative of the terminal cost along a control perturbation
/// (d_alpha, d_beta), via the costate sweep:
///   dI = -sum_c ds [ d_alpha_c * drift_raw_c + sum_i d_beta_{i,c} h_{i,c} ].
double control_derivative(const ProblemSpec& spec, const ReducedControl& ctrl,
                          const CellHamiltonians& cells,
                          const std::vector<double>& d_alpha,
                          const std::vector<Vec>& d_beta);

}  // namespace itc
