#pragma once

#include <utility>
#include <vector>

#include "itc/hamiltonian.hpp"

namespace itc {

struct FrankWolfeOptions {
  int max_iterations = 500;
  double tol_gap_rel = 1e-6;   // stop when gap <= tol_gap_rel * (1 + |cost|)
  double armijo_factor = 0.5;  // backtracking ratio
  double armijo_slope = 1e-4;  // required decrease fraction of step * gap
  double min_step = 1e-12;
  double stagnation_decrease = 1e-14;
  int workers = 1;
};

struct IterationRecord {
  double cost = 0.0;
  double residual = 0.0;  // Frank-Wolfe gap at the iterate
  double step = 0.0;
};

/// Outcome of the conditional-gradient run: the multiplier, the integrated
/// maximum-condition defect at the final iterate, and the search history.
struct ExtremalCertificate {
  double lambda = 0.0;
  double residual = 0.0;
  double cost = 0.0;
  int iterations = 0;
  double lambda_lo = 0.0;  // multiplier bracket actually used
  double lambda_hi = 0.0;
  bool degenerate_lambda = false;  // all cells tie at one level
  bool stagnated = false;          // line search could not decrease
  std::vector<IterationRecord> history;
};

/// Pointwise Hamiltonian maximizer over A per cell: pure drift (a = 1) when
/// H^1 >= H^0, otherwise the signed control vertex of the largest |h_i|.
/// Ties prefer a = 1; among maximizing i the lowest index wins; a zero
/// pairing takes the + sign.
ReducedControl best_response(const ProblemSpec& spec,
                             const CellHamiltonians& cells, double lambda,
                             double s_end);

struct LambdaResult {
  double lambda = 0.0;
  ReducedControl target;  // maximizer meeting int(alpha) = T exactly
  bool degenerate = false;
  double lo = 0.0, hi = 0.0;  // bracket used
};

/// Multiplier selection for the time constraint: the map
/// lambda -> int alpha*(s; lambda) ds is a nondecreasing step function, so
/// the constraint is met by bracketing/bisecting to the critical level and
/// assigning the tied cells fractionally (exactly) there. Tied cells fill
/// jump-first so degenerate optima reconstruct as single impulses.
LambdaResult find_lambda(const ProblemSpec& spec, const CellHamiltonians& cells,
                         double s_end, double target_time, double tol_t);

/// Integrated maximum-condition defect
///   sum_c ds [ max{H^1_c(lambda), H^0_c} - H_c(lambda, alpha_c, beta_c) ].
double pmp_residual(const ProblemSpec& spec, const ReducedControl& ctrl,
                    const CellHamiltonians& cells, double lambda);

/// Convenience overload computing the quadrature internally.
double pmp_residual(const ProblemSpec& spec, const ReducedControl& ctrl,
                    const ParticleTrajectory& traj,
                    const LiftedTrajectory& lifted, double lambda);

/// Conditional-gradient descent on the reduced problem: forward solve,
/// backward sweep, multiplier selection, vertex best response, and a
/// backtracking line search on the true cost along the feasible segment.
std::pair<ReducedControl, ExtremalCertificate> frank_wolfe(
    const ProblemSpec& spec, const ReducedControl& init,
    const FrankWolfeOptions& opts = {});

}  // namespace itc
