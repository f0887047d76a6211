#pragma once

#include <string>
#include <vector>

#include "itc/optimizer.hpp"
#include "itc/time_change.hpp"

namespace itc {

struct CellFlag {
  int cell = 0;
  double defect = 0.0;
};

/// Verdict of the reduced maximum condition
///   H(gamma_s, lambda, alpha, beta) = max{H^1, H^0} for a.e. s,
/// certified cellwise, plus the regular-solution boundary residuals.
struct ReducedCheckReport {
  bool passed = false;
  double tol = 0.0;
  double integrated_defect = 0.0;
  double worst_defect = 0.0;
  int worst_cell = -1;
  std::vector<CellFlag> violations;
  /// max_k |p_k(S) + grad l(y_k(S))|_1, checked pairwise per particle.
  double boundary_residual = 0.0;
  /// max_k |y_k(0) - theta_k|_1.
  double initial_residual = 0.0;
  std::string summary() const;
};

/// Default cell tolerance scale: tol_rel * (1 + |H^1| + |H^0|).
inline double checker_tol(double h1, double h0, double tol_rel = 1e-4) {
  return tol_rel * (1.0 + std::abs(h1) + std::abs(h0));
}

ReducedCheckReport check_reduced(const ProblemSpec& spec,
                                 const ReducedControl& ctrl,
                                 const ParticleTrajectory& traj,
                                 const LiftedTrajectory& lifted, double lambda,
                                 double tol_rel = 1e-4);

enum class CellClass { NoImpulse, AcControl, Jump, Dead };

struct ConditionSuite {
  bool passed = true;
  int cells_checked = 0;
  double integrated_defect = 0.0;
  double worst_defect = 0.0;
  int worst_cell = -1;
  std::vector<CellFlag> violations;
};

/// Verdict of the impulsive maximum conditions along the projected process:
///   MaxCond1: H^1 >= H^0 off the support of dV (no-impulse cells);
///   MaxCond2: H^1 == H^0 where the absolutely continuous part of V grows;
///   MaxCond3: H^1 <= H^0 along every jump completion.
struct ImpulsiveCheckReport {
  bool passed = false;
  double tol = 0.0;
  ConditionSuite maxcond1, maxcond2, maxcond3;
  std::vector<CellClass> classes;  // per reduced cell
  /// Characteristic-form residual of the jump-phase system along the
  /// completions (finite-difference check of dy = sum u^tau_i f_i etc).
  double completion_ode_residual = 0.0;
  int worst_cell = -1;
  double integrated_defect = 0.0;
  std::string summary() const;
};

/// The costates are projected from the reduced sweep: rho_t = gamma at
/// xi^(-1)(t) and omega^tau at the fast-time preimages, so `lifted` must
/// come from the same process that produced `imp`.
ImpulsiveCheckReport check_impulsive(const ProblemSpec& spec,
                                     const ImpulsiveSolution& imp,
                                     const ReducedControl& ctrl,
                                     const LiftedTrajectory& lifted,
                                     double lambda, double tol_rel = 1e-4,
                                     const ProjectionOptions& opts = {});

}  // namespace itc
