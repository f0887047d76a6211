#include "itc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace itc {

namespace {

// Signed control vertex maximizing sum b_i h_i over the unit l1 sphere:
// lowest maximizing index, + on a zero pairing.
std::pair<int, double> bang_vertex(const ProblemSpec& spec,
                                   const CellHamiltonians& cells, int c) {
  int best_i = 0;
  double best = std::abs(cells.control(0, c));
  for (int i = 1; i < spec.m; ++i) {
    double v = std::abs(cells.control(i, c));
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  double sign = cells.control(best_i, c) >= 0.0 ? 1.0 : -1.0;
  return {best_i, sign};
}

}  // namespace

ReducedControl best_response(const ProblemSpec& spec,
                             const CellHamiltonians& cells, double lambda,
                             double s_end) {
  const int nc = cells.cells();
  ReducedControl out;
  out.s_end = s_end;
  out.alpha.assign(nc, 0.0);
  out.beta.assign(nc, Vec::Zero(spec.m));
  for (int c = 0; c < nc; ++c) {
    double h1 = cells.drift_sym[c] + lambda;
    auto [i, sign] = bang_vertex(spec, cells, c);
    double h0 = std::abs(cells.control(i, c));
    if (h1 >= h0) {
      out.alpha[c] = 1.0;
    } else {
      out.beta[c][i] = sign;
    }
  }
  return out;
}

LambdaResult find_lambda(const ProblemSpec& spec, const CellHamiltonians& cells,
                         double s_end, double target_time, double tol_t) {
  const int nc = cells.cells();
  const double ds = s_end / nc;
  if (!(target_time > 0.0) || !(target_time < s_end))
    throw ConstraintError("find_lambda: target time must lie in (0, S)");

  // Critical level per cell: the lambda at which drift + lambda ties the
  // best control pairing. alpha* = 1 exactly when lambda >= crit.
  std::vector<double> crit(nc);
  std::vector<int> bang_i(nc);
  std::vector<double> bang_sign(nc);
  for (int c = 0; c < nc; ++c) {
    auto [i, sign] = bang_vertex(spec, cells, c);
    bang_i[c] = i;
    bang_sign[c] = sign;
    crit[c] = std::abs(cells.control(i, c)) - cells.drift_sym[c];
  }
  auto alpha_mass = [&](double lambda) {
    int on = 0;
    for (int c = 0; c < nc; ++c)
      if (crit[c] <= lambda) ++on;
    return ds * on;
  };

  // Bracket in the style of the multiplier bounds: range of the running
  // Hamiltonian integrand scaled by S / min(T, S - T), doubled as needed.
  double vmax = -std::numeric_limits<double>::infinity();
  double vmin = std::numeric_limits<double>::infinity();
  for (int c = 0; c < nc; ++c) {
    vmax = std::max({vmax, cells.drift_sym[c], std::abs(cells.control(bang_i[c], c))});
    vmin = std::min({vmin, cells.drift_sym[c], -std::abs(cells.control(bang_i[c], c))});
  }
  double width = (vmax - vmin) * s_end / std::min(target_time, s_end - target_time) + 1.0;
  double lo = -width, hi = width;
  while (alpha_mass(lo) >= target_time && lo > -1e300) lo *= 2.0;
  while (alpha_mass(hi) < target_time && hi < 1e300) hi *= 2.0;

  LambdaResult res;
  res.lo = lo;
  res.hi = hi;

  // The mass function is a right-continuous step function of lambda with
  // steps at the critical levels, so the constraint lands exactly on an
  // order statistic of crit: the smallest level whose cumulative cell count
  // reaches the required alpha mass.
  const double needed = target_time / ds;  // total alpha mass, in cell units
  std::vector<double> sorted = crit;
  std::sort(sorted.begin(), sorted.end());
  double level = sorted.back();
  {
    size_t lo_i = 0;
    while (lo_i < sorted.size()) {
      size_t hi_i = lo_i;
      while (hi_i + 1 < sorted.size() && sorted[hi_i + 1] == sorted[lo_i]) ++hi_i;
      if (static_cast<double>(hi_i + 1) >= needed) {
        level = sorted[lo_i];
        break;
      }
      lo_i = hi_i + 1;
    }
  }
  res.lambda = level;
  res.degenerate = sorted.front() == sorted.back();

  // Assemble the target: a = 1 below the level, a = 0 above, exact
  // fractional fill on the tied cells (jump block first).
  ReducedControl target;
  target.s_end = s_end;
  target.alpha.assign(nc, 0.0);
  target.beta.assign(nc, Vec::Zero(spec.m));
  int full_below = 0;
  int tied = 0;
  for (int c = 0; c < nc; ++c) {
    if (crit[c] < level) ++full_below;
    if (crit[c] == level) ++tied;
  }
  double tie_mass = needed - full_below;  // to distribute over tied cells
  if (tie_mass < -1e-9 || tie_mass > tied + 1e-9)
    throw ConstraintError("find_lambda: constraint not reachable at the tie level");
  tie_mass = std::clamp(tie_mass, 0.0, static_cast<double>(tied));
  double zeros_left = tied - tie_mass;
  for (int c = 0; c < nc; ++c) {
    double a;
    if (crit[c] < level) {
      a = 1.0;
    } else if (crit[c] > level) {
      a = 0.0;
    } else {
      double z = std::min(1.0, zeros_left);
      zeros_left -= z;
      a = 1.0 - z;
    }
    target.alpha[c] = a;
    if (a < 1.0) target.beta[c][bang_i[c]] = (1.0 - a) * bang_sign[c];
  }
  if (std::abs(target.alpha_integral() - target_time) > tol_t)
    throw ConstraintError("find_lambda: fractional assignment failed the target");
  res.target = std::move(target);
  return res;
}

double pmp_residual(const ProblemSpec& spec, const ReducedControl& ctrl,
                    const CellHamiltonians& cells, double lambda) {
  const int nc = cells.cells();
  const double ds = ctrl.ds();
  double acc = 0.0;
  for (int c = 0; c < nc; ++c) {
    double h1 = cells.drift_sym[c] + lambda;
    double h0 = 0.0;
    for (int i = 0; i < spec.m; ++i)
      h0 = std::max(h0, std::abs(cells.control(i, c)));
    double current = ctrl.alpha[c] * h1;
    for (int i = 0; i < spec.m; ++i)
      current += ctrl.beta[c][i] * cells.control(i, c);
    acc += ds * (std::max(h1, h0) - current);
  }
  return acc;
}

double pmp_residual(const ProblemSpec& spec, const ReducedControl& ctrl,
                    const ParticleTrajectory& traj,
                    const LiftedTrajectory& lifted, double lambda) {
  return pmp_residual(spec, ctrl, compute_cell_hamiltonians(spec, ctrl, traj, lifted),
                      lambda);
}

namespace {

// Frank-Wolfe gap through the costate pairing route,
//   D = int p . (f(x, target) - f(x, current)) ds,
// using the raw (non-symmetrized) interaction term.
double fw_gap(const ProblemSpec& spec, const CellHamiltonians& cells,
              const ReducedControl& current, const ReducedControl& target) {
  const double ds = current.ds();
  double acc = 0.0;
  for (int c = 0; c < current.cells(); ++c) {
    double cell = (target.alpha[c] - current.alpha[c]) * cells.drift_raw[c];
    for (int i = 0; i < spec.m; ++i)
      cell += (target.beta[c][i] - current.beta[c][i]) * cells.control(i, c);
    acc += ds * cell;
  }
  return acc;
}

ReducedControl blend(const ReducedControl& current, const ReducedControl& target,
                     double step) {
  ReducedControl out = current;
  for (int c = 0; c < current.cells(); ++c) {
    out.alpha[c] += step * (target.alpha[c] - current.alpha[c]);
    out.beta[c] += step * (target.beta[c] - current.beta[c]);
  }
  return out;
}

}  // namespace

std::pair<ReducedControl, ExtremalCertificate> frank_wolfe(
    const ProblemSpec& spec, const ReducedControl& init,
    const FrankWolfeOptions& opts) {
  const double s_end = spec.s_length();
  const double tol_t = default_tol_t(s_end);
  init.validate(spec.horizon, tol_t);

  ReducedControl ctrl = init;
  ExtremalCertificate cert;

  for (int it = 0; it <= opts.max_iterations; ++it) {
    ParticleTrajectory traj = solve_forward(spec, ctrl, opts.workers);
    double cost = terminal_cost(spec, traj);
    LiftedTrajectory lifted = solve_backward(spec, ctrl, traj, opts.workers);
    CellHamiltonians cells = compute_cell_hamiltonians(spec, ctrl, traj, lifted);
    LambdaResult lam = find_lambda(spec, cells, s_end, spec.horizon, tol_t);

    double gap = fw_gap(spec, cells, ctrl, lam.target);
    cert.lambda = lam.lambda;
    cert.lambda_lo = lam.lo;
    cert.lambda_hi = lam.hi;
    cert.degenerate_lambda = lam.degenerate;
    cert.cost = cost;
    cert.residual = gap;
    cert.iterations = it;
    cert.history.push_back({cost, gap, 0.0});

    if (gap <= opts.tol_gap_rel * (1.0 + std::abs(cost)) || it == opts.max_iterations)
      break;

    // Backtracking line search on the true cost along the feasible segment.
    double step = 1.0;
    bool accepted = false;
    while (step >= opts.min_step) {
      ReducedControl trial = blend(ctrl, lam.target, step);
      double trial_cost =
          terminal_cost(spec, solve_forward(spec, trial, opts.workers));
      if (cost - trial_cost >=
          std::max(opts.armijo_slope * step * gap, opts.stagnation_decrease)) {
        ctrl = std::move(trial);
        cert.history.back().step = step;
        accepted = true;
        break;
      }
      step *= opts.armijo_factor;
    }
    if (!accepted) {
      cert.stagnated = true;
      break;
    }
  }
  return {std::move(ctrl), std::move(cert)};
}

}  // namespace itc
