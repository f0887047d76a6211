#include "itc/reduced_system.hpp"

#include <algorithm>
#include <cmath>

#include "itc/parallel.hpp"

namespace itc {

double PiecewiseControl::variation() const {
  double acc = 0.0;
  for (int c = 0; c < pieces(); ++c)
    acc += (times[c + 1] - times[c]) * values[c].lpNorm<1>();
  return acc;
}

Vec PiecewiseControl::value_at(double t) const {
  auto it = std::upper_bound(times.begin(), times.end(), t);
  int c = static_cast<int>(it - times.begin()) - 1;
  c = std::clamp(c, 0, pieces() - 1);
  return values[c];
}

void PiecewiseControl::validate(double horizon) const {
  if (pieces() < 1 || times.size() != values.size() + 1)
    throw ConstraintError("piecewise control: breakpoints and values disagree");
  if (std::abs(times.front()) > 1e-12 || std::abs(times.back() - horizon) > 1e-9 * horizon)
    throw ConstraintError("piecewise control: breakpoints must span [0, T]");
  for (size_t c = 0; c + 1 < times.size(); ++c)
    if (!(times[c + 1] > times[c]))
      throw ConstraintError("piecewise control: breakpoints must increase");
  int m = control_dim();
  for (const auto& v : values)
    if (v.size() != m || !v.allFinite())
      throw ConstraintError("piecewise control: bad cell value");
}

double ReducedControl::alpha_integral() const {
  double acc = 0.0;
  const double h = ds();
  for (double a : alpha) acc += a * h;
  return acc;
}

void ReducedControl::validate_cells() const {
  if (cells() < 1 || !(s_end > 0))
    throw ConstraintError("reduced control: needs cells >= 1 and S > 0");
  if (beta.size() != alpha.size())
    throw ConstraintError("reduced control: alpha and beta sizes disagree");
  const int m = control_dim();
  for (int c = 0; c < cells(); ++c) {
    double a = alpha[c];
    const Vec& b = beta[c];
    if (b.size() != m || !std::isfinite(a) || !b.allFinite())
      throw ConstraintError("reduced control: non-finite cell value");
    if (a < -1e-12 || a + b.lpNorm<1>() > 1.0 + 1e-12)
      throw ConstraintError("reduced control: cell outside the set A");
  }
}

void ReducedControl::validate(double horizon, double tol_t) const {
  validate_cells();
  if (std::abs(alpha_integral() - horizon) > tol_t)
    throw ConstraintError("reduced control: integral of alpha misses the horizon");
}

ReducedControl ReducedControl::constant(double s_end, int cells, double a,
                                        const Vec& b) {
  ReducedControl ctrl;
  ctrl.s_end = s_end;
  ctrl.alpha.assign(cells, a);
  ctrl.beta.assign(cells, b);
  return ctrl;
}

EmpiricalMeasure ParticleTrajectory::measure_at_node(int j) const {
  return EmpiricalMeasure(states[j]);
}

std::vector<Vec> ParticleTrajectory::states_at(double s) const {
  const double s_end = s_nodes.back();
  s = std::clamp(s, 0.0, s_end);
  const int nc = cells();
  const double h = s_end / nc;
  int c = std::min(static_cast<int>(s / h), nc - 1);
  double w = (s - s_nodes[c]) / h;
  std::vector<Vec> out(states[c].size());
  for (size_t k = 0; k < out.size(); ++k)
    out[k] = (1.0 - w) * states[c][k] + w * states[c + 1][k];
  return out;
}

ReducedControl embed_control(const PiecewiseControl& u, double horizon,
                             double budget, int cells, double tol_t) {
  const double s_end = horizon + budget;
  if (tol_t < 0) tol_t = default_tol_t(s_end);
  u.validate(horizon);
  if (std::abs(u.variation() - budget) > tol_t)
    throw ConstraintError("embed_control: control variation misses the budget");

  // Image of the original grid under t -> t + int |u|: nonuniform cells on
  // [0, S] carrying the exact (alpha, beta).
  const int pieces = u.pieces();
  std::vector<double> image(pieces + 1);
  std::vector<double> a_img(pieces);
  std::vector<Vec> b_img(pieces);
  image[0] = 0.0;
  for (int c = 0; c < pieces; ++c) {
    double q = u.values[c].lpNorm<1>();
    image[c + 1] = image[c] + (u.times[c + 1] - u.times[c]) * (1.0 + q);
    a_img[c] = 1.0 / (1.0 + q);
    b_img[c] = u.values[c] / (1.0 + q);
  }
  // Land the last breakpoint exactly on S (rounding of the budget).
  double scale = s_end / image[pieces];
  for (auto& s : image) s *= scale;

  ReducedControl out;
  out.s_end = s_end;
  out.alpha.assign(cells, 0.0);
  out.beta.assign(cells, Vec::Zero(u.control_dim()));
  const double h = s_end / cells;
  int c_img = 0;
  for (int c = 0; c < cells; ++c) {
    const double lo = h * c, hi = h * (c + 1);
    double acc_a = 0.0;
    Vec acc_b = Vec::Zero(u.control_dim());
    while (c_img < pieces && image[c_img + 1] <= lo) ++c_img;
    for (int q = c_img; q < pieces && image[q] < hi; ++q) {
      double overlap = std::min(hi, image[q + 1]) - std::max(lo, image[q]);
      if (overlap <= 0) continue;
      acc_a += overlap * a_img[q];
      acc_b += overlap * b_img[q];
    }
    out.alpha[c] = acc_a / h;
    out.beta[c] = acc_b / h;
  }
  out.validate(horizon, tol_t);
  return out;
}

namespace {

// Variation of u after adding the pulse pair of height h to component 1.
double saturated_variation(const PiecewiseControl& u, double half, double h) {
  double acc = 0.0;
  for (int c = 0; c < u.pieces(); ++c) {
    double lo = u.times[c], hi = u.times[c + 1];
    Vec v = u.values[c];
    double rest = v.lpNorm<1>() - std::abs(v[0]);
    // first half-window: +h, second: -h
    double seg1 = std::max(0.0, std::min(hi, half) - lo);
    double seg2 = std::max(0.0, std::min(hi, 2.0 * half) - std::max(lo, half));
    double seg0 = (hi - lo) - seg1 - seg2;
    acc += seg1 * (std::abs(v[0] + h) + rest);
    acc += seg2 * (std::abs(v[0] - h) + rest);
    acc += seg0 * v.lpNorm<1>();
  }
  return acc;
}

}  // namespace

PiecewiseControl saturate_budget(const PiecewiseControl& u, double budget,
                                 int k, double tol_t) {
  const double horizon = u.times.back();
  u.validate(horizon);
  if (k < 1) throw ConstraintError("saturate_budget: k must be positive");
  double spent = u.variation();
  if (spent > budget + tol_t)
    throw ConstraintError("saturate_budget: control already exceeds the budget");
  if (std::abs(spent - budget) <= tol_t) return u;
  if (1.0 / k > horizon)
    throw ConstraintError("saturate_budget: pulse window 1/k exceeds the horizon");

  const double half = 0.5 / k;
  const double remaining = budget - spent;
  double h = remaining * k;
  // The nominal height saturates exactly when u_1 does not fight the pulse
  // signs on [0, 1/k]; otherwise solve the piecewise-linear budget equation.
  if (std::abs(saturated_variation(u, half, h) - budget) > tol_t) {
    double lo = h, hi = h;
    while (saturated_variation(u, half, hi) < budget) hi *= 2.0;
    while (saturated_variation(u, half, lo) > budget) lo *= 0.5;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      (saturated_variation(u, half, mid) < budget ? lo : hi) = mid;
    }
    h = 0.5 * (lo + hi);
  }

  PiecewiseControl out;
  std::vector<double> cuts = u.times;
  cuts.push_back(half);
  cuts.push_back(2.0 * half);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-15; }),
             cuts.end());
  out.times = cuts;
  for (size_t c = 0; c + 1 < cuts.size(); ++c) {
    double mid = 0.5 * (cuts[c] + cuts[c + 1]);
    Vec v = u.value_at(mid);
    if (mid < half)
      v[0] += h;
    else if (mid < 2.0 * half)
      v[0] -= h;
    out.values.push_back(std::move(v));
  }
  return out;
}

void reduced_rhs(const ProblemSpec& spec, double a, const Vec& b,
                 const std::vector<Vec>& y, std::vector<Vec>& out, int workers) {
  const int count = static_cast<int>(y.size());
  const bool no_kernel = spec.kernel->is_zero();
  parallel_for(count, workers, [&](int kk) {
    Vec v = spec.drift->eval(y[kk]);
    if (!no_kernel) {
      Vec conv = Vec::Zero(spec.n);
      for (int j = 0; j < count; ++j) conv += spec.kernel->eval(y[kk] - y[j]);
      v += conv / count;
    }
    v *= a;
    for (int i = 0; i < spec.m; ++i) v += b[i] * spec.controls[i]->eval(y[kk]);
    out[kk] = std::move(v);
  });
}

namespace {

double field_audit(const ProblemSpec& spec, const std::vector<Vec>& y) {
  const int count = static_cast<int>(y.size());
  const bool no_kernel = spec.kernel->is_zero();
  double worst = 0.0;
  for (int kk = 0; kk < count; ++kk) {
    double mass = spec.drift->eval(y[kk]).lpNorm<1>();
    for (int i = 0; i < spec.m; ++i) mass += spec.controls[i]->eval(y[kk]).lpNorm<1>();
    if (!no_kernel) {
      Vec conv = Vec::Zero(spec.n);
      for (int j = 0; j < count; ++j) conv += spec.kernel->eval(y[kk] - y[j]);
      mass += conv.lpNorm<1>() / count;
    }
    worst = std::max(worst, mass);
  }
  return worst;
}

bool all_finite(const std::vector<Vec>& y) {
  for (const auto& v : y)
    if (!v.allFinite()) return false;
  return true;
}

}  // namespace

ParticleTrajectory solve_forward(const ProblemSpec& spec,
                                 const ReducedControl& ctrl, int workers) {
  ctrl.validate_cells();
  if (ctrl.control_dim() != spec.m)
    throw DimensionError("solve_forward: control dimension disagrees with spec");
  const int nc = ctrl.cells();
  const int count = spec.theta.size();
  const double h = ctrl.ds();

  ParticleTrajectory traj;
  traj.s_nodes.resize(nc + 1);
  for (int j = 0; j <= nc; ++j) traj.s_nodes[j] = ctrl.node(j);
  traj.states.resize(nc + 1);
  traj.states[0] = spec.theta.points();
  traj.observed_field_sup = field_audit(spec, traj.states[0]);

  std::vector<Vec> k1(count), k2(count), k3(count), k4(count), tmp(count);
  for (int c = 0; c < nc; ++c) {
    const double a = ctrl.alpha[c];
    const Vec& b = ctrl.beta[c];
    const auto& y = traj.states[c];
    reduced_rhs(spec, a, b, y, k1, workers);
    for (int kk = 0; kk < count; ++kk) tmp[kk] = y[kk] + 0.5 * h * k1[kk];
    reduced_rhs(spec, a, b, tmp, k2, workers);
    for (int kk = 0; kk < count; ++kk) tmp[kk] = y[kk] + 0.5 * h * k2[kk];
    reduced_rhs(spec, a, b, tmp, k3, workers);
    for (int kk = 0; kk < count; ++kk) tmp[kk] = y[kk] + h * k3[kk];
    reduced_rhs(spec, a, b, tmp, k4, workers);
    auto& next = traj.states[c + 1];
    next.resize(count);
    for (int kk = 0; kk < count; ++kk)
      next[kk] = y[kk] + (h / 6.0) * (k1[kk] + 2.0 * k2[kk] + 2.0 * k3[kk] + k4[kk]);
    if (!all_finite(next))
      throw IntegrationError("solve_forward: non-finite state in cell " + std::to_string(c));
    traj.observed_field_sup = std::max(traj.observed_field_sup, field_audit(spec, next));
  }
  return traj;
}

double terminal_cost(const ProblemSpec& spec, const ParticleTrajectory& traj) {
  const auto& last = traj.states.back();
  double acc = 0.0;
  for (const auto& y : last) acc += spec.cost->value(y);
  return acc / last.size();
}

EmpiricalMeasure OriginalTrajectory::measure_at_node(int j) const {
  return EmpiricalMeasure(states[j]);
}

OriginalTrajectory solve_original(const ProblemSpec& spec,
                                  const PiecewiseControl& u, int sample_cells,
                                  double max_dt) {
  const double horizon = spec.horizon;
  u.validate(horizon);
  if (sample_cells < 1 || !(max_dt > 0))
    throw ConstraintError("solve_original: bad sampling parameters");

  // Integration breakpoints: control breakpoints merged with sample nodes.
  std::vector<double> cuts = u.times;
  for (int j = 0; j <= sample_cells; ++j) cuts.push_back(horizon * j / sample_cells);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-14; }),
             cuts.end());

  OriginalTrajectory traj;
  traj.t_nodes.resize(sample_cells + 1);
  for (int j = 0; j <= sample_cells; ++j) traj.t_nodes[j] = horizon * j / sample_cells;
  traj.states.resize(sample_cells + 1);

  const int count = spec.theta.size();
  std::vector<Vec> y = spec.theta.points();
  std::vector<Vec> k1(count), k2(count), k3(count), k4(count), tmp(count);
  int sample = 0;
  auto maybe_record = [&](double t) {
    while (sample <= sample_cells && t >= traj.t_nodes[sample] - 1e-13) {
      traj.states[sample] = y;
      ++sample;
    }
  };
  maybe_record(0.0);
  for (size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
    const double lo = cuts[seg], hi = cuts[seg + 1];
    const Vec uval = u.value_at(0.5 * (lo + hi));
    const int steps = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_dt)));
    const double h = (hi - lo) / steps;
    for (int st = 0; st < steps; ++st) {
      reduced_rhs(spec, 1.0, uval, y, k1, 1);
      for (int kk = 0; kk < count; ++kk) tmp[kk] = y[kk] + 0.5 * h * k1[kk];
      reduced_rhs(spec, 1.0, uval, tmp, k2, 1);
      for (int kk = 0; kk < count; ++kk) tmp[kk] = y[kk] + 0.5 * h * k2[kk];
      reduced_rhs(spec, 1.0, uval, tmp, k3, 1);
      for (int kk = 0; kk < count; ++kk) tmp[kk] = y[kk] + h * k3[kk];
      reduced_rhs(spec, 1.0, uval, tmp, k4, 1);
      for (int kk = 0; kk < count; ++kk)
        y[kk] += (h / 6.0) * (k1[kk] + 2.0 * k2[kk] + 2.0 * k3[kk] + k4[kk]);
    }
    if (!all_finite(y))
      throw IntegrationError("solve_original: non-finite state before t = " +
                             std::to_string(hi));
    maybe_record(hi);
  }
  maybe_record(horizon + 1.0);
  return traj;
}

}  // namespace itc
