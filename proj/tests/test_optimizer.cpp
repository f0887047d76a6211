#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"

using namespace itc;
using namespace itc::test;

namespace {

// Hand-built cell Hamiltonian table (the optimizer only sees these values).
CellHamiltonians table(const std::vector<double>& drift,
                       const std::vector<double>& h1ctrl) {
  CellHamiltonians cells;
  cells.drift_sym = drift;
  cells.drift_raw = drift;
  cells.control = Mat::Zero(1, drift.size());
  for (size_t c = 0; c < h1ctrl.size(); ++c) cells.control(0, c) = h1ctrl[c];
  return cells;
}

ProblemSpec one_control_spec() {
  auto spec = shift1d_spec(1);
  return spec;
}

}  // namespace

TEST_CASE("best response: drift wins, bang wins, ties prefer drift") {
  auto spec = one_control_spec();
  // h0 + lambda = 2 vs |h_1| = 1 -> (1, 0).
  auto cells = table({1.0}, {1.0});
  auto br = best_response(spec, cells, 1.0, 2.0);
  CHECK(br.alpha[0] == 1.0);
  CHECK(br.beta[0][0] == 0.0);

  // h0 + lambda = 0 vs h_1 = -3 -> (0, -1).
  auto cells2 = table({0.0}, {-3.0});
  auto br2 = best_response(spec, cells2, 0.0, 2.0);
  CHECK(br2.alpha[0] == 0.0);
  CHECK(br2.beta[0][0] == -1.0);

  // Exact tie -> (1, 0) by convention.
  auto cells3 = table({1.0}, {1.5});
  auto br3 = best_response(spec, cells3, 0.5, 2.0);
  CHECK(br3.alpha[0] == 1.0);
  CHECK(br3.beta[0][0] == 0.0);
}

TEST_CASE("best response: lowest index and + sign break control ties") {
  ProblemSpec spec = one_control_spec();
  spec.m = 2;
  spec.controls = {std::make_shared<ConstantField>(vec1(1.0)),
                   std::make_shared<ConstantField>(vec1(1.0))};
  CellHamiltonians cells;
  cells.drift_sym = {-10.0};
  cells.drift_raw = {-10.0};
  cells.control = Mat::Zero(2, 1);
  cells.control(0, 0) = 2.0;
  cells.control(1, 0) = -2.0;  // same magnitude: index 0 wins
  auto br = best_response(spec, cells, 0.0, 2.0);
  CHECK(br.beta[0][0] == 1.0);
  CHECK(br.beta[0][1] == 0.0);

  cells.control(0, 0) = 0.0;
  cells.control(1, 0) = 0.0;  // zero pairing: + sign, lowest index
  auto br2 = best_response(spec, cells, 0.0, 2.0);
  CHECK(br2.alpha[0] == 0.0);
  CHECK(br2.beta[0][0] == 1.0);
  CHECK(br2.beta[0][1] == 0.0);
}

TEST_CASE("find_lambda: flat profiles tie everywhere and split fractionally") {
  auto spec = one_control_spec();
  const int nc = 10;
  // h0 = 0, |h1| = c > 0 from constant fields: lambda = c, alpha = T/S.
  auto cells = table(std::vector<double>(nc, 0.0), std::vector<double>(nc, 0.7));
  auto res = find_lambda(spec, cells, 2.0, 1.0, default_tol_t(2.0));
  CHECK(res.degenerate);
  CHECK(res.lambda == doctest::Approx(0.7));
  CHECK(res.target.alpha_integral() == doctest::Approx(1.0).epsilon(1e-14));
  // Jump-first fill: alpha-zero cells precede alpha-one cells.
  CHECK(res.target.alpha.front() == doctest::Approx(0.0));
  CHECK(res.target.alpha.back() == doctest::Approx(1.0));

  // h0 = 1, h_i = 0: tie at lambda = -1.
  auto cells2 = table(std::vector<double>(nc, 1.0), std::vector<double>(nc, 0.0));
  auto res2 = find_lambda(spec, cells2, 2.0, 1.0, default_tol_t(2.0));
  CHECK(res2.lambda == doctest::Approx(-1.0));
  CHECK(res2.target.alpha_integral() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("find_lambda: strictly decreasing drift crosses at s* = T") {
  auto spec = one_control_spec();
  const int nc = 200;
  const double s_end = 2.0, horizon = 1.0;
  std::vector<double> drift(nc), zero(nc, 0.0);
  for (int c = 0; c < nc; ++c) drift[c] = 1.0 - 2.0 * (c + 0.5) / nc;  // h0(s) falls
  auto cells = table(drift, zero);
  auto res = find_lambda(spec, cells, s_end, horizon, default_tol_t(s_end));
  // alpha* = 1 exactly where h0 + lambda >= 0, so lambda = -h0 at s = T.
  double h0_at_T = 1.0 - 2.0 * (horizon / s_end);
  CHECK(res.lambda == doctest::Approx(-h0_at_T).epsilon(0.02));
  CHECK(res.target.alpha_integral() == doctest::Approx(horizon).epsilon(1e-12));
  CHECK_FALSE(res.degenerate);
}

TEST_CASE("find_lambda: alpha mass is nondecreasing in lambda") {
  std::mt19937 rng(109);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  auto spec = one_control_spec();
  const int nc = 50;
  std::vector<double> drift(nc), ctrl(nc);
  for (int c = 0; c < nc; ++c) {
    drift[c] = dist(rng);
    ctrl[c] = dist(rng);
  }
  auto cells = table(drift, ctrl);
  double prev = -1.0;
  for (double lambda = -3.0; lambda <= 3.0; lambda += 0.1) {
    auto br = best_response(spec, cells, lambda, 2.0);
    double mass = br.alpha_integral();
    CHECK(mass >= prev - 1e-15);
    prev = mass;
  }
}

TEST_CASE("frank-wolfe: shift1d reaches the analytic optimum") {
  for (int particles : {1, 10}) {
    auto spec = shift1d_spec(particles);
    auto init = ReducedControl::constant(spec.s_length(), 200,
                                         spec.horizon / spec.s_length(), vec1(0.0));
    auto [ctrl, cert] = frank_wolfe(spec, init);
    CHECK(cert.cost == doctest::Approx(std::tanh(-1.0)).epsilon(1e-3));
    CHECK(cert.residual <= 1e-5);
    // Costs never increase along the run.
    for (size_t it = 1; it < cert.history.size(); ++it)
      CHECK(cert.history[it].cost <= cert.history[it - 1].cost + 1e-12);
    // Every iterate stays feasible.
    ctrl.validate(spec.horizon, default_tol_t(spec.s_length()));
  }
}

TEST_CASE("frank-wolfe: a best-response fixed point stops immediately") {
  auto spec = shift1d_spec(1);
  const int nc = 100;
  // The known optimum: beta = -1 on the first half, alpha = 1 on the rest.
  ReducedControl opt = ReducedControl::constant(spec.s_length(), nc, 0.0, vec1(0.0));
  for (int c = 0; c < nc; ++c) {
    if (c < nc / 2)
      opt.beta[c][0] = -1.0;
    else
      opt.alpha[c] = 1.0;
  }
  auto [ctrl, cert] = frank_wolfe(spec, opt);
  CHECK(cert.iterations == 0);
  CHECK(cert.residual <= 1e-10);
  CHECK(cert.cost == doctest::Approx(std::tanh(-1.0)).epsilon(1e-12));
}

TEST_CASE("frank-wolfe gap equals the maximum-condition residual") {
  std::mt19937 rng(113);
  auto theta = random_cloud(rng, 5, 1, 1.0);
  auto spec = smooth1d_spec(theta);
  auto init = ReducedControl::constant(spec.s_length(), 150,
                                       spec.horizon / spec.s_length(), vec1(0.0));
  FrankWolfeOptions opts;
  opts.max_iterations = 12;
  auto [ctrl, cert] = frank_wolfe(spec, init, opts);
  // Recompute both routes at the returned iterate.
  auto traj = solve_forward(spec, ctrl);
  auto lifted = solve_backward(spec, ctrl, traj);
  auto cells = compute_cell_hamiltonians(spec, ctrl, traj, lifted);
  auto lam = find_lambda(spec, cells, spec.s_length(), spec.horizon,
                         default_tol_t(spec.s_length()));
  double residual = pmp_residual(spec, ctrl, cells, lam.lambda);
  const double ds = ctrl.ds();
  double gap = 0.0;
  for (int c = 0; c < ctrl.cells(); ++c) {
    gap += ds * (lam.target.alpha[c] - ctrl.alpha[c]) * cells.drift_raw[c];
    gap += ds * (lam.target.beta[c][0] - ctrl.beta[c][0]) * cells.control(0, c);
  }
  CHECK(std::abs(gap - residual) <= 1e-10);
  CHECK(residual >= -1e-12);
}

TEST_CASE("pmp residual vanishes exactly at the best response") {
  std::mt19937 rng(127);
  auto spec = smooth1d_spec(random_cloud(rng, 4, 1, 1.0));
  auto ctrl = ReducedControl::constant(spec.s_length(), 80, 0.6, vec1(0.15));
  auto traj = solve_forward(spec, ctrl);
  auto lifted = solve_backward(spec, ctrl, traj);
  auto cells = compute_cell_hamiltonians(spec, ctrl, traj, lifted);
  auto br = best_response(spec, cells, 0.3, spec.s_length());
  CHECK(pmp_residual(spec, br, cells, 0.3) <= 1e-12);
}

TEST_CASE("optimizer iterates keep the time constraint to tolerance") {
  std::mt19937 rng(131);
  auto spec = smooth1d_spec(random_cloud(rng, 4, 1, 1.0));
  auto init = ReducedControl::constant(spec.s_length(), 100,
                                       spec.horizon / spec.s_length(), vec1(0.0));
  FrankWolfeOptions opts;
  opts.max_iterations = 25;
  auto [ctrl, cert] = frank_wolfe(spec, init, opts);
  CHECK(std::abs(ctrl.alpha_integral() - spec.horizon) <=
        default_tol_t(spec.s_length()));
  for (int c = 0; c < ctrl.cells(); ++c) {
    CHECK(ctrl.alpha[c] >= -1e-12);
    CHECK(ctrl.alpha[c] + ctrl.beta[c].lpNorm<1>() <= 1.0 + 1e-12);
  }
}

TEST_CASE("epsilon-extremality: certified runs do not exceed the start cost") {
  std::mt19937 rng(137);
  auto spec = smooth1d_spec(random_cloud(rng, 5, 1, 1.0));
  auto init = ReducedControl::constant(spec.s_length(), 100,
                                       spec.horizon / spec.s_length(), vec1(0.1));
  double init_cost = terminal_cost(spec, solve_forward(spec, init));
  auto [ctrl, cert] = frank_wolfe(spec, init);
  CHECK(cert.cost <= init_cost + 1e-12);
}
