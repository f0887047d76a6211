#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"

using namespace itc;
using namespace itc::test;

namespace {

EnsembleState random_ensemble(std::mt19937& rng, int count, int dim) {
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  EnsembleState gamma;
  for (int k = 0; k < count; ++k) {
    Vec y(dim), p(dim);
    for (int i = 0; i < dim; ++i) {
      y[i] = dist(rng);
      p[i] = dist(rng);
    }
    gamma.y.push_back(std::move(y));
    gamma.p.push_back(std::move(p));
  }
  return gamma;
}

ProblemSpec interacting_spec(int count, std::mt19937& rng) {
  auto theta = random_cloud(rng, count, 1, 1.0);
  return smooth1d_spec(theta);
}

}  // namespace

TEST_CASE("backward sweep: constant control field freezes the costate") {
  auto spec = shift1d_spec(3);
  spec.theta = cloud1d({0.0, 0.4, -0.2});
  auto ctrl = ReducedControl::constant(2.0, 40, 0.5, vec1(0.25));
  auto traj = solve_forward(spec, ctrl);
  auto lifted = solve_backward(spec, ctrl, traj);
  for (int k = 0; k < 3; ++k) {
    Vec want = -spec.cost->gradient(traj.states.back()[k]);
    CHECK((lifted.nodes.back().p[k] - want).lpNorm<1>() == doctest::Approx(0.0));
    for (const auto& node : lifted.nodes)
      CHECK((node.p[k] - want).lpNorm<1>() <= 1e-13);
  }
}

TEST_CASE("backward sweep: scalar linear adjoint closed form") {
  // f_0(x) = -x, beta = 0, alpha = T/S: p(s) = p(S) exp(xi(s) - T).
  ProblemSpec spec;
  spec.n = spec.m = 1;
  spec.horizon = 1.0;
  spec.budget = 1.0;
  spec.drift = std::make_shared<LinearField>(-Mat::Identity(1, 1));
  spec.kernel = std::make_shared<ZeroField>(1);
  spec.controls = {std::make_shared<ZeroField>(1)};
  spec.cost = std::make_shared<TanhCost>(vec1(1.0));
  spec.theta = cloud1d({0.8});
  auto ctrl = ReducedControl::constant(2.0, 200, 0.5, vec1(0.0));
  auto traj = solve_forward(spec, ctrl);
  auto lifted = solve_backward(spec, ctrl, traj);
  auto tc = xi(ctrl);
  const double p_end = lifted.nodes.back().p[0][0];
  for (int j = 0; j <= 200; j += 25) {
    double expect = p_end * std::exp(tc.nodes[j] - 1.0);
    CHECK(lifted.nodes[j].p[0][0] == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("backward sweep: permutation equivariance with interaction") {
  std::mt19937 rng(83);
  auto spec = interacting_spec(5, rng);
  auto ctrl = ReducedControl::constant(spec.s_length(), 50, 0.6, vec1(0.2));
  auto traj = solve_forward(spec, ctrl);
  auto lifted = solve_backward(spec, ctrl, traj);

  std::vector<int> perm = {4, 2, 0, 3, 1};
  std::vector<Vec> shuffled;
  for (int idx : perm) shuffled.push_back(spec.theta.point(idx));
  auto spec2 = spec;
  spec2.theta = EmpiricalMeasure(shuffled);
  auto lifted2 = solve_backward(spec2, ctrl, solve_forward(spec2, ctrl));
  for (int k = 0; k < 5; ++k)
    CHECK((lifted2.nodes[0].p[k] - lifted.nodes[0].p[perm[k]]).lpNorm<1>() <= 1e-12);
}

TEST_CASE("H1 and H0: degenerate ensembles") {
  std::mt19937 rng(89);
  auto spec = interacting_spec(4, rng);
  EnsembleState gamma = random_ensemble(rng, 4, 1);
  for (auto& p : gamma.p) p.setZero();
  CHECK(hamiltonian_h1(spec, gamma, 0.37) == doctest::Approx(0.37));
  CHECK(hamiltonian_h0(spec, gamma) == doctest::Approx(0.0));

  EnsembleState solo = random_ensemble(rng, 1, 1);
  double expect = solo.p[0].dot(spec.drift->eval(solo.y[0])) + 0.5;
  CHECK(hamiltonian_h1(spec, solo, 0.5) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("H1: enumerated two-particle interaction") {
  // (y, p) = (0, 1), (1, -1), g(x) = -x, f_0 = 0, lambda = 0: H1 = 1/2.
  ProblemSpec spec;
  spec.n = spec.m = 1;
  spec.horizon = spec.budget = 1.0;
  spec.drift = std::make_shared<ZeroField>(1);
  spec.kernel = std::make_shared<LinearField>(-Mat::Identity(1, 1));
  spec.controls = {std::make_shared<ConstantField>(vec1(1.0))};
  spec.cost = std::make_shared<ZeroCost>(1);
  spec.theta = cloud1d({0.0, 1.0});
  EnsembleState gamma;
  gamma.y = {vec1(0.0), vec1(1.0)};
  gamma.p = {vec1(1.0), vec1(-1.0)};
  CHECK(hamiltonian_h1(spec, gamma, 0.0) == doctest::Approx(0.5));
}

TEST_CASE("total Hamiltonian at the vertices of A") {
  std::mt19937 rng(97);
  auto spec = interacting_spec(5, rng);
  auto gamma = random_ensemble(rng, 5, 1);
  double lambda = 0.21;
  CHECK(hamiltonian_total(spec, gamma, lambda, 1.0, vec1(0.0)) ==
        doctest::Approx(hamiltonian_h1(spec, gamma, lambda)).epsilon(1e-14));
  double h_ctrl = hamiltonian_total(spec, gamma, lambda, 0.0, vec1(1.0));
  CHECK(std::abs(h_ctrl) == doctest::Approx(hamiltonian_h0(spec, gamma)).epsilon(1e-14));
  CHECK(hamiltonian_total(spec, gamma, lambda, 0.0, vec1(-1.0)) ==
        doctest::Approx(-h_ctrl).epsilon(1e-14));
}

TEST_CASE("max over A by vertex enumeration equals max(H1, H0)") {
  std::mt19937 rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    auto spec = interacting_spec(3 + trial % 4, rng);
    auto gamma = random_ensemble(rng, 3 + trial % 4, 1);
    std::uniform_real_distribution<double> ldist(-1.0, 1.0);
    double lambda = ldist(rng);
    double best = hamiltonian_total(spec, gamma, lambda, 1.0, vec1(0.0));
    for (double sign : {1.0, -1.0})
      best = std::max(best, hamiltonian_total(spec, gamma, lambda, 0.0, vec1(sign)));
    double closed = std::max(hamiltonian_h1(spec, gamma, lambda),
                             hamiltonian_h0(spec, gamma));
    CHECK(best == doctest::Approx(closed).epsilon(1e-12));
  }
}

TEST_CASE("symmetric and raw interaction routes agree") {
  std::mt19937 rng(103);
  auto spec = interacting_spec(6, rng);
  auto ctrl = ReducedControl::constant(spec.s_length(), 30, 0.5, vec1(0.3));
  auto traj = solve_forward(spec, ctrl);
  auto lifted = solve_backward(spec, ctrl, traj);
  auto cells = compute_cell_hamiltonians(spec, ctrl, traj, lifted);
  for (int c = 0; c < cells.cells(); ++c)
    CHECK(cells.drift_sym[c] == doctest::Approx(cells.drift_raw[c]).epsilon(1e-12));
}

TEST_CASE("costate sweep derivative matches central differences per cell") {
  std::mt19937 rng(107);
  auto spec = interacting_spec(6, rng);
  const int cells_n = 120;
  ReducedControl base = ReducedControl::constant(spec.s_length(), cells_n, 0.55, vec1(0.2));
  auto traj = solve_forward(spec, base);
  auto lifted = solve_backward(spec, base, traj);
  auto cells = compute_cell_hamiltonians(spec, base, traj, lifted);

  auto cost_of = [&](const ReducedControl& c) {
    return terminal_cost(spec, solve_forward(spec, c));
  };
  const double delta = 1e-5;
  std::uniform_int_distribution<int> pick(0, cells_n - 1);
  for (int trial = 0; trial < 6; ++trial) {
    int cell = pick(rng);
    bool on_alpha = trial % 2 == 0;
    std::vector<double> d_alpha(cells_n, 0.0);
    std::vector<Vec> d_beta(cells_n, vec1(0.0));
    auto hi = base, lo = base;
    if (on_alpha) {
      d_alpha[cell] = 1.0;
      hi.alpha[cell] += delta;
      lo.alpha[cell] -= delta;
    } else {
      d_beta[cell][0] = 1.0;
      hi.beta[cell][0] += delta;
      lo.beta[cell][0] -= delta;
    }
    double fd = (cost_of(hi) - cost_of(lo)) / (2.0 * delta);
    double adj = control_derivative(spec, base, cells, d_alpha, d_beta);
    CHECK(adj == doctest::Approx(fd).epsilon(1e-3));
  }
}

TEST_CASE("grids must agree between control and trajectory") {
  auto spec = shift1d_spec(2);
  auto ctrl = ReducedControl::constant(2.0, 20, 0.5, vec1(0.0));
  auto traj = solve_forward(spec, ctrl);
  auto other = ReducedControl::constant(2.0, 30, 0.5, vec1(0.0));
  CHECK_THROWS_AS(solve_backward(spec, other, traj), DimensionError);
}
