#include "itc/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace itc {

EmpiricalMeasure::EmpiricalMeasure(std::vector<Vec> points)
    : points_(std::move(points)) {
  if (points_.empty()) throw DimensionError("empirical measure needs N >= 1 particles");
  const auto n = points_[0].size();
  if (n < 1) throw DimensionError("empirical measure needs dimension n >= 1");
  for (const auto& p : points_)
    if (p.size() != n) throw DimensionError("particles have mixed dimensions");
}

EmpiricalMeasure EmpiricalMeasure::dirac(const Vec& x, int count) {
  if (count < 1) throw DimensionError("dirac: count must be >= 1");
  return EmpiricalMeasure(std::vector<Vec>(count, x));
}

namespace {

// Exact min-cost assignment via shortest augmenting paths with potentials.
double solve_assignment(const Mat& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = match[j0], j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  double total = 0.0;
  for (int j = 1; j <= n; ++j) total += cost(match[j] - 1, j - 1);
  return total;
}

}  // namespace

double w1_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
  if (a.size() != b.size())
    throw DimensionError("w1_distance: particle counts differ");
  if (a.dim() != b.dim())
    throw DimensionError("w1_distance: state dimensions differ");
  const int n = a.size();
  if (a.dim() == 1) {
    std::vector<double> xs(n), ys(n);
    for (int k = 0; k < n; ++k) {
      xs[k] = a.point(k)[0];
      ys[k] = b.point(k)[0];
    }
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    double total = 0.0;
    for (int k = 0; k < n; ++k) total += std::abs(xs[k] - ys[k]);
    return total / n;
  }
  Mat cost(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      cost(i, j) = (a.point(i) - b.point(j)).lpNorm<1>();
  return solve_assignment(cost) / n;
}

EmpiricalMeasure pushforward(const EmpiricalMeasure& m,
                             const std::function<Vec(const Vec&)>& f) {
  std::vector<Vec> out;
  out.reserve(m.size());
  for (const auto& p : m.points()) out.push_back(f(p));
  return EmpiricalMeasure(std::move(out));
}

Vec convolve(const std::function<Vec(const Vec&)>& g, const EmpiricalMeasure& m,
             const Vec& x) {
  Vec acc = Vec::Zero(x.size());
  for (const auto& y : m.points()) acc += g(x - y);
  return acc / m.size();
}

double first_moment(const EmpiricalMeasure& m) {
  double acc = 0.0;
  for (const auto& p : m.points()) acc += p.lpNorm<1>();
  return acc / m.size();
}

double support_radius(const EmpiricalMeasure& m) {
  double r = 0.0;
  for (const auto& p : m.points()) r = std::max(r, p.norm());
  return r;
}

}  // namespace itc
