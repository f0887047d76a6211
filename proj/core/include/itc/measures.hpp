#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "itc/errors.hpp"

namespace itc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Uniform-weight empirical probability measure: N particles in R^n, each
/// carrying mass 1/N. Duplicate points are allowed (multiset semantics).
class EmpiricalMeasure {
 public:
  EmpiricalMeasure() = default;
  explicit EmpiricalMeasure(std::vector<Vec> points);

  /// N identical particles at x.
  static EmpiricalMeasure dirac(const Vec& x, int count = 1);

  int size() const { return static_cast<int>(points_.size()); }
  int dim() const { return points_.empty() ? 0 : static_cast<int>(points_[0].size()); }
  const std::vector<Vec>& points() const { return points_; }
  const Vec& point(int k) const { return points_[k]; }

 private:
  std::vector<Vec> points_;
};

/// Wasserstein-1 distance between equal-size uniform empirical measures,
/// with the Manhattan ground metric. Exact: sorted pairing in 1D, optimal
/// assignment (O(N^3)) otherwise.
double w1_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b);

/// Image measure: every particle is mapped through f, N unchanged.
EmpiricalMeasure pushforward(const EmpiricalMeasure& m,
                             const std::function<Vec(const Vec&)>& f);

/// Discrete convolution (g * m)(x) = (1/N) sum_j g(x - y_j).
Vec convolve(const std::function<Vec(const Vec&)>& g, const EmpiricalMeasure& m,
             const Vec& x);

/// Mean Manhattan norm of the particles.
double first_moment(const EmpiricalMeasure& m);

/// Largest Euclidean norm over the particles.
double support_radius(const EmpiricalMeasure& m);

}  // namespace itc
