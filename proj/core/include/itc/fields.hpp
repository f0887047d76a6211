#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "itc/measures.hpp"

namespace itc {

/// Smooth vector field R^n -> R^n with an analytic Jacobian. Instances are
/// immutable and freely shareable across threads.
class VectorField {
 public:
  virtual ~VectorField() = default;
  virtual int dim() const = 0;
  virtual Vec eval(const Vec& x) const = 0;
  /// Jacobian matrix J with J(r, c) = d f_r / d x_c.
  virtual Mat jacobian(const Vec& x) const = 0;
  virtual std::string kind() const = 0;
  /// Sup of the Manhattan norm |f(x)| over R^n; +inf for unbounded kinds.
  virtual double sup_bound() const = 0;
  virtual bool is_zero() const { return false; }
};

using FieldPtr = std::shared_ptr<const VectorField>;

class ZeroField final : public VectorField {
 public:
  explicit ZeroField(int n) : n_(n) {}
  int dim() const override { return n_; }
  Vec eval(const Vec&) const override { return Vec::Zero(n_); }
  Mat jacobian(const Vec&) const override { return Mat::Zero(n_, n_); }
  std::string kind() const override { return "zero"; }
  double sup_bound() const override { return 0.0; }
  bool is_zero() const override { return true; }

 private:
  int n_;
};

class ConstantField final : public VectorField {
 public:
  explicit ConstantField(Vec value) : value_(std::move(value)) {}
  int dim() const override { return static_cast<int>(value_.size()); }
  Vec eval(const Vec&) const override { return value_; }
  Mat jacobian(const Vec&) const override { return Mat::Zero(dim(), dim()); }
  std::string kind() const override { return "constant"; }
  double sup_bound() const override { return value_.lpNorm<1>(); }
  const Vec& value() const { return value_; }

 private:
  Vec value_;
};

/// f(x) = A x. Unbounded; scenarios declaring it must pick the (A1) constant
/// C large enough for the states they actually visit.
class LinearField final : public VectorField {
 public:
  explicit LinearField(Mat a) : a_(std::move(a)) {
    if (a_.rows() != a_.cols()) throw ConfigError("linear field: matrix must be square");
  }
  int dim() const override { return static_cast<int>(a_.rows()); }
  Vec eval(const Vec& x) const override { return a_ * x; }
  Mat jacobian(const Vec&) const override { return a_; }
  std::string kind() const override { return "linear"; }
  double sup_bound() const override {
    return std::numeric_limits<double>::infinity();
  }
  const Mat& matrix() const { return a_; }

 private:
  Mat a_;
};

/// Componentwise saturated field f_i(x) = amplitude_i * tanh(rate * x_i).
/// Odd, globally bounded, globally Lipschitz.
class TanhField final : public VectorField {
 public:
  TanhField(Vec amplitude, double rate)
      : amplitude_(std::move(amplitude)), rate_(rate) {
    if (rate <= 0) throw ConfigError("tanh field: rate must be positive");
  }
  int dim() const override { return static_cast<int>(amplitude_.size()); }
  Vec eval(const Vec& x) const override;
  Mat jacobian(const Vec& x) const override;
  std::string kind() const override { return "tanh"; }
  double sup_bound() const override { return amplitude_.lpNorm<1>(); }
  const Vec& amplitude() const { return amplitude_; }
  double rate() const { return rate_; }

 private:
  Vec amplitude_;
  double rate_;
};

/// Interaction kernel g(x) = 2 U'(|x|_2^2) x generated by the potential
/// U(r) = -c_a exp(-r / l_a) + c_r exp(-r / l_r). Antisymmetric by
/// construction.
class AttractionRepulsionKernel final : public VectorField {
 public:
  AttractionRepulsionKernel(int n, double c_a, double l_a, double c_r, double l_r);
  int dim() const override { return n_; }
  Vec eval(const Vec& x) const override;
  Mat jacobian(const Vec& x) const override;
  std::string kind() const override { return "attraction_repulsion"; }
  double sup_bound() const override { return sup_bound_; }
  double c_a() const { return c_a_; }
  double l_a() const { return l_a_; }
  double c_r() const { return c_r_; }
  double l_r() const { return l_r_; }

 private:
  double u_prime(double r) const;
  double u_second(double r) const;
  int n_;
  double c_a_, l_a_, c_r_, l_r_;
  double sup_bound_;
};

/// Builds the attraction-repulsion kernel, enforcing the admissibility
/// conditions c_r/c_a > 1, l_r/l_a < 1, (c_r/c_a)(l_r/l_a)^2 < 1.
FieldPtr builtin_attraction_repulsion(int n, double c_a, double l_a, double c_r,
                                      double l_r);

/// Terminal cost R^n -> R with analytic gradient.
class TerminalCost {
 public:
  virtual ~TerminalCost() = default;
  virtual int dim() const = 0;
  virtual double value(const Vec& x) const = 0;
  virtual Vec gradient(const Vec& x) const = 0;
  virtual std::string kind() const = 0;
  /// Whether |l| + |grad l| is globally bounded, as (A3) requires.
  virtual bool bounded() const = 0;
};

using CostPtr = std::shared_ptr<const TerminalCost>;

class ZeroCost final : public TerminalCost {
 public:
  explicit ZeroCost(int n) : n_(n) {}
  int dim() const override { return n_; }
  double value(const Vec&) const override { return 0.0; }
  Vec gradient(const Vec&) const override { return Vec::Zero(n_); }
  std::string kind() const override { return "zero"; }
  bool bounded() const override { return true; }

 private:
  int n_;
};

/// l(x) = tanh(w . x). Bounded with bounded gradient.
class TanhCost final : public TerminalCost {
 public:
  explicit TanhCost(Vec weights) : weights_(std::move(weights)) {}
  int dim() const override { return static_cast<int>(weights_.size()); }
  double value(const Vec& x) const override { return std::tanh(weights_.dot(x)); }
  Vec gradient(const Vec& x) const override {
    double t = std::tanh(weights_.dot(x));
    return (1.0 - t * t) * weights_;
  }
  std::string kind() const override { return "tanh"; }
  bool bounded() const override { return true; }
  const Vec& weights() const { return weights_; }

 private:
  Vec weights_;
};

/// l(x) = 0.5 |x - target|_2^2. Unbounded: usable only behind relax_a3.
class QuadraticCost final : public TerminalCost {
 public:
  explicit QuadraticCost(Vec target) : target_(std::move(target)) {}
  int dim() const override { return static_cast<int>(target_.size()); }
  double value(const Vec& x) const override { return 0.5 * (x - target_).squaredNorm(); }
  Vec gradient(const Vec& x) const override { return x - target_; }
  std::string kind() const override { return "quadratic"; }
  bool bounded() const override { return false; }
  const Vec& target() const { return target_; }

 private:
  Vec target_;
};

/// l(x) = w . x. Unbounded: usable only behind relax_a3.
class LinearCost final : public TerminalCost {
 public:
  explicit LinearCost(Vec weights) : weights_(std::move(weights)) {}
  int dim() const override { return static_cast<int>(weights_.size()); }
  double value(const Vec& x) const override { return weights_.dot(x); }
  Vec gradient(const Vec&) const override { return weights_; }
  std::string kind() const override { return "linear"; }
  bool bounded() const override { return false; }
  const Vec& weights() const { return weights_; }

 private:
  Vec weights_;
};

/// Full scenario: dynamics, cost, horizon T, budget M, initial particles and
/// the declared (A1) constants.
struct ProblemSpec {
  int n = 1;
  int m = 1;
  FieldPtr drift;                  // f_0
  std::vector<FieldPtr> controls;  // f_1 .. f_m
  FieldPtr kernel;                 // g
  CostPtr cost;                    // l
  double horizon = 1.0;            // T
  double budget = 1.0;             // M
  EmpiricalMeasure theta;
  double sup_c = 1.0;        // declared C
  double lipschitz_l = 1.0;  // declared L
  bool relax_a3 = false;
  std::string name;

  double s_length() const { return horizon + budget; }

  /// Checks structural admissibility: positive T and M, consistent
  /// dimensions, kernel antisymmetry on sampled points, bounded cost unless
  /// relax_a3, and the declared sup bound C on sampled points.
  void validate() const;
};

/// w = a (f_0(x) + (g * mu)(x)) + sum_i b_i f_i(x).
Vec eval_field(const ProblemSpec& spec, const EmpiricalMeasure& mu, double a,
               const Vec& b, const Vec& x);

/// max over samples of |[f_i, f_j](x)| (Manhattan), with the Lie bracket
/// [f_i, f_j] = Jf_i f_j - Jf_j f_i. Indices are 1-based as in f_1..f_m.
double commutator_defect(const ProblemSpec& spec, int i, int j,
                         const std::vector<Vec>& samples);

}  // namespace itc
