#include "itc/fields.hpp"

#include <cmath>

namespace itc {

Vec TanhField::eval(const Vec& x) const {
  Vec out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    out[i] = amplitude_[i] * std::tanh(rate_ * x[i]);
  return out;
}

Mat TanhField::jacobian(const Vec& x) const {
  Mat j = Mat::Zero(x.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double t = std::tanh(rate_ * x[i]);
    j(i, i) = amplitude_[i] * rate_ * (1.0 - t * t);
  }
  return j;
}

AttractionRepulsionKernel::AttractionRepulsionKernel(int n, double c_a,
                                                     double l_a, double c_r,
                                                     double l_r)
    : n_(n), c_a_(c_a), l_a_(l_a), c_r_(c_r), l_r_(l_r) {
  // Numeric sup of |g|_1 <= sqrt(n) |g|_2 = sqrt(n) 2|U'(r^2)| r over r >= 0.
  double best = 0.0;
  double rmax = 60.0 * std::max(std::sqrt(l_a_), std::sqrt(l_r_));
  for (int i = 0; i <= 4000; ++i) {
    double r = rmax * i / 4000.0;
    best = std::max(best, 2.0 * std::abs(u_prime(r * r)) * r);
  }
  sup_bound_ = 1.0001 * std::sqrt(static_cast<double>(n_)) * best;
}

double AttractionRepulsionKernel::u_prime(double r) const {
  return (c_a_ / l_a_) * std::exp(-r / l_a_) - (c_r_ / l_r_) * std::exp(-r / l_r_);
}

double AttractionRepulsionKernel::u_second(double r) const {
  return -(c_a_ / (l_a_ * l_a_)) * std::exp(-r / l_a_) +
         (c_r_ / (l_r_ * l_r_)) * std::exp(-r / l_r_);
}

Vec AttractionRepulsionKernel::eval(const Vec& x) const {
  return 2.0 * u_prime(x.squaredNorm()) * x;
}

Mat AttractionRepulsionKernel::jacobian(const Vec& x) const {
  double rho = x.squaredNorm();
  Mat j = 2.0 * u_prime(rho) * Mat::Identity(n_, n_);
  j += 4.0 * u_second(rho) * (x * x.transpose());
  return j;
}

FieldPtr builtin_attraction_repulsion(int n, double c_a, double l_a, double c_r,
                                      double l_r) {
  if (c_a <= 0 || l_a <= 0 || c_r <= 0 || l_r <= 0)
    throw ConfigError("attraction_repulsion: parameters must be positive");
  double c = c_r / c_a, l = l_r / l_a;
  if (!(c > 1.0))
    throw ConfigError("attraction_repulsion: requires c_r/c_a > 1");
  if (!(l < 1.0))
    throw ConfigError("attraction_repulsion: requires l_r/l_a < 1");
  if (!(c * l * l < 1.0))
    throw ConfigError("attraction_repulsion: requires (c_r/c_a)(l_r/l_a)^2 < 1");
  return std::make_shared<AttractionRepulsionKernel>(n, c_a, l_a, c_r, l_r);
}

namespace {

// Deterministic sample points for spot checks: theta's particles plus a
// fixed pseudo-random cloud scaled to the support.
std::vector<Vec> spot_samples(const ProblemSpec& spec) {
  std::vector<Vec> pts = spec.theta.points();
  double scale = 1.0 + support_radius(spec.theta);
  std::uint64_t state = 0x9e3779b97f4a7c15ull;
  auto next = [&state]() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return 2.0 * (static_cast<double>(state >> 11) * 0x1.0p-53) - 1.0;
  };
  for (int k = 0; k < 32; ++k) {
    Vec x(spec.n);
    for (int i = 0; i < spec.n; ++i) x[i] = 2.0 * scale * next();
    pts.push_back(std::move(x));
  }
  return pts;
}

}  // namespace

void ProblemSpec::validate() const {
  if (n < 1 || m < 1) throw ConfigError("dimensions n, m must be >= 1");
  if (!(horizon > 0)) throw ConfigError("horizon T must be positive");
  if (!(budget > 0)) throw ConfigError("budget M must be positive");
  if (!drift || !kernel || !cost) throw ConfigError("drift, kernel and cost must be set");
  if (static_cast<int>(controls.size()) != m)
    throw ConfigError("need exactly m control fields");
  if (drift->dim() != n || kernel->dim() != n || cost->dim() != n)
    throw ConfigError("field dimensions disagree with n");
  for (const auto& f : controls)
    if (!f || f->dim() != n) throw ConfigError("control field dimension disagrees with n");
  if (theta.size() < 1 || theta.dim() != n)
    throw ConfigError("initial measure theta has the wrong dimension");
  if (!cost->bounded() && !relax_a3)
    throw ConfigError("unbounded terminal cost requires relax_a3");

  auto samples = spot_samples(*this);
  for (const auto& x : samples) {
    Vec sum = kernel->eval(x) + kernel->eval(-x);
    if (sum.lpNorm<1>() > 1e-10 * (1.0 + kernel->eval(x).lpNorm<1>()))
      throw ConfigError("kernel violates antisymmetry g(-x) = -g(x)");
    double mass = drift->eval(x).lpNorm<1>() + kernel->eval(x).lpNorm<1>();
    for (const auto& f : controls) mass += f->eval(x).lpNorm<1>();
    if (mass > sup_c * (1.0 + 1e-12))
      throw ConfigError("declared sup bound C violated at a sample point");
  }
}

Vec eval_field(const ProblemSpec& spec, const EmpiricalMeasure& mu, double a,
               const Vec& b, const Vec& x) {
  if (b.size() != spec.m) throw DimensionError("eval_field: control has wrong dimension");
  if (x.size() != spec.n) throw DimensionError("eval_field: state has wrong dimension");
  Vec conv = Vec::Zero(spec.n);
  if (!spec.kernel->is_zero()) {
    for (const auto& y : mu.points()) conv += spec.kernel->eval(x - y);
    conv /= mu.size();
  }
  Vec out = a * (spec.drift->eval(x) + conv);
  for (int i = 0; i < spec.m; ++i) out += b[i] * spec.controls[i]->eval(x);
  return out;
}

double commutator_defect(const ProblemSpec& spec, int i, int j,
                         const std::vector<Vec>& samples) {
  if (i < 1 || i > spec.m || j < 1 || j > spec.m)
    throw DimensionError("commutator_defect: field index out of range");
  const auto& fi = *spec.controls[i - 1];
  const auto& fj = *spec.controls[j - 1];
  double worst = 0.0;
  for (const auto& x : samples) {
    Vec bracket = fi.jacobian(x) * fj.eval(x) - fj.jacobian(x) * fi.eval(x);
    worst = std::max(worst, bracket.lpNorm<1>());
  }
  return worst;
}

}  // namespace itc
