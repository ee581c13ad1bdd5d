#include "smoothsaa/problems/avar.hpp"

#include "smoothsaa/errors.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace smoothsaa {

namespace {

void check_level(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("AVaR level must lie in (0, 1)");
}

// Smoothed tail objective over sorted data with suffix sums; compact kernels
// only touch observations within h of z.
class SortedTailObjective {
 public:
  SortedTailObjective(std::vector<double> sorted, double level, Kernel kernel, double h)
      : x_(std::move(sorted)), level_(level), kernel_(std::move(kernel)), h_(h), suffix_(x_.size() + 1, 0.0) {
    for (std::size_t i = x_.size(); i-- > 0;) suffix_[i] = suffix_[i + 1] + x_[i];
  }

  double operator()(double z) const {
    const double n = static_cast<double>(x_.size());
    double tail = 0.0;
    if (kernel_.compact()) {
      const auto lo = std::upper_bound(x_.begin(), x_.end(), z - h_);
      const auto hi = std::lower_bound(lo, x_.end(), z + h_);
      for (auto it = lo; it != hi; ++it) tail += smoothed_hinge(kernel_, *it - z, h_);
      const auto first_linear = static_cast<std::size_t>(hi - x_.begin());
      tail += suffix_[first_linear] - static_cast<double>(x_.size() - first_linear) * z;
    } else {
      for (double xi : x_) tail += smoothed_hinge(kernel_, xi - z, h_);
    }
    return z + tail / (n * level_);
  }

 private:
  std::vector<double> x_;
  double level_;
  Kernel kernel_;
  double h_;
  std::vector<double> suffix_;
};

}  // namespace

AvarProblem::AvarProblem(double alpha) : alpha_(alpha) { check_level(alpha); }

double AvarProblem::loss(const Eigen::VectorXd& u, std::span<const double> x) const {
  return u(0) + std::max(0.0, x[0] - u(0)) / alpha_;
}

void AvarProblem::add_subgradient(const Eigen::VectorXd& u, std::span<const double> x, double weight,
                                  Eigen::VectorXd& g) const {
  g(0) += weight * (1.0 - (x[0] > u(0) ? 1.0 : 0.0) / alpha_);
}

double AvarProblem::smoothed_loss(const Eigen::VectorXd& u, std::span<const double> x, const Kernel& kernel,
                                  double h) const {
  const double scale = h * kernel.projected_scale(Eigen::VectorXd::Ones(1));
  return u(0) + smoothed_hinge(kernel, x[0] - u(0), scale) / alpha_;
}

void AvarProblem::add_smoothed_subgradient(const Eigen::VectorXd& u, std::span<const double> x, const Kernel& kernel,
                                           double h, double weight, Eigen::VectorXd& g) const {
  const double scale = h * kernel.projected_scale(Eigen::VectorXd::Ones(1));
  g(0) += weight * (1.0 - smoothed_hinge_slope(kernel, x[0] - u(0), scale) / alpha_);
}

ModulusSpec AvarProblem::modulus(const Sample&) const { return ModulusSpec::linear(1.0 / alpha_); }

SolveReport AvarProblem::solve(const Sample& sample, const SmoothingPlan& plan) const {
  if (sample.dim() != 1) throw std::invalid_argument("AVaR needs a one-dimensional sample");
  std::vector<double> sorted = sample.column(0);
  std::sort(sorted.begin(), sorted.end());
  SolveReport report;
  report.minimizer.resize(1);
  if (plan.is_saa()) {
    const auto [z, value] = saa_tail_minimum(sorted, alpha_);
    report.value = value;
    report.minimizer(0) = z;
    report.iterations = static_cast<int>(sorted.size());
    report.strategy = "saa-breakpoints";
    report.converged = true;
    return report;
  }

  const Strategy strategy = resolve_strategy(*this, plan);
  const double scale = plan.h() * plan.kernel().projected_scale(Eigen::VectorXd::Ones(1));
  const double radius = hinge_bracket_radius(plan.kernel(), alpha_) * scale;
  const double lo = sorted.front() - radius;
  const double hi = sorted.back() + radius;
  Minimum1d best{};
  if (std::holds_alternative<AnalyticStrategy>(strategy)) {
    const SortedTailObjective objective(sorted, alpha_, plan.kernel(), scale);
    best = minimize_convex_1d(objective, lo, hi, 1e-9);
  } else {
    Eigen::VectorXd z(1);
    best = minimize_convex_1d(
        [&](double t) {
          z(0) = t;
          return smooth_objective_value(*this, z, sample, plan);
        },
        lo, hi, 1e-9);
  }
  report.value = best.value;
  report.minimizer(0) = best.x;
  report.iterations = best.iterations;
  report.strategy = strategy_label(strategy);
  report.converged = best.bracket_width <= 1e-9;
  report.tolerance_achieved = best.bracket_width;
  return report;
}

SolveReport avar_value(const Sample& sample, double alpha, const SmoothingPlan& plan) {
  return AvarProblem(alpha).solve(sample, plan);
}

double true_avar_normal(double mu, double sigma2, double alpha) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("variance must be positive");
  check_level(alpha);
  const boost::math::normal_distribution<double> std_normal;
  const double q = boost::math::quantile(std_normal, 1.0 - alpha);
  return mu + std::sqrt(sigma2) * boost::math::pdf(std_normal, q) / alpha;
}

double hinge_bracket_radius(const Kernel& kernel, double level) {
  if (kernel.compact()) return 1.0;
  // Slope of the smoothed objective is positive above max + r h when
  // Phi(-r) < level and negative below min - r h when Phi(r) > level.
  const double q = 0.5 * std::min(level, 1.0 - level);
  const boost::math::normal_distribution<double> std_normal;
  return std::max(1.0, boost::math::quantile(std_normal, 1.0 - q));
}

std::pair<double, double> saa_tail_minimum(std::span<const double> sorted, double level) {
  check_level(level);
  if (sorted.empty()) throw std::invalid_argument("empty sample");
  const std::size_t n = sorted.size();
  const double scale = 1.0 / (static_cast<double>(n) * level);
  std::vector<double> values(n);
  double suffix = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    // suffix holds the sum of sorted[k+1..n-1].
    values[k] = sorted[k] + scale * (suffix - static_cast<double>(n - k - 1) * sorted[k]);
    suffix += sorted[k];
  }
  const double best = *std::min_element(values.begin(), values.end());
  const double slack = 1e-12 * std::max(1.0, std::abs(best));
  for (std::size_t k = 0; k < n; ++k) {
    if (values[k] <= best + slack) return {sorted[k], values[k]};
  }
  return {sorted.back(), values.back()};
}

}  // namespace smoothsaa
