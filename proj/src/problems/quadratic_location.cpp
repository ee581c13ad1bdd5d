#include "smoothsaa/problems/quadratic_location.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smoothsaa {

namespace {

double unit_scale(const Kernel& kernel) { return kernel.projected_scale(Eigen::VectorXd::Ones(1)); }

struct MeanVariance {
  double mean;
  double variance;
};

MeanVariance biased_moments(const Sample& sample) {
  const std::vector<double> x = sample.column(0);
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, ss / n};
}

}  // namespace

double QuadraticLocationProblem::loss(const Eigen::VectorXd& u, std::span<const double> x) const {
  const double d = u(0) - x[0];
  return d * d;
}

void QuadraticLocationProblem::add_subgradient(const Eigen::VectorXd& u, std::span<const double> x, double weight,
                                               Eigen::VectorXd& g) const {
  g(0) += weight * 2.0 * (u(0) - x[0]);
}

double QuadraticLocationProblem::smoothed_loss(const Eigen::VectorXd& u, std::span<const double> x,
                                               const Kernel& kernel, double h) const {
  return smoothed_square(kernel, u(0) - x[0], h * unit_scale(kernel));
}

void QuadraticLocationProblem::add_smoothed_subgradient(const Eigen::VectorXd& u, std::span<const double> x,
                                                        const Kernel&, double, double weight,
                                                        Eigen::VectorXd& g) const {
  g(0) += weight * 2.0 * (u(0) - x[0]);
}

ModulusSpec QuadraticLocationProblem::modulus(const Sample& sample) const {
  const std::vector<double> x = sample.column(0);
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  const double range = *hi - *lo;
  if (range > 0.0) return ModulusSpec({{2.0 * range, 1.0}, {1.0, 2.0}});
  return ModulusSpec({{1.0, 2.0}});
}

SolveReport QuadraticLocationProblem::solve(const Sample& sample, const SmoothingPlan& plan) const {
  if (sample.dim() != 1) throw std::invalid_argument("quadratic location needs a one-dimensional sample");
  SolveReport report;
  report.minimizer.resize(1);
  const Strategy strategy = resolve_strategy(*this, plan);
  if (std::holds_alternative<AnalyticStrategy>(strategy)) {
    const MeanVariance mv = biased_moments(sample);
    const double scale = plan.h() * unit_scale(plan.kernel());
    report.value = mv.variance + smoothed_square(plan.kernel(), 0.0, scale);
    report.minimizer(0) = mv.mean;
    report.strategy = plan.is_saa() ? "saa-closed-form" : "analytic";
    report.converged = true;
    return report;
  }
  const std::vector<double> x = sample.column(0);
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  const double pad = std::max(1.0, plan.h());
  Eigen::VectorXd z(1);
  const Minimum1d best = minimize_convex_1d(
      [&](double t) {
        z(0) = t;
        return smooth_objective_value(*this, z, sample, plan);
      },
      *lo - pad, *hi + pad, 1e-9);
  report.value = best.value;
  report.minimizer(0) = best.x;
  report.iterations = best.iterations;
  report.strategy = strategy_label(strategy);
  report.converged = best.bracket_width <= 1e-9;
  report.tolerance_achieved = best.bracket_width;
  return report;
}

std::pair<double, double> quadratic_location_values(const Sample& sample, const Kernel& kernel, double h) {
  const QuadraticLocationProblem problem;
  const double saa = problem.solve(sample, SmoothingPlan::saa()).value;
  if (h == 0.0) return {saa, saa};
  return {saa, problem.solve(sample, SmoothingPlan(kernel, h, AnalyticStrategy{})).value};
}

}  // namespace smoothsaa
