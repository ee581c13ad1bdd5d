#pragma once

#include "smoothsaa/smoothing.hpp"
#include "smoothsaa/solvers.hpp"

#include <utility>

namespace smoothsaa {

/// F(u, x) = (u - x)^2 for scalar u and x. The SAA value is the biased sample
/// variance and smoothing adds exactly h^2 m2(K).
class QuadraticLocationProblem final : public Problem {
 public:
  std::string name() const override { return "quadratic_location"; }
  Eigen::Index decision_dim() const override { return 1; }
  Eigen::Index data_dim() const override { return 1; }

  double loss(const Eigen::VectorXd& u, std::span<const double> x) const override;
  void add_subgradient(const Eigen::VectorXd& u, std::span<const double> x, double weight,
                       Eigen::VectorXd& g) const override;
  bool has_analytic(const Kernel& kernel) const override { return kernel.dim() == 1; }
  double smoothed_loss(const Eigen::VectorXd& u, std::span<const double> x, const Kernel& kernel,
                       double h) const override;
  void add_smoothed_subgradient(const Eigen::VectorXd& u, std::span<const double> x, const Kernel& kernel, double h,
                                double weight, Eigen::VectorXd& g) const override;
  /// w(t) = 2 R t + t^2 with R the sample range.
  ModulusSpec modulus(const Sample& sample) const override;

  /// Closed form for the analytic strategy, golden section otherwise.
  SolveReport solve(const Sample& sample, const SmoothingPlan& plan) const override;
};

/// (theta_SAA, theta_K) in closed form.
std::pair<double, double> quadratic_location_values(const Sample& sample, const Kernel& kernel, double h);

}  // namespace smoothsaa
