#pragma once

#include "smoothsaa/smoothing.hpp"
#include "smoothsaa/solvers.hpp"

namespace smoothsaa {

/**
 * Least squares under an l1 budget. Sample rows are (y, x_1, ..., x_m) and
 * the loss is (beta~' x~)^2 with beta~ = (-1, beta), x~ = (y, x).
 *
 * Smoothing the data with a Gaussian kernel of covariance A adds exactly
 * h^2 beta~' A beta~ to each term, so the smoothed problem is a ridge-type
 * regularization of the plain one.
 */
class LassoProblem final : public Problem {
 public:
  /// Throws std::invalid_argument unless features >= 1, radius > 0 and A is
  /// an (features + 1)-square positive definite matrix.
  LassoProblem(Eigen::Index features, double radius, const Eigen::MatrixXd& covariance);
  /// Identity covariance.
  LassoProblem(Eigen::Index features, double radius);

  double radius() const { return radius_; }
  const Kernel& kernel() const { return kernel_; }
  /// (-1, beta).
  static Eigen::VectorXd extended(const Eigen::VectorXd& beta);

  std::string name() const override { return "lasso"; }
  Eigen::Index decision_dim() const override { return features_; }
  Eigen::Index data_dim() const override { return features_ + 1; }

  double loss(const Eigen::VectorXd& beta, std::span<const double> x) const override;
  void add_subgradient(const Eigen::VectorXd& beta, std::span<const double> x, double weight,
                       Eigen::VectorXd& g) const override;
  bool has_analytic(const Kernel& kernel) const override;
  double smoothed_loss(const Eigen::VectorXd& beta, std::span<const double> x, const Kernel& kernel,
                       double h) const override;
  void add_smoothed_subgradient(const Eigen::VectorXd& beta, std::span<const double> x, const Kernel& kernel,
                                double h, double weight, Eigen::VectorXd& g) const override;
  /// w(t) = c1^2 t (2 c2 + t), c1 = sqrt(1 + radius^2), c2 = max ||x~_i||.
  ModulusSpec modulus(const Sample& sample) const override;

  /// Projected gradient on the ridge form for Gaussian kernels, projected
  /// subgradient on the generic smoothed objective otherwise.
  SolveReport solve(const Sample& sample, const SmoothingPlan& plan) const override;
  SolveReport solve(const Sample& sample, const SmoothingPlan& plan, const SubgradientOptions& budget) const;

 private:
  Eigen::Index features_;
  double radius_;
  Kernel kernel_;
};

/// Minimizes sum_i (beta~' x~_i)^2 + N h^2 beta~' A beta~ over ||beta||_1 <= t
/// with the problem's own Gaussian kernel. The reported value is in this
/// summed form (N times the averaged objective).
SolveReport lasso_values(const LassoProblem& problem, const Sample& sample, double h,
                         const SubgradientOptions& budget = {});

}  // namespace smoothsaa
