#pragma once

#include "smoothsaa/smoothing.hpp"
#include "smoothsaa/solvers.hpp"

#include <span>

namespace smoothsaa {

/**
 * Average Value-at-Risk of a scalar X through its variational form
 *
 *   AVaR_alpha(X) = min_z { z + E[(X - z)_+] / alpha },
 *
 * i.e. F(z, x) = z + max{0, x - z} / alpha with decision z.
 */
class AvarProblem final : public Problem {
 public:
  /// Throws std::invalid_argument unless 0 < alpha < 1.
  explicit AvarProblem(double alpha);

  double alpha() const { return alpha_; }

  std::string name() const override { return "avar"; }
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
  std::vector<double> kinks(const Eigen::VectorXd& u) const override { return {u(0)}; }
  /// w(t) = t / alpha.
  ModulusSpec modulus(const Sample& sample) const override;

  /// SAA: exact breakpoint enumeration, left-most optimal breakpoint.
  /// Smoothed: golden section on [min X - r h, max X + r h].
  SolveReport solve(const Sample& sample, const SmoothingPlan& plan) const override;

 private:
  double alpha_;
};

/// Minimizes z + (1/(N alpha)) sum_i hinge(X_i - z), plain or smoothed.
SolveReport avar_value(const Sample& sample, double alpha, const SmoothingPlan& plan);

/// Exact AVaR_alpha of N(mu, sigma2): mu + sigma phi(Phi^{-1}(1 - alpha)) / alpha.
double true_avar_normal(double mu, double sigma2, double alpha);

/// Radius r (in bandwidth units) such that every minimizer of a smoothed
/// hinge-sum objective at tail level `level` lies within r h of the data range.
double hinge_bracket_radius(const Kernel& kernel, double level);

/// Left-most minimizer and value of z + (1/(N level)) sum (x_i - z)_+ over
/// ascending `sorted` values.
std::pair<double, double> saa_tail_minimum(std::span<const double> sorted, double level);

}  // namespace smoothsaa
