#pragma once

#include "smoothsaa/smoothing.hpp"
#include "smoothsaa/solvers.hpp"

namespace smoothsaa {

/**
 * Mean return traded off against the Average Value-at-Risk of the loss:
 *
 *   F(u, eta, x) = -kappa <u, x> + (1 - kappa) (-eta + (eta - <u, x>)_+ / beta)
 *
 * over allocations u with sum u = capital and lower <= u <= upper. Sample
 * rows are asset returns. Smoothing acts on the projection <u, x> with
 * bandwidth h * sqrt(u' A u).
 */
class PortfolioProblem final : public Problem {
 public:
  /// Throws std::invalid_argument for kappa or beta outside (0, 1), or when
  /// the bounds admit no allocation (the message names the violated constraint).
  PortfolioProblem(double kappa, double beta, double capital, Eigen::VectorXd lower, Eigen::VectorXd upper);

  double kappa() const { return kappa_; }
  double beta() const { return beta_; }
  double capital() const { return capital_; }
  Eigen::Index assets() const { return lower_.size(); }
  /// True when the bounds leave a single feasible allocation.
  bool singleton() const;

  std::string name() const override { return "portfolio"; }
  /// Decision (u, eta).
  Eigen::Index decision_dim() const override { return assets() + 1; }
  Eigen::Index data_dim() const override { return assets(); }

  double loss(const Eigen::VectorXd& u, std::span<const double> x) const override;
  void add_subgradient(const Eigen::VectorXd& u, std::span<const double> x, double weight,
                       Eigen::VectorXd& g) const override;
  bool has_analytic(const Kernel& kernel) const override;
  double smoothed_loss(const Eigen::VectorXd& u, std::span<const double> x, const Kernel& kernel,
                       double h) const override;
  void add_smoothed_subgradient(const Eigen::VectorXd& u, std::span<const double> x, const Kernel& kernel, double h,
                                double weight, Eigen::VectorXd& g) const override;
  std::vector<double> kinks(const Eigen::VectorXd& u) const override;
  /// w(t) = c (kappa + (1 - kappa) / beta) t with c = sqrt(sum max(l_i^2, b_i^2)).
  ModulusSpec modulus(const Sample& sample) const override;

  /// Projected subgradient over allocations; for each allocation eta is
  /// minimized exactly (as an AVaR problem in the projected returns).
  SolveReport solve(const Sample& sample, const SmoothingPlan& plan) const override;

  /// Optimal eta and objective value for a fixed allocation.
  std::pair<double, double> value_at(const Eigen::VectorXd& allocation, const Sample& sample,
                                     const SmoothingPlan& plan) const;

 private:
  double kappa_;
  double beta_;
  double capital_;
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
};

SolveReport portfolio_value(const PortfolioProblem& problem, const Sample& sample, const SmoothingPlan& plan);

}  // namespace smoothsaa
