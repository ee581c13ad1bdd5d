#pragma once

#include "smoothsaa/smoothing.hpp"
#include "smoothsaa/solvers.hpp"

namespace smoothsaa {

/**
 * Binary linear classifier with unit normal v and offset gamma:
 *
 *   (1/m1) sum_j (<v, x^j> - gamma)_+ + (1/m2) sum_j (gamma - <v, y^j>)_+
 *
 * over ||v|| = 1, |gamma| <= c. Class one points x^j should end up with
 * <v, x> <= gamma.
 *
 * The problem works on a labeled sample whose rows are (label, point) with
 * label +1 for class one and -1 for class two; only the point columns are
 * smoothed. Smoothing acts on the scalar projection <v, x> with bandwidth
 * h * sqrt(v' A v), exact for Gaussian kernels.
 */
class SvmProblem final : public Problem {
 public:
  /// Rows of each matrix are points; both classes need at least one point
  /// of the same dimension.
  SvmProblem(RowMatrix class1, RowMatrix class2);

  Eigen::Index features() const { return class1_.cols(); }
  Eigen::Index class1_size() const { return class1_.rows(); }
  Eigen::Index class2_size() const { return class2_.rows(); }
  /// Class one rows followed by class two rows, each prefixed by its label.
  Sample labeled_sample() const;

  std::string name() const override { return "svm"; }
  Eigen::Index decision_dim() const override { return features() + 1; }
  Eigen::Index data_dim() const override { return features() + 1; }
  Eigen::Index smoothed_offset() const override { return 1; }

  /// Decision u = (v, gamma).
  double loss(const Eigen::VectorXd& u, std::span<const double> x) const override;
  void add_subgradient(const Eigen::VectorXd& u, std::span<const double> x, double weight,
                       Eigen::VectorXd& g) const override;
  bool has_analytic(const Kernel& kernel) const override;
  double smoothed_loss(const Eigen::VectorXd& u, std::span<const double> x, const Kernel& kernel,
                       double h) const override;
  void add_smoothed_subgradient(const Eigen::VectorXd& u, std::span<const double> x, const Kernel& kernel, double h,
                                double weight, Eigen::VectorXd& g) const override;
  std::vector<double> kinks(const Eigen::VectorXd& u) const override;
  /// w(t) = 2t for the averaged objective (t per class term, two terms).
  ModulusSpec modulus(const Sample& sample) const override;

  /// Two features: sphere grid search. One feature: both signs of v with a
  /// golden-section search in gamma. Otherwise projected subgradient with
  /// renormalization of v (local solution only).
  SolveReport solve(const Sample& sample, const SmoothingPlan& plan) const override;

  /// Bound c of the gamma interval for the given plan.
  double gamma_bound(const SmoothingPlan& plan) const;

 private:
  double class_weight(double label) const;

  RowMatrix class1_;
  RowMatrix class2_;
};

SolveReport svm_values(const SvmProblem& problem, const SmoothingPlan& plan);

}  // namespace smoothsaa
