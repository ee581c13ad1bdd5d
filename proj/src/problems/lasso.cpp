#include "smoothsaa/problems/lasso.hpp"

#include "smoothsaa/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace smoothsaa {

namespace {

double residual(const Eigen::VectorXd& beta, std::span<const double> x) {
  double r = -x[0];
  for (Eigen::Index j = 0; j < beta.size(); ++j) r += beta(j) * x[static_cast<std::size_t>(j + 1)];
  return r;
}

Eigen::MatrixXd checked_covariance(Eigen::Index features, const Eigen::MatrixXd& a) {
  if (features < 1) throw std::invalid_argument("LASSO needs at least one feature");
  if (a.rows() != features + 1 || a.cols() != features + 1) {
    throw std::invalid_argument("LASSO kernel covariance must be (features + 1)-square");
  }
  return a;
}

}  // namespace

LassoProblem::LassoProblem(Eigen::Index features, double radius, const Eigen::MatrixXd& covariance)
    : features_(features), radius_(radius), kernel_(Kernel::gaussian(checked_covariance(features, covariance))) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("l1 radius must be positive");
}

LassoProblem::LassoProblem(Eigen::Index features, double radius)
    : LassoProblem(features, radius, Eigen::MatrixXd::Identity(features + 1, features + 1)) {}

Eigen::VectorXd LassoProblem::extended(const Eigen::VectorXd& beta) {
  Eigen::VectorXd out(beta.size() + 1);
  out(0) = -1.0;
  out.tail(beta.size()) = beta;
  return out;
}

double LassoProblem::loss(const Eigen::VectorXd& beta, std::span<const double> x) const {
  const double r = residual(beta, x);
  return r * r;
}

void LassoProblem::add_subgradient(const Eigen::VectorXd& beta, std::span<const double> x, double weight,
                                   Eigen::VectorXd& g) const {
  const double r = 2.0 * weight * residual(beta, x);
  for (Eigen::Index j = 0; j < beta.size(); ++j) g(j) += r * x[static_cast<std::size_t>(j + 1)];
}

bool LassoProblem::has_analytic(const Kernel& kernel) const {
  if (kernel.kind() != KernelKind::Gaussian) return false;
  return kernel.dim() == features_ + 1 || (kernel.dim() == 1 && kernel.identity_covariance());
}

double LassoProblem::smoothed_loss(const Eigen::VectorXd& beta, std::span<const double> x, const Kernel& kernel,
                                   double h) const {
  const double scale = h * kernel.projected_scale(extended(beta));
  return smoothed_square(kernel, residual(beta, x), scale);
}

void LassoProblem::add_smoothed_subgradient(const Eigen::VectorXd& beta, std::span<const double> x,
                                            const Kernel& kernel, double h, double weight,
                                            Eigen::VectorXd& g) const {
  add_subgradient(beta, x, weight, g);
  const Eigen::VectorXd bt = extended(beta);
  const Eigen::VectorXd a_bt = kernel.dim() == bt.size() ? Eigen::VectorXd(kernel.covariance() * bt) : bt;
  g += weight * 2.0 * h * h * a_bt.tail(features_);
}

ModulusSpec LassoProblem::modulus(const Sample& sample) const {
  const double c1_sq = 1.0 + radius_ * radius_;
  double c2 = 0.0;
  for (Eigen::Index i = 0; i < sample.size(); ++i) c2 = std::max(c2, sample.matrix().row(i).norm());
  if (c2 > 0.0) return ModulusSpec({{2.0 * c1_sq * c2, 1.0}, {c1_sq, 2.0}});
  return ModulusSpec({{c1_sq, 2.0}});
}

SolveReport LassoProblem::solve(const Sample& sample, const SmoothingPlan& plan) const {
  SubgradientOptions budget;
  budget.max_iterations = 20000;
  return solve(sample, plan, budget);
}

SolveReport LassoProblem::solve(const Sample& sample, const SmoothingPlan& plan,
                                const SubgradientOptions& budget) const {
  if (sample.dim() != data_dim()) throw std::invalid_argument("sample dimension mismatch");
  const Strategy strategy = resolve_strategy(*this, plan);
  const Projection project = [this](const Eigen::VectorXd& b) { return project_l1_ball(b, radius_); };
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(features_);

  if (std::holds_alternative<AnalyticStrategy>(strategy)) {
    // Objective beta~' Q beta~ with Q = X~'X~ / N + h^2 A.
    const double n = static_cast<double>(sample.size());
    Eigen::MatrixXd q = sample.matrix().transpose() * sample.matrix() / n;
    if (!plan.is_saa()) {
      const double h2 = plan.h() * plan.h();
      if (plan.kernel().dim() == data_dim()) {
        q += h2 * plan.kernel().covariance();
      } else {
        q += h2 * Eigen::MatrixXd::Identity(data_dim(), data_dim());
      }
    }
    const Eigen::MatrixXd q11 = q.bottomRightCorner(features_, features_);
    const Eigen::VectorXd q10 = q.col(0).tail(features_);
    const double lipschitz = 2.0 * Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(q11).eigenvalues().maxCoeff();
    SubgradientOptions options = budget;
    options.step = StepRule{lipschitz > 0.0 ? 1.0 / lipschitz : 1.0, 0.0, true};
    const SubgradientOracle oracle = [&](const Eigen::VectorXd& b, Eigen::VectorXd& grad) {
      const Eigen::VectorXd bt = extended(b);
      grad = 2.0 * (q11 * b - q10);
      return bt.dot(q * bt);
    };
    SolveReport report = projected_subgradient(oracle, project, x0, options);
    report.strategy = plan.is_saa() ? "saa-projected-gradient" : "analytic-projected-gradient";
    return report;
  }

  const SubgradientOracle oracle = [&](const Eigen::VectorXd& b, Eigen::VectorXd& grad) {
    grad = smooth_subgradient(*this, b, sample, plan);
    return smooth_objective_value(*this, b, sample, plan);
  };
  SolveReport report = projected_subgradient(oracle, project, x0, budget);
  report.strategy = strategy_label(strategy);
  return report;
}

SolveReport lasso_values(const LassoProblem& problem, const Sample& sample, double h,
                         const SubgradientOptions& budget) {
  const SmoothingPlan plan = h == 0.0 ? SmoothingPlan::saa() : SmoothingPlan(problem.kernel(), h, AnalyticStrategy{});
  SolveReport report = problem.solve(sample, plan, budget);
  report.value *= static_cast<double>(sample.size());
  return report;
}

}  // namespace smoothsaa
