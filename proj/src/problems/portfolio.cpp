#include "smoothsaa/problems/portfolio.hpp"

#include "smoothsaa/errors.hpp"
#include "smoothsaa/problems/avar.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace smoothsaa {

namespace {

double dot_row(const Eigen::VectorXd& u, std::span<const double> x) {
  double acc = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) acc += u(static_cast<Eigen::Index>(j)) * x[j];
  return acc;
}

Eigen::VectorXd scale_gradient(const Kernel& kernel, const Eigen::VectorXd& v) {
  const double s = kernel.projected_scale(v);
  if (s == 0.0) return Eigen::VectorXd::Zero(v.size());
  if (kernel.identity_covariance() || kernel.dim() != v.size()) return v / s;
  return kernel.covariance() * v / s;
}

Kernel profile(const Kernel& kernel) {
  switch (kernel.kind()) {
    case KernelKind::Uniform:
      return Kernel::uniform();
    case KernelKind::Epanechnikov:
      return Kernel::epanechnikov();
    case KernelKind::Gaussian:
      break;
  }
  return Kernel::gaussian();
}

double tolerance_for(double a, double b, double c) { return 1e-12 * std::max({1.0, std::abs(a), std::abs(b), std::abs(c)}); }

}  // namespace

PortfolioProblem::PortfolioProblem(double kappa, double beta, double capital, Eigen::VectorXd lower,
                                   Eigen::VectorXd upper)
    : kappa_(kappa), beta_(beta), capital_(capital), lower_(std::move(lower)), upper_(std::move(upper)) {
  if (!(kappa > 0.0 && kappa < 1.0)) throw std::invalid_argument("kappa must lie in (0, 1)");
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0, 1)");
  if (lower_.size() < 1 || lower_.size() != upper_.size()) {
    throw std::invalid_argument("lower and upper bounds need the same positive length");
  }
  if (!lower_.allFinite() || !upper_.allFinite() || !std::isfinite(capital)) {
    throw std::invalid_argument("portfolio bounds and capital must be finite");
  }
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    if (lower_(i) > upper_(i)) {
      std::ostringstream msg;
      msg << "infeasible bounds: lower[" << i << "] = " << lower_(i) << " exceeds upper[" << i << "] = " << upper_(i);
      throw std::invalid_argument(msg.str());
    }
  }
  const double lo = lower_.sum();
  const double hi = upper_.sum();
  const double slack = tolerance_for(capital, lo, hi);
  if (lo > capital + slack) {
    std::ostringstream msg;
    msg << "infeasible bounds: sum of lower bounds " << lo << " exceeds capital " << capital;
    throw std::invalid_argument(msg.str());
  }
  if (hi < capital - slack) {
    std::ostringstream msg;
    msg << "infeasible bounds: capital " << capital << " exceeds sum of upper bounds " << hi;
    throw std::invalid_argument(msg.str());
  }
}

bool PortfolioProblem::singleton() const {
  const double slack = tolerance_for(capital_, lower_.sum(), upper_.sum());
  return (upper_ - lower_).maxCoeff() <= 0.0 || std::abs(lower_.sum() - capital_) <= slack ||
         std::abs(upper_.sum() - capital_) <= slack;
}

double PortfolioProblem::loss(const Eigen::VectorXd& u, std::span<const double> x) const {
  const Eigen::Index m = assets();
  const double r = dot_row(u.head(m), x);
  const double eta = u(m);
  return -kappa_ * r + (1.0 - kappa_) * (-eta + std::max(0.0, eta - r) / beta_);
}

void PortfolioProblem::add_subgradient(const Eigen::VectorXd& u, std::span<const double> x, double weight,
                                       Eigen::VectorXd& g) const {
  const Eigen::Index m = assets();
  const double r = dot_row(u.head(m), x);
  const double eta = u(m);
  const double active = eta - r > 0.0 ? 1.0 : 0.0;
  const double coef = -kappa_ - (1.0 - kappa_) * active / beta_;
  for (Eigen::Index j = 0; j < m; ++j) g(j) += weight * coef * x[static_cast<std::size_t>(j)];
  g(m) += weight * (1.0 - kappa_) * (-1.0 + active / beta_);
}

bool PortfolioProblem::has_analytic(const Kernel& kernel) const {
  return kernel.dim() == 1 || (kernel.kind() == KernelKind::Gaussian && kernel.dim() == assets());
}

double PortfolioProblem::smoothed_loss(const Eigen::VectorXd& u, std::span<const double> x, const Kernel& kernel,
                                       double h) const {
  const Eigen::Index m = assets();
  const Eigen::VectorXd alloc = u.head(m);
  const double r = dot_row(alloc, x);
  const double eta = u(m);
  const double scale = h * kernel.projected_scale(alloc);
  const double hinge = scale > 0.0 ? smoothed_hinge(kernel, eta - r, scale) : std::max(0.0, eta - r);
  return -kappa_ * r + (1.0 - kappa_) * (-eta + hinge / beta_);
}

void PortfolioProblem::add_smoothed_subgradient(const Eigen::VectorXd& u, std::span<const double> x,
                                                const Kernel& kernel, double h, double weight,
                                                Eigen::VectorXd& g) const {
  const Eigen::Index m = assets();
  const Eigen::VectorXd alloc = u.head(m);
  const double r = dot_row(alloc, x);
  const double eta = u(m);
  const double scale = h * kernel.projected_scale(alloc);
  const double slope = smoothed_hinge_slope(kernel, eta - r, scale);
  const double coef = -kappa_ - (1.0 - kappa_) * slope / beta_;
  for (Eigen::Index j = 0; j < m; ++j) g(j) += weight * coef * x[static_cast<std::size_t>(j)];
  if (scale > 0.0) {
    g.head(m) += weight * (1.0 - kappa_) / beta_ * smoothed_hinge_dh(kernel, eta - r, scale) * h *
                 scale_gradient(kernel, alloc);
  }
  g(m) += weight * (1.0 - kappa_) * (-1.0 + slope / beta_);
}

std::vector<double> PortfolioProblem::kinks(const Eigen::VectorXd& u) const {
  if (assets() != 1 || u(0) == 0.0) return {};
  return {u(1) / u(0)};
}

ModulusSpec PortfolioProblem::modulus(const Sample&) const {
  const double c = std::sqrt(lower_.array().square().max(upper_.array().square()).sum());
  const double factor = kappa_ + (1.0 - kappa_) / beta_;
  // A zero bound vector allows only the zero allocation; keep the modulus positive.
  return ModulusSpec::linear(std::max(c, 1e-300) * factor);
}

std::pair<double, double> PortfolioProblem::value_at(const Eigen::VectorXd& allocation, const Sample& sample,
                                                     const SmoothingPlan& plan) const {
  std::vector<double> losses(static_cast<std::size_t>(sample.size()));
  double mean_return = 0.0;
  for (Eigen::Index i = 0; i < sample.size(); ++i) {
    const double r = dot_row(allocation, sample.row(i));
    losses[static_cast<std::size_t>(i)] = -r;
    mean_return += r;
  }
  mean_return /= static_cast<double>(sample.size());
  const double scale = plan.is_saa() ? 0.0 : plan.h() * plan.kernel().projected_scale(allocation);
  const SmoothingPlan inner =
      scale > 0.0 ? SmoothingPlan(profile(plan.kernel()), scale, AnalyticStrategy{}) : SmoothingPlan::saa();
  // min_eta -eta + E[(eta - R)_+] / beta is the AVaR of the loss -R, attained at eta = -z.
  const SolveReport tail = avar_value(Sample::scalar(losses), beta_, inner);
  return {-tail.minimizer(0), -kappa_ * mean_return + (1.0 - kappa_) * tail.value};
}

SolveReport PortfolioProblem::solve(const Sample& sample, const SmoothingPlan& plan) const {
  if (sample.dim() != data_dim()) throw std::invalid_argument("sample dimension mismatch");
  const Eigen::Index m = assets();
  const std::string label = plan.is_saa() ? "saa" : "projection-analytic";
  const Projection project = [this](const Eigen::VectorXd& a) {
    return project_box_simplex(a, capital_, lower_, upper_);
  };
  const Eigen::VectorXd start = project(Eigen::VectorXd::Constant(m, capital_ / static_cast<double>(m)));

  SolveReport report;
  if (singleton()) {
    const auto [eta, value] = value_at(start, sample, plan);
    report.value = value;
    report.minimizer.resize(m + 1);
    report.minimizer << start, eta;
    report.iterations = 0;
    report.strategy = label + "/singleton";
    report.converged = true;
    return report;
  }

  const SubgradientOracle oracle = [&](const Eigen::VectorXd& alloc, Eigen::VectorXd& grad) {
    const auto [eta, value] = value_at(alloc, sample, plan);
    Eigen::VectorXd full(m + 1);
    full << alloc, eta;
    const Eigen::VectorXd g = plan.is_saa() ? smooth_subgradient(*this, full, sample, SmoothingPlan::saa())
                                            : smooth_subgradient(*this, full, sample,
                                                                 SmoothingPlan(plan.kernel(), plan.h(), AnalyticStrategy{}));
    grad = g.head(m);
    // Normalized steps: the step length is measured in allocation units.
    const double norm = grad.norm();
    if (norm > 0.0) grad /= norm;
    return value;
  };
  SubgradientOptions options;
  options.step = StepRule{0.5 * (upper_ - lower_).norm(), 10.0, false};
  report = projected_subgradient(oracle, project, start, options);
  const Eigen::VectorXd best = report.minimizer;
  const auto [eta, value] = value_at(best, sample, plan);
  report.minimizer.resize(m + 1);
  report.minimizer << best, eta;
  report.value = value;
  report.strategy = label + "/" + report.strategy;
  return report;
}

SolveReport portfolio_value(const PortfolioProblem& problem, const Sample& sample, const SmoothingPlan& plan) {
  return problem.solve(sample, plan);
}

}  // namespace smoothsaa
