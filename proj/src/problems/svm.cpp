#include "smoothsaa/problems/svm.hpp"

#include "smoothsaa/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smoothsaa {

namespace {

struct Margin {
  double label;
  double s;
};

Margin margin(const Eigen::VectorXd& u, std::span<const double> x) {
  const Eigen::Index n = u.size() - 1;
  double proj = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) proj += u(j) * x[static_cast<std::size_t>(j + 1)];
  const double label = x[0];
  return {label, label * (proj - u(n))};
}

// Scale of <v, Z> for Z ~ K and its gradient in v.
double projection_scale(const Kernel& kernel, const Eigen::VectorXd& v) { return kernel.projected_scale(v); }

Eigen::VectorXd projection_scale_gradient(const Kernel& kernel, const Eigen::VectorXd& v) {
  const double s = kernel.projected_scale(v);
  if (s == 0.0) return Eigen::VectorXd::Zero(v.size());
  if (kernel.identity_covariance() || kernel.dim() != v.size()) return v / s;
  return kernel.covariance() * v / s;
}

double max_row_norm(const RowMatrix& m) {
  double out = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) out = std::max(out, m.row(i).norm());
  return out;
}

}  // namespace

SvmProblem::SvmProblem(RowMatrix class1, RowMatrix class2) : class1_(std::move(class1)), class2_(std::move(class2)) {
  if (class1_.rows() < 1 || class2_.rows() < 1) throw std::invalid_argument("both SVM classes need a point");
  if (class1_.cols() < 1 || class1_.cols() != class2_.cols()) {
    throw std::invalid_argument("SVM classes must share a positive dimension");
  }
  if (!class1_.allFinite() || !class2_.allFinite()) throw std::invalid_argument("SVM points must be finite");
}

Sample SvmProblem::labeled_sample() const {
  RowMatrix rows(class1_.rows() + class2_.rows(), features() + 1);
  rows.topLeftCorner(class1_.rows(), 1).setConstant(1.0);
  rows.topRightCorner(class1_.rows(), features()) = class1_;
  rows.bottomLeftCorner(class2_.rows(), 1).setConstant(-1.0);
  rows.bottomRightCorner(class2_.rows(), features()) = class2_;
  return Sample(std::move(rows));
}

double SvmProblem::class_weight(double label) const {
  const double n = static_cast<double>(class1_.rows() + class2_.rows());
  return label > 0.0 ? n / static_cast<double>(class1_.rows()) : n / static_cast<double>(class2_.rows());
}

double SvmProblem::loss(const Eigen::VectorXd& u, std::span<const double> x) const {
  const Margin m = margin(u, x);
  return class_weight(m.label) * std::max(0.0, m.s);
}

void SvmProblem::add_subgradient(const Eigen::VectorXd& u, std::span<const double> x, double weight,
                                 Eigen::VectorXd& g) const {
  const Margin m = margin(u, x);
  if (m.s <= 0.0) return;
  const double c = weight * class_weight(m.label) * m.label;
  const Eigen::Index n = features();
  for (Eigen::Index j = 0; j < n; ++j) g(j) += c * x[static_cast<std::size_t>(j + 1)];
  g(n) -= c;
}

bool SvmProblem::has_analytic(const Kernel& kernel) const {
  return kernel.dim() == 1 || (kernel.kind() == KernelKind::Gaussian && kernel.dim() == features());
}

double SvmProblem::smoothed_loss(const Eigen::VectorXd& u, std::span<const double> x, const Kernel& kernel,
                                 double h) const {
  const Margin m = margin(u, x);
  const double scale = h * projection_scale(kernel, u.head(features()));
  if (scale == 0.0) return class_weight(m.label) * std::max(0.0, m.s);
  return class_weight(m.label) * smoothed_hinge(kernel, m.s, scale);
}

void SvmProblem::add_smoothed_subgradient(const Eigen::VectorXd& u, std::span<const double> x, const Kernel& kernel,
                                          double h, double weight, Eigen::VectorXd& g) const {
  const Margin m = margin(u, x);
  const Eigen::Index n = features();
  const Eigen::VectorXd v = u.head(n);
  const double scale = h * projection_scale(kernel, v);
  const double w = weight * class_weight(m.label);
  const double slope = smoothed_hinge_slope(kernel, m.s, scale);
  for (Eigen::Index j = 0; j < n; ++j) g(j) += w * slope * m.label * x[static_cast<std::size_t>(j + 1)];
  g(n) -= w * slope * m.label;
  if (scale > 0.0) g.head(n) += w * smoothed_hinge_dh(kernel, m.s, scale) * h * projection_scale_gradient(kernel, v);
}

std::vector<double> SvmProblem::kinks(const Eigen::VectorXd& u) const {
  if (features() != 1 || u(0) == 0.0) return {};
  return {u(1) / u(0)};
}

ModulusSpec SvmProblem::modulus(const Sample&) const { return ModulusSpec::linear(2.0); }

double SvmProblem::gamma_bound(const SmoothingPlan& plan) const {
  double pad = 0.0;
  if (!plan.is_saa()) {
    const Kernel& k = plan.kernel();
    double spread = 1.0;
    if (k.dim() > 1 && !k.identity_covariance()) {
      spread = std::sqrt(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(k.covariance()).eigenvalues().maxCoeff());
    } else if (k.dim() == 1) {
      spread = k.projected_scale(Eigen::VectorXd::Ones(1));
    }
    pad = plan.h() * spread;
  }
  return std::max(max_row_norm(class1_), max_row_norm(class2_)) + pad + 1e-12;
}

SolveReport SvmProblem::solve(const Sample& sample, const SmoothingPlan& plan) const {
  if (sample.dim() != data_dim() || sample.size() != class1_.rows() + class2_.rows()) {
    throw std::invalid_argument("SVM sample does not match the problem's classes");
  }
  const Strategy strategy = resolve_strategy(*this, plan);
  const double c = gamma_bound(plan);
  const Eigen::Index n = features();
  Eigen::VectorXd u(n + 1);
  auto objective = [&](const Eigen::VectorXd& point) { return smooth_objective_value(*this, point, sample, plan); };

  SolveReport report;
  if (n == 2) {
    SphereSearchOptions options;
    options.gamma_bound = c;
    report = sphere_search_2d(
        [&](const Eigen::Vector2d& v, double gamma) {
          u << v(0), v(1), gamma;
          return objective(u);
        },
        options);
  } else if (n == 1) {
    report.value = std::numeric_limits<double>::infinity();
    report.minimizer.resize(2);
    for (double sign : {-1.0, 1.0}) {
      const Minimum1d best = minimize_convex_1d(
          [&](double gamma) {
            u << sign, gamma;
            return objective(u);
          },
          -c, c, 1e-9);
      report.iterations += best.iterations;
      if (best.value < report.value) {
        report.value = best.value;
        report.minimizer << sign, best.x;
        report.tolerance_achieved = best.bracket_width;
      }
    }
    report.converged = true;
  } else {
    // Start from the direction separating the class means.
    Eigen::VectorXd x0(n + 1);
    const Eigen::VectorXd m1 = class1_.colwise().mean().transpose();
    const Eigen::VectorXd m2 = class2_.colwise().mean().transpose();
    Eigen::VectorXd v = m2 - m1;
    if (v.norm() == 0.0) v = Eigen::VectorXd::Unit(n, 0);
    v.normalize();
    x0.head(n) = v;
    x0(n) = 0.5 * v.dot(m1 + m2);
    const Projection project = [n, c](const Eigen::VectorXd& p) {
      Eigen::VectorXd out = p;
      const double norm = out.head(n).norm();
      if (norm > 0.0) {
        out.head(n) /= norm;
      } else {
        out.head(n) = Eigen::VectorXd::Unit(n, 0);
      }
      out(n) = std::clamp(out(n), -c, c);
      return out;
    };
    const SubgradientOracle oracle = [&](const Eigen::VectorXd& p, Eigen::VectorXd& grad) {
      grad = smooth_subgradient(*this, p, sample, plan);
      return objective(p);
    };
    report = projected_subgradient(oracle, project, x0);
  }
  report.strategy = (plan.is_saa() ? std::string("saa/") : strategy_label(strategy) + "/") + report.strategy;
  if (n == 1) report.strategy += "sign-enumeration";
  return report;
}

SolveReport svm_values(const SvmProblem& problem, const SmoothingPlan& plan) {
  return problem.solve(problem.labeled_sample(), plan);
}

}  // namespace smoothsaa
