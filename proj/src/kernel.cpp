#include "smoothsaa/kernel.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace smoothsaa {

namespace {

const boost::math::normal_distribution<double> kStdNormal{};

double std_normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 2.0)) {
    throw std::invalid_argument("moment order " + std::to_string(alpha) + " outside [0, 2]");
  }
}

// E[Q^p] for Q = sum_i lambda_i g_i^2, g_i iid standard normal, 0 < p < 1.
// Uses Q^p = p / Gamma(1-p) * int_0^inf (1 - exp(-tQ)) t^(-p-1) dt and the
// moment generating function of the weighted chi-square.
double weighted_chisq_power(const Eigen::VectorXd& lambdas, double p) {
  auto integrand = [&](double t) {
    double log_mgf = 0.0;
    for (double l : lambdas) log_mgf -= 0.5 * std::log1p(2.0 * t * l);
    return -std::expm1(log_mgf) * std::pow(t, -p - 1.0);
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  const double integral = integrator.integrate(integrand, 0.0, std::numeric_limits<double>::infinity());
  return p / std::tgamma(1.0 - p) * integral;
}

// Profile integral G(t) = int max{0, t + z} K(z) dz, so smoothed_hinge = h G(s/h).
double hinge_profile(const Kernel& kernel, double t) {
  switch (kernel.kind()) {
    case KernelKind::Uniform:
      if (t >= 1.0) return t;
      if (t <= -1.0) return 0.0;
      return 0.25 * (1.0 + t) * (1.0 + t);
    case KernelKind::Epanechnikov: {
      if (t >= 1.0) return t;
      if (t <= -1.0) return 0.0;
      const double t2 = t * t;
      return 3.0 / 16.0 + 0.5 * t + 0.375 * t2 - t2 * t2 / 16.0;
    }
    case KernelKind::Gaussian:
      return t * std_normal_cdf(t) + std_normal_pdf(t);
  }
  return 0.0;
}

}  // namespace

Kernel::Kernel(KernelKind kind, Eigen::MatrixXd cov, bool identity)
    : kind_(kind), cov_(std::move(cov)), identity_(identity) {
  chol_ = cov_.llt().matrixL();
}

Kernel Kernel::uniform() { return Kernel(KernelKind::Uniform, Eigen::MatrixXd::Identity(1, 1), true); }

Kernel Kernel::epanechnikov() {
  return Kernel(KernelKind::Epanechnikov, Eigen::MatrixXd::Identity(1, 1), true);
}

Kernel Kernel::gaussian(Eigen::Index dim) {
  if (dim < 1) throw std::invalid_argument("Gaussian kernel dimension must be >= 1");
  return Kernel(KernelKind::Gaussian, Eigen::MatrixXd::Identity(dim, dim), true);
}

Kernel Kernel::gaussian(const Eigen::MatrixXd& covariance) {
  if (covariance.rows() < 1 || covariance.rows() != covariance.cols()) {
    throw std::invalid_argument("Gaussian kernel covariance must be a non-empty square matrix");
  }
  if (!covariance.allFinite() || !covariance.isApprox(covariance.transpose(), 1e-12)) {
    throw std::invalid_argument("Gaussian kernel covariance must be symmetric and finite");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("Gaussian kernel covariance is not positive definite");
  }
  const bool identity = covariance.isIdentity(0.0);
  return Kernel(KernelKind::Gaussian, covariance, identity);
}

std::string_view Kernel::name() const {
  switch (kind_) {
    case KernelKind::Uniform: return "uniform";
    case KernelKind::Epanechnikov: return "epanechnikov";
    case KernelKind::Gaussian: return "gaussian";
  }
  return "unknown";
}

double Kernel::projected_scale(const Eigen::VectorXd& v) const {
  if (identity_ || v.size() != cov_.rows()) return v.norm();
  return std::sqrt(v.dot(cov_ * v));
}

Kernel kernel_from_name(std::string_view name) {
  if (name == "uniform") return Kernel::uniform();
  if (name == "epanechnikov") return Kernel::epanechnikov();
  if (name == "gaussian") return Kernel::gaussian();
  throw std::invalid_argument("unknown kernel '" + std::string(name) + "'");
}

double KernelMoments::at(double alpha) const {
  for (const auto& [a, value] : fractional) {
    if (a == alpha) return value;
  }
  throw std::out_of_range("moment of order " + std::to_string(alpha) + " was not requested");
}

double density(const Kernel& kernel, double z) {
  switch (kernel.kind()) {
    case KernelKind::Uniform: return std::abs(z) <= 1.0 ? 0.5 : 0.0;
    case KernelKind::Epanechnikov: return std::abs(z) <= 1.0 ? 0.75 * (1.0 - z * z) : 0.0;
    case KernelKind::Gaussian: return std_normal_pdf(z);
  }
  return 0.0;
}

double density(const Kernel& kernel, std::span<const double> z) {
  if (static_cast<Eigen::Index>(z.size()) != kernel.dim()) {
    throw std::invalid_argument("point dimension does not match kernel dimension");
  }
  if (kernel.dim() == 1 && kernel.identity_covariance()) return density(kernel, z[0]);
  // Multivariate normal with covariance A = L L'.
  const Eigen::Map<const Eigen::VectorXd> point(z.data(), static_cast<Eigen::Index>(z.size()));
  const Eigen::VectorXd w = kernel.cholesky().triangularView<Eigen::Lower>().solve(point);
  const double log_det = 2.0 * kernel.cholesky().diagonal().array().log().sum();
  const double m = static_cast<double>(kernel.dim());
  return std::exp(-0.5 * w.squaredNorm() - 0.5 * log_det - 0.5 * m * std::log(2.0 * std::numbers::pi));
}

double kernel_cdf(const Kernel& kernel, double z) {
  switch (kernel.kind()) {
    case KernelKind::Uniform:
      if (z <= -1.0) return 0.0;
      if (z >= 1.0) return 1.0;
      return 0.5 * (z + 1.0);
    case KernelKind::Epanechnikov:
      if (z <= -1.0) return 0.0;
      if (z >= 1.0) return 1.0;
      return 0.5 + 0.75 * z - 0.25 * z * z * z;
    case KernelKind::Gaussian: return std_normal_cdf(z);
  }
  return 0.0;
}

double fractional_moment(const Kernel& kernel, double alpha) {
  check_alpha(alpha);
  if (alpha == 0.0) return 1.0;
  switch (kernel.kind()) {
    case KernelKind::Uniform: return 1.0 / (alpha + 1.0);
    case KernelKind::Epanechnikov: return 3.0 / ((alpha + 1.0) * (alpha + 3.0));
    case KernelKind::Gaussian: break;
  }
  const double m = static_cast<double>(kernel.dim());
  if (kernel.identity_covariance()) {
    // E||Z||^a for a chi distribution with m degrees of freedom.
    return std::exp(0.5 * alpha * std::log(2.0) + std::lgamma(0.5 * (m + alpha)) - std::lgamma(0.5 * m));
  }
  if (alpha == 2.0) return kernel.covariance().trace();
  const Eigen::VectorXd lambdas =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(kernel.covariance(), Eigen::EigenvaluesOnly).eigenvalues();
  if (kernel.dim() == 1) {
    return std::pow(lambdas(0), 0.5 * alpha) * std::exp(0.5 * alpha * std::log(2.0) + std::lgamma(0.5 * (1.0 + alpha)) -
                                                      std::lgamma(0.5));
  }
  return weighted_chisq_power(lambdas, 0.5 * alpha);
}

double second_moment(const Kernel& kernel) { return fractional_moment(kernel, 2.0); }

KernelMoments moments(const Kernel& kernel, std::span<const double> alphas) {
  KernelMoments out;
  out.m2 = second_moment(kernel);
  out.fractional.reserve(alphas.size());
  for (double a : alphas) out.fractional.emplace_back(a, fractional_moment(kernel, a));
  return out;
}

double smoothed_hinge(const Kernel& kernel, double s, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("smoothed_hinge requires a positive bandwidth");
  if (kernel.compact()) {
    // Exact on the affine and zero branches.
    if (s >= h) return s;
    if (s <= -h) return 0.0;
  }
  // The convolution dominates the hinge; the clamp only removes rounding.
  return std::max(h * hinge_profile(kernel, s / h), std::max(0.0, s));
}

double smoothed_hinge_slope(const Kernel& kernel, double s, double h) {
  if (h == 0.0) return s > 0.0 ? 1.0 : 0.0;
  return kernel_cdf(kernel, s / h);
}

double smoothed_hinge_dh(const Kernel& kernel, double s, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("smoothed_hinge_dh requires a positive bandwidth");
  const double t = s / h;
  return hinge_profile(kernel, t) - t * kernel_cdf(kernel, t);
}

double smoothed_square(const Kernel& kernel, double s, double h) {
  if (h == 0.0) return s * s;
  // Unit profile: the second moment of the one-dimensional kernel.
  double m2 = 1.0;
  switch (kernel.kind()) {
    case KernelKind::Uniform: m2 = 1.0 / 3.0; break;
    case KernelKind::Epanechnikov: m2 = 0.2; break;
    case KernelKind::Gaussian: m2 = 1.0; break;
  }
  return s * s + h * h * m2;
}

double sample_kernel(const Kernel& kernel, double u01) {
  if (!(u01 > 0.0 && u01 < 1.0)) throw std::invalid_argument("sample_kernel requires u01 in (0, 1)");
  switch (kernel.kind()) {
    case KernelKind::Uniform: return 2.0 * u01 - 1.0;
    case KernelKind::Epanechnikov:
      // Root in [-1, 1] of 1/2 + 3z/4 - z^3/4 = u.
      return 2.0 * std::sin(std::asin(2.0 * u01 - 1.0) / 3.0);
    case KernelKind::Gaussian: return boost::math::quantile(kStdNormal, u01);
  }
  return 0.0;
}

}  // namespace smoothsaa
