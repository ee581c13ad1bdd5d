#pragma once

#include <Eigen/Dense>

#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace smoothsaa {

enum class KernelKind { Uniform, Epanechnikov, Gaussian };

/**
 * Unit-bandwidth symmetric smoothing kernel.
 *
 * Uniform and Epanechnikov kernels are one-dimensional with support [-1, 1].
 * The Gaussian kernel is the standard normal density in one dimension, or a
 * zero-mean normal density with covariance A in m dimensions (identity when
 * no covariance is given).
 *
 * The bandwidth is never part of the kernel; every smoothing routine takes it
 * as a separate argument and evaluates the kernel at z = (x - X_i) / h.
 */
class Kernel {
 public:
  static Kernel uniform();
  static Kernel epanechnikov();
  static Kernel gaussian(Eigen::Index dim = 1);
  /// Throws std::invalid_argument unless `covariance` is symmetric positive definite.
  static Kernel gaussian(const Eigen::MatrixXd& covariance);

  KernelKind kind() const { return kind_; }
  Eigen::Index dim() const { return cov_.rows(); }
  bool compact() const { return kind_ != KernelKind::Gaussian; }
  bool identity_covariance() const { return identity_; }
  const Eigen::MatrixXd& covariance() const { return cov_; }
  /// Lower Cholesky factor of the covariance.
  const Eigen::MatrixXd& cholesky() const { return chol_; }
  std::string_view name() const;

  /// Standard deviation multiplier of <v, Z> for Z ~ K: sqrt(v' A v).
  double projected_scale(const Eigen::VectorXd& v) const;

  friend bool operator==(const Kernel& a, const Kernel& b) {
    return a.kind_ == b.kind_ && a.cov_ == b.cov_;
  }

 private:
  Kernel(KernelKind kind, Eigen::MatrixXd cov, bool identity);

  KernelKind kind_;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd chol_;
  bool identity_ = true;
};

/// Parses "uniform", "epanechnikov" or "gaussian" (one-dimensional).
Kernel kernel_from_name(std::string_view name);

struct KernelMoments {
  double m2 = 0.0;
  /// (alpha, E||Z||^alpha) pairs in request order.
  std::vector<std::pair<double, double>> fractional;

  double at(double alpha) const;
};

/// K(z); zero outside the support of compact kernels.
double density(const Kernel& kernel, std::span<const double> z);
double density(const Kernel& kernel, double z);

/// CDF of the one-dimensional unit profile.
double kernel_cdf(const Kernel& kernel, double z);

/// E||Z||^alpha for alpha in [0, 2]; throws std::invalid_argument otherwise.
double fractional_moment(const Kernel& kernel, double alpha);
/// E||Z||^2.
double second_moment(const Kernel& kernel);
KernelMoments moments(const Kernel& kernel, std::span<const double> alphas);

// Scalar convolutions. These act on the one-dimensional unit profile of the
// kernel; callers smoothing a projection <v, x> pass h * projected_scale(v).

/// Integral of max{0, s + h z} K(z) dz. Requires h > 0.
double smoothed_hinge(const Kernel& kernel, double s, double h);
/// d/ds of smoothed_hinge; the plain hinge slope (0 at the kink) when h == 0.
double smoothed_hinge_slope(const Kernel& kernel, double s, double h);
/// d/dh of smoothed_hinge for h > 0.
double smoothed_hinge_dh(const Kernel& kernel, double s, double h);

/// Integral of (s + h z)^2 K(z) dz = s^2 + h^2 m2; h == 0 allowed.
double smoothed_square(const Kernel& kernel, double s, double h);

/// Inverse-CDF draw from the one-dimensional profile. Requires u01 in (0, 1).
double sample_kernel(const Kernel& kernel, double u01);

}  // namespace smoothsaa
