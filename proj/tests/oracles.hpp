#pragma once

// Reference computations for the unit tests. They deliberately avoid the
// library's own quadrature and solvers.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

namespace oracle {

/// Integral of f over [a, b] split at the given interior points: tanh-sinh on
/// finite pieces, adaptive Gauss-Kronrod on infinite ones.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        std::vector<double> splits = {}) {
  std::vector<double> cuts{a};
  std::sort(splits.begin(), splits.end());
  for (double s : splits) {
    if (s > a && s < b) cuts.push_back(s);
  }
  cuts.push_back(b);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (std::isfinite(cuts[i]) && std::isfinite(cuts[i + 1])) {
      static boost::math::quadrature::tanh_sinh<double> rule;
      total += rule.integrate([&f](double x) { return f(x); }, cuts[i], cuts[i + 1], 1e-14);
    } else {
      total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, cuts[i], cuts[i + 1], 12, 1e-14);
    }
  }
  return total;
}

inline double uniform_pdf(double z) { return std::abs(z) <= 1.0 ? 0.5 : 0.0; }
inline double epanechnikov_pdf(double z) { return std::abs(z) <= 1.0 ? 0.75 * (1.0 - z * z) : 0.0; }
inline double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

/// int g(z) K(z) dz for one of the three unit profiles (0 uniform, 1 epanechnikov, 2 gaussian).
inline double against_profile(int kind, const std::function<double(double)>& g, std::vector<double> splits = {}) {
  splits.push_back(0.0);
  if (kind == 0) return integrate([&](double z) { return g(z) * 0.5; }, -1.0, 1.0, splits);
  if (kind == 1) return integrate([&](double z) { return g(z) * 0.75 * (1.0 - z * z); }, -1.0, 1.0, splits);
  // The standard normal density is below 1e-300 beyond |z| = 40.
  return integrate([&](double z) { return g(z) * normal_pdf(z); }, -40.0, 40.0, splits);
}

/// Brute-force SAA AVaR: objective at every sample point, smallest value.
inline double saa_avar(const std::vector<double>& x, double alpha, double* argmin = nullptr) {
  double best = std::numeric_limits<double>::infinity();
  double best_z = 0.0;
  for (double z : x) {
    double tail = 0.0;
    for (double v : x) tail += std::max(0.0, v - z);
    const double value = z + tail / (static_cast<double>(x.size()) * alpha);
    if (value < best || (value == best && z < best_z)) {
      best = value;
      best_z = z;
    }
  }
  if (argmin) *argmin = best_z;
  return best;
}

/// Minimum of f on a uniform grid of [lo, hi] refined twice around the best point.
inline double grid_min_1d(const std::function<double(double)>& f, double lo, double hi, int points = 20001) {
  double best = std::numeric_limits<double>::infinity();
  double a = lo;
  double b = hi;
  for (int round = 0; round < 4; ++round) {
    const double step = (b - a) / (points - 1);
    double best_x = a;
    for (int i = 0; i < points; ++i) {
      const double x = a + i * step;
      const double v = f(x);
      if (v < best) {
        best = v;
        best_x = x;
      }
    }
    a = best_x - 2 * step;
    b = best_x + 2 * step;
  }
  return best;
}

/// Projection onto {sum x = c, l <= x <= u} by bisection on the multiplier.
inline Eigen::VectorXd box_simplex_bisection(const Eigen::VectorXd& y, double c, const Eigen::VectorXd& l,
                                             const Eigen::VectorXd& u) {
  double lo = (y - u).minCoeff() - 1.0;
  double hi = (y - l).maxCoeff() + 1.0;
  auto sum_at = [&](double tau) { return (y.array() - tau).max(l.array()).min(u.array()).sum(); };
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (sum_at(mid) > c) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double tau = 0.5 * (lo + hi);
  return (y.array() - tau).max(l.array()).min(u.array()).matrix();
}

/// Soft-threshold projection onto the l1 ball via bisection on the threshold.
inline Eigen::VectorXd l1_ball_bisection(const Eigen::VectorXd& v, double t) {
  if (v.lpNorm<1>() <= t) return v;
  double lo = 0.0;
  double hi = v.cwiseAbs().maxCoeff();
  auto shrink = [&](double theta) {
    return Eigen::VectorXd((v.cwiseAbs().array() - theta).max(0.0) * v.array().sign());
  };
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (shrink(mid).lpNorm<1>() > t) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return shrink(0.5 * (lo + hi));
}

/// Central finite difference of f along coordinate i.
inline double central_difference(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x,
                                 Eigen::Index i, double step) {
  const double x0 = x(i);
  x(i) = x0 + step;
  const double fp = f(x);
  x(i) = x0 - step;
  const double fm = f(x);
  return (fp - fm) / (2.0 * step);
}

}  // namespace oracle
