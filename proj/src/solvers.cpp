#include "smoothsaa/solvers.hpp"

#include "smoothsaa/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace smoothsaa {

namespace {

constexpr double kInvPhi = 0.6180339887498948482;

double checked(const std::function<double(double)>& f, double x) {
  const double v = f(x);
  if (!std::isfinite(v)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "non-finite objective at x = " << x;
    throw EvaluationError(msg.str());
  }
  return v;
}

}  // namespace

Minimum1d minimize_convex_1d(const std::function<double(double)>& f, double lo, double hi, double tol) {
  if (!(lo < hi)) throw std::invalid_argument("minimize_convex_1d requires lo < hi");
  if (!(tol > 0.0)) throw std::invalid_argument("minimize_convex_1d requires tol > 0");
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = checked(f, c);
  double fd = checked(f, d);
  int iterations = 2;
  while (b - a > tol && iterations < 400) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = checked(f, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = checked(f, d);
    }
    ++iterations;
  }
  // The final bracket holds a minimizer; return its best probed point.
  const double mid = 0.5 * (a + b);
  const double fm = checked(f, mid);
  ++iterations;
  Minimum1d best{mid, fm, iterations, b - a};
  if (fc < best.value && c >= a && c <= b) best = {c, fc, iterations, b - a};
  if (fd < best.value && d >= a && d <= b) best = {d, fd, iterations, b - a};
  return best;
}

Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& v, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("l1 ball radius must be positive");
  if (v.lpNorm<1>() <= radius) return v;
  std::vector<double> mags(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) mags[static_cast<std::size_t>(i)] = std::abs(v(i));
  std::sort(mags.begin(), mags.end(), std::greater<>());
  // Soft-threshold level: largest k with mags[k] > (sum_{j<=k} mags[j] - radius) / (k + 1).
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < mags.size(); ++k) {
    cumulative += mags[k];
    const double candidate = (cumulative - radius) / static_cast<double>(k + 1);
    if (mags[k] > candidate) theta = candidate;
  }
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double m = std::max(std::abs(v(i)) - theta, 0.0);
    out(i) = v(i) < 0.0 ? -m : m;
  }
  return out;
}

Eigen::VectorXd project_box_simplex(const Eigen::VectorXd& u, double capital, const Eigen::VectorXd& lower,
                                    const Eigen::VectorXd& upper) {
  const Eigen::Index m = u.size();
  if (lower.size() != m || upper.size() != m) throw std::invalid_argument("bound dimensions do not match");
  if ((lower.array() > upper.array()).any()) throw std::invalid_argument("lower bound exceeds upper bound");
  const double lo_sum = lower.sum();
  const double hi_sum = upper.sum();
  const double slack = 1e-12 * std::max({1.0, std::abs(capital), std::abs(lo_sum), std::abs(hi_sum)});
  if (capital < lo_sum - slack) {
    throw std::invalid_argument("infeasible allocation: sum of lower bounds exceeds capital");
  }
  if (capital > hi_sum + slack) {
    throw std::invalid_argument("infeasible allocation: capital exceeds sum of upper bounds");
  }

  auto allocate = [&](double tau) {
    return Eigen::VectorXd((u.array() - tau).max(lower.array()).min(upper.array()));
  };
  // S(tau) = sum clamp(u - tau) is non-increasing and linear between breakpoints.
  std::vector<double> knots;
  knots.reserve(static_cast<std::size_t>(2 * m));
  for (Eigen::Index i = 0; i < m; ++i) {
    knots.push_back(u(i) - upper(i));
    knots.push_back(u(i) - lower(i));
  }
  std::sort(knots.begin(), knots.end());
  double tau = knots.front();
  if (allocate(knots.front()).sum() <= capital) {
    tau = knots.front();
  } else if (allocate(knots.back()).sum() >= capital) {
    tau = knots.back();
  } else {
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
      const double s0 = allocate(knots[k]).sum();
      const double s1 = allocate(knots[k + 1]).sum();
      if (s0 >= capital && s1 <= capital) {
        tau = s0 == s1 ? knots[k] : knots[k] + (s0 - capital) * (knots[k + 1] - knots[k]) / (s0 - s1);
        break;
      }
    }
  }
  Eigen::VectorXd x = allocate(tau);
  // Push the rounding residual onto coordinates strictly inside their box.
  const double residual = capital - x.sum();
  if (residual != 0.0) {
    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (x(i) > lower(i) && x(i) < upper(i)) free.push_back(i);
    }
    if (!free.empty()) {
      const double share = residual / static_cast<double>(free.size());
      for (Eigen::Index i : free) x(i) = std::clamp(x(i) + share, lower(i), upper(i));
    }
  }
  return x;
}

SolveReport projected_subgradient(const SubgradientOracle& oracle, const Projection& project, Eigen::VectorXd x0,
                                  const SubgradientOptions& options) {
  SolveReport report;
  report.strategy = "projected-subgradient";
  Eigen::VectorXd x = project(x0);
  Eigen::VectorXd grad(x.size());
  report.minimizer = x;
  report.value = std::numeric_limits<double>::infinity();
  double window_start_best = report.value;
  for (int k = 0; k < options.max_iterations; ++k) {
    grad.setZero();
    const double value = oracle(x, grad);
    if (!std::isfinite(value) || !grad.allFinite()) {
      throw EvaluationError("projected subgradient diverged at iteration " + std::to_string(k));
    }
    report.iterations = k + 1;
    if (value < report.value) {
      report.value = value;
      report.minimizer = x;
    }
    if (grad.squaredNorm() == 0.0) {
      report.converged = true;
      report.tolerance_achieved = 0.0;
      break;
    }
    if ((k + 1) % options.stall_window == 0) {
      const double improvement = window_start_best - report.value;
      report.tolerance_achieved = improvement;
      if (std::isfinite(improvement) && improvement < options.stall_tolerance) {
        report.converged = true;
        break;
      }
      window_start_best = report.value;
    }
    x = project(x - options.step.at(k) * grad);
  }
  return report;
}

SolveReport sphere_search_2d(const SphereObjective& objective, const SphereSearchOptions& options) {
  if (options.angles < 4 || options.gammas < 2) throw std::invalid_argument("sphere search grid too coarse");
  if (!(options.gamma_bound > 0.0)) throw std::invalid_argument("gamma bound must be positive");
  const double c = options.gamma_bound;
  int evaluations = 0;
  auto eval = [&](double phi, double gamma) {
    ++evaluations;
    const double v = objective(Eigen::Vector2d(std::cos(phi), std::sin(phi)), gamma);
    if (!std::isfinite(v)) throw EvaluationError("non-finite SVM objective in sphere search");
    return v;
  };

  double best_phi = 0.0;
  double best_gamma = -c;
  double best = std::numeric_limits<double>::infinity();
  const double dphi0 = 2.0 * std::numbers::pi / options.angles;
  const double dgamma0 = 2.0 * c / (options.gammas - 1);
  for (int i = 0; i < options.angles; ++i) {
    for (int j = 0; j < options.gammas; ++j) {
      const double phi = i * dphi0;
      const double gamma = -c + j * dgamma0;
      const double v = eval(phi, gamma);
      if (v < best) {
        best = v;
        best_phi = phi;
        best_gamma = gamma;
      }
    }
  }

  // Compass search around the best grid cell.
  double dphi = dphi0;
  double dgamma = dgamma0;
  int rounds = 0;
  const int budget = evaluations + 200000;
  while (rounds < options.refine_rounds && (dphi > 1e-12 || dgamma > 1e-12) && evaluations < budget) {
    bool moved = false;
    for (const auto& [sp, sg] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}}) {
      const double phi = best_phi + sp * dphi;
      const double gamma = std::clamp(best_gamma + sg * dgamma, -c, c);
      const double v = eval(phi, gamma);
      if (v < best) {
        best = v;
        best_phi = phi;
        best_gamma = gamma;
        moved = true;
      }
    }
    if (!moved) {
      dphi *= 0.5;
      dgamma *= 0.5;
      ++rounds;
    }
  }

  SolveReport report;
  report.value = best;
  report.minimizer = Eigen::Vector3d(std::cos(best_phi), std::sin(best_phi), best_gamma);
  report.iterations = evaluations;
  report.strategy = "sphere-search";
  report.converged = true;
  report.tolerance_achieved = std::max(dphi, dgamma);
  return report;
}

}  // namespace smoothsaa
