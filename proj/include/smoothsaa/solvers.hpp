#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>

namespace smoothsaa {

/// Optimal value and minimizer of one (SAA or smoothed) empirical problem.
struct SolveReport {
  double value = 0.0;
  Eigen::VectorXd minimizer;
  int iterations = 0;
  std::string strategy;
  bool converged = false;
  double tolerance_achieved = 0.0;
};

struct Minimum1d {
  double x;
  double value;
  int iterations;
  double bracket_width;
};

/// Golden-section search for a convex f on [lo, hi]; stops when the bracket
/// is narrower than tol. Throws EvaluationError at a non-finite f(x).
Minimum1d minimize_convex_1d(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-9);

/// Euclidean projection onto {x : ||x||_1 <= radius}.
Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& v, double radius);

/// Euclidean projection onto {x : sum x = capital, lower <= x <= upper}.
/// Throws std::invalid_argument when the set is empty.
Eigen::VectorXd project_box_simplex(const Eigen::VectorXd& u, double capital, const Eigen::VectorXd& lower,
                                    const Eigen::VectorXd& upper);

/// Step size a / (k + b) at iteration k, or the constant a when `constant` is set.
struct StepRule {
  double a = 1.0;
  double b = 10.0;
  bool constant = false;

  double at(int k) const { return constant ? a : a / (k + b); }
};

struct SubgradientOptions {
  StepRule step;
  int max_iterations = 5000;
  /// Stop once the best value improved by less than this over `stall_window` iterations.
  double stall_tolerance = 1e-10;
  int stall_window = 250;
};

/// Value and subgradient at x; the oracle writes the subgradient into `grad`.
using SubgradientOracle = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;
using Projection = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Projected subgradient iteration returning the best iterate seen.
SolveReport projected_subgradient(const SubgradientOracle& oracle, const Projection& project, Eigen::VectorXd x0,
                                  const SubgradientOptions& options = {});

struct SphereSearchOptions {
  int angles = 720;
  int gammas = 201;
  /// gamma is searched in [-gamma_bound, gamma_bound].
  double gamma_bound = 1.0;
  int refine_rounds = 60;
};

/// Objective of (v, gamma) for ||v|| = 1 in two dimensions.
using SphereObjective = std::function<double(const Eigen::Vector2d& v, double gamma)>;

/// Exhaustive grid over v = (cos phi, sin phi) and gamma, followed by local
/// refinement of the best cell. The minimizer is returned as (v1, v2, gamma).
SolveReport sphere_search_2d(const SphereObjective& objective, const SphereSearchOptions& options);

}  // namespace smoothsaa
