#pragma once

#include "smoothsaa/kernel.hpp"
#include "smoothsaa/sample.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace smoothsaa {

/// Tolerance used throughout for "values are equal".
inline constexpr double kValueTolerance = 1e-9;

struct AutoStrategy {};
struct AnalyticStrategy {};
struct QuadratureStrategy {
  int nodes = 64;
};
/// Antithetic Monte Carlo: draws/2 kernel draws z, each used as +z and -z.
struct MonteCarloStrategy {
  int draws = 4096;
  std::uint64_t seed = 0x5a5a5a5aULL;
};
using Strategy = std::variant<AutoStrategy, AnalyticStrategy, QuadratureStrategy, MonteCarloStrategy>;

std::string strategy_label(const Strategy& strategy);

/// Kernel, bandwidth and evaluation strategy. h == 0 means plain SAA.
class SmoothingPlan {
 public:
  SmoothingPlan(Kernel kernel, double h, Strategy strategy = AutoStrategy{});
  static SmoothingPlan saa();

  const Kernel& kernel() const { return kernel_; }
  double h() const { return h_; }
  const Strategy& strategy() const { return strategy_; }
  bool is_saa() const { return h_ == 0.0; }

  SmoothingPlan with_bandwidth(double h) const { return {kernel_, h, strategy_}; }

 private:
  Kernel kernel_;
  double h_;
  Strategy strategy_;
};

/// Modulus of continuity w(t) = sum_j L_j t^alpha_j.
struct ModulusTerm {
  double coefficient;
  double exponent;
};

class ModulusSpec {
 public:
  /// Requires at least one term, coefficients > 0 and exponents in (0, 2].
  explicit ModulusSpec(std::vector<ModulusTerm> terms);
  static ModulusSpec linear(double coefficient) { return ModulusSpec({{coefficient, 1.0}}); }

  const std::vector<ModulusTerm>& terms() const { return terms_; }
  double operator()(double t) const;

 private:
  std::vector<ModulusTerm> terms_;
};

class Problem;
struct SolveReport;

/**
 * Objective F(u, x) together with the pieces smoothing needs.
 *
 * The columns of a sample row starting at smoothed_offset() are the data the
 * kernel perturbs; leading columns (class labels) are carried along
 * unchanged.
 */
class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::string name() const = 0;
  virtual Eigen::Index decision_dim() const = 0;
  virtual Eigen::Index data_dim() const = 0;
  virtual Eigen::Index smoothed_offset() const { return 0; }
  Eigen::Index smoothed_dim() const { return data_dim() - smoothed_offset(); }

  virtual double loss(const Eigen::VectorXd& u, std::span<const double> x) const = 0;
  /// g += weight * (a subgradient of F(., x) at u).
  virtual void add_subgradient(const Eigen::VectorXd& u, std::span<const double> x, double weight,
                               Eigen::VectorXd& g) const = 0;

  /// Whether a closed-form convolution exists for this kernel.
  virtual bool has_analytic(const Kernel& kernel) const = 0;
  /// Closed form of int F(u, x + h z) K(z) dz; h > 0.
  virtual double smoothed_loss(const Eigen::VectorXd& u, std::span<const double> x, const Kernel& kernel,
                               double h) const;
  virtual void add_smoothed_subgradient(const Eigen::VectorXd& u, std::span<const double> x, const Kernel& kernel,
                                        double h, double weight, Eigen::VectorXd& g) const;

  /// Points of the (one-dimensional) smoothed coordinate where F(u, .) has kinks.
  virtual std::vector<double> kinks(const Eigen::VectorXd& /*u*/) const { return {}; }

  /// Modulus of continuity of F(u, .) uniform over the feasible set.
  virtual ModulusSpec modulus(const Sample& sample) const = 0;
  virtual bool convex_in_data() const { return true; }

  /// Minimizes the (smoothed) empirical objective.
  virtual SolveReport solve(const Sample& sample, const SmoothingPlan& plan) const = 0;
};

/// Strategy actually used for (problem, plan): Analytic when registered, else
/// Quadrature for one-dimensional data, else Monte Carlo.
Strategy resolve_strategy(const Problem& problem, const SmoothingPlan& plan);

/// (1/N) sum_i int F(u, X_i + h z) K(z) dz. Throws EvaluationError when the
/// result is not finite.
double smooth_objective_value(const Problem& problem, const Eigen::VectorXd& u, const Sample& sample,
                              const SmoothingPlan& plan);

/// (1/N) sum_i F(u, X_i).
double saa_objective_value(const Problem& problem, const Eigen::VectorXd& u, const Sample& sample);

/// Subgradient in u of smooth_objective_value.
Eigen::VectorXd smooth_subgradient(const Problem& problem, const Eigen::VectorXd& u, const Sample& sample,
                                   const SmoothingPlan& plan);

/// L and alpha with E[theta_K] - theta <= L h^alpha and
/// theta_SAA <= theta_K <= theta_SAA + L h^alpha (convex case).
struct BiasBound {
  double constant;
  double exponent;
  double at(double h) const;
};

/// alpha = min_j alpha_j, L = sum_j L_j mbar_{alpha_j}(K). Requires 0 < h < 1.
BiasBound bias_bound_constant(const ModulusSpec& modulus, const Kernel& kernel, double h);

/// int w(h ||z||) K(z) dz = sum_j L_j h^alpha_j mbar_{alpha_j}(K), valid for any h >= 0.
double modulus_integral(const ModulusSpec& modulus, const Kernel& kernel, double h);

}  // namespace smoothsaa
