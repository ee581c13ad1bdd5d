#include "smoothsaa/smoothing.hpp"

#include "smoothsaa/errors.hpp"
#include "smoothsaa/quadrature.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace smoothsaa {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double uniform_open01(std::mt19937_64& rng) {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Kernel perturbations for the Monte Carlo strategy, one row per base draw.
Eigen::MatrixXd monte_carlo_draws(const Kernel& kernel, Eigen::Index dim, const MonteCarloStrategy& mc) {
  if (mc.draws < 2) throw std::invalid_argument("Monte Carlo strategy needs at least 2 draws");
  if (kernel.kind() == KernelKind::Gaussian && kernel.dim() != 1 && kernel.dim() != dim) {
    throw std::invalid_argument("Gaussian kernel dimension does not match the smoothed data");
  }
  std::mt19937_64 rng(mc.seed);
  const Eigen::Index base = mc.draws / 2;
  Eigen::MatrixXd draws(base, dim);
  for (Eigen::Index d = 0; d < base; ++d) {
    for (Eigen::Index j = 0; j < dim; ++j) draws(d, j) = sample_kernel(kernel, uniform_open01(rng));
  }
  if (kernel.kind() == KernelKind::Gaussian && kernel.dim() == dim && !kernel.identity_covariance()) {
    draws = draws * kernel.cholesky().transpose();
  }
  return draws;
}

void check_dims(const Problem& problem, const Eigen::VectorXd& u, const Sample& sample) {
  if (u.size() != problem.decision_dim()) throw std::invalid_argument("decision dimension mismatch");
  if (sample.dim() != problem.data_dim()) throw std::invalid_argument("sample dimension mismatch");
}

void check_finite(double value, const Problem& problem) {
  if (!std::isfinite(value)) {
    throw EvaluationError("non-finite smoothed objective for problem '" + problem.name() + "'");
  }
}

// Shared walk over rows for value and subgradient evaluation.
// `point_fn(x, weight)` is called for every perturbed point x with its
// integration weight; `analytic_fn(x)` for closed-form evaluation.
template <class PointFn, class AnalyticFn>
void for_each_smoothed_point(const Problem& problem, const Eigen::VectorXd& u, const Sample& sample,
                             const SmoothingPlan& plan, PointFn&& point_fn, AnalyticFn&& analytic_fn) {
  const Strategy strategy = resolve_strategy(problem, plan);
  const Eigen::Index offset = problem.smoothed_offset();
  const Eigen::Index sdim = problem.smoothed_dim();
  const double h = plan.h();
  std::vector<double> buffer(static_cast<std::size_t>(sample.dim()));

  std::visit(
      Overloaded{
          [&](const AnalyticStrategy&) {
            for (Eigen::Index i = 0; i < sample.size(); ++i) analytic_fn(sample.row(i));
          },
          [&](const QuadratureStrategy& q) {
            if (sdim != 1 || plan.kernel().dim() != 1) {
              throw std::invalid_argument("quadrature strategy requires one-dimensional smoothed data");
            }
            const auto kinks = problem.kinks(u);
            // Standard deviation of a one-dimensional Gaussian with non-unit variance.
            const double step = h * plan.kernel().cholesky()(0, 0);
            std::vector<double> breaks(kinks.size());
            for (Eigen::Index i = 0; i < sample.size(); ++i) {
              const auto row = sample.row(i);
              std::copy(row.begin(), row.end(), buffer.begin());
              const double base = row[static_cast<std::size_t>(offset)];
              for (std::size_t k = 0; k < kinks.size(); ++k) breaks[k] = (kinks[k] - base) / step;
              for (const auto& node : split_quadrature_nodes(plan.kernel(), q.nodes, breaks)) {
                buffer[static_cast<std::size_t>(offset)] = base + step * node.node;
                point_fn(std::span<const double>(buffer), node.weight);
              }
            }
          },
          [&](const MonteCarloStrategy& mc) {
            const Eigen::MatrixXd draws = monte_carlo_draws(plan.kernel(), sdim, mc);
            const double w = 0.5 / static_cast<double>(draws.rows());
            for (Eigen::Index i = 0; i < sample.size(); ++i) {
              const auto row = sample.row(i);
              for (Eigen::Index d = 0; d < draws.rows(); ++d) {
                for (double sign : {1.0, -1.0}) {
                  std::copy(row.begin(), row.end(), buffer.begin());
                  for (Eigen::Index j = 0; j < sdim; ++j) {
                    buffer[static_cast<std::size_t>(offset + j)] += sign * h * draws(d, j);
                  }
                  point_fn(std::span<const double>(buffer), w);
                }
              }
            }
          },
          [&](const AutoStrategy&) { throw std::logic_error("unresolved smoothing strategy"); },
      },
      strategy);
}

}  // namespace

std::string strategy_label(const Strategy& strategy) {
  return std::visit(Overloaded{
                        [](const AutoStrategy&) { return std::string("auto"); },
                        [](const AnalyticStrategy&) { return std::string("analytic"); },
                        [](const QuadratureStrategy& q) { return "quadrature(" + std::to_string(q.nodes) + ")"; },
                        [](const MonteCarloStrategy& m) {
                          return "montecarlo(" + std::to_string(m.draws) + "," + std::to_string(m.seed) + ")";
                        },
                    },
                    strategy);
}

SmoothingPlan::SmoothingPlan(Kernel kernel, double h, Strategy strategy)
    : kernel_(std::move(kernel)), h_(h), strategy_(strategy) {
  if (!(h >= 0.0) || !std::isfinite(h)) throw std::invalid_argument("bandwidth must be finite and non-negative");
}

SmoothingPlan SmoothingPlan::saa() { return {Kernel::uniform(), 0.0, AnalyticStrategy{}}; }

ModulusSpec::ModulusSpec(std::vector<ModulusTerm> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw std::invalid_argument("modulus needs at least one term");
  for (const auto& t : terms_) {
    if (!(t.coefficient > 0.0) || !std::isfinite(t.coefficient)) {
      throw std::invalid_argument("modulus coefficients must be positive");
    }
    if (!(t.exponent > 0.0 && t.exponent <= 2.0)) throw std::invalid_argument("modulus exponents must lie in (0, 2]");
  }
}

double ModulusSpec::operator()(double t) const {
  double acc = 0.0;
  for (const auto& term : terms_) acc += term.coefficient * std::pow(t, term.exponent);
  return acc;
}

double Problem::smoothed_loss(const Eigen::VectorXd&, std::span<const double>, const Kernel& kernel, double) const {
  throw std::logic_error("no closed-form convolution of '" + name() + "' for kernel " + std::string(kernel.name()));
}

void Problem::add_smoothed_subgradient(const Eigen::VectorXd&, std::span<const double>, const Kernel& kernel, double,
                                       double, Eigen::VectorXd&) const {
  throw std::logic_error("no closed-form convolution of '" + name() + "' for kernel " + std::string(kernel.name()));
}

Strategy resolve_strategy(const Problem& problem, const SmoothingPlan& plan) {
  if (plan.is_saa()) return AnalyticStrategy{};
  if (!std::holds_alternative<AutoStrategy>(plan.strategy())) {
    if (std::holds_alternative<AnalyticStrategy>(plan.strategy()) && !problem.has_analytic(plan.kernel())) {
      throw std::invalid_argument("no closed-form convolution of '" + problem.name() + "' for kernel " +
                                  std::string(plan.kernel().name()));
    }
    return plan.strategy();
  }
  if (problem.has_analytic(plan.kernel())) return AnalyticStrategy{};
  if (problem.smoothed_dim() == 1 && plan.kernel().dim() == 1) return QuadratureStrategy{};
  return MonteCarloStrategy{};
}

double saa_objective_value(const Problem& problem, const Eigen::VectorXd& u, const Sample& sample) {
  check_dims(problem, u, sample);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < sample.size(); ++i) acc += problem.loss(u, sample.row(i));
  const double value = acc / static_cast<double>(sample.size());
  check_finite(value, problem);
  return value;
}

double smooth_objective_value(const Problem& problem, const Eigen::VectorXd& u, const Sample& sample,
                              const SmoothingPlan& plan) {
  if (plan.is_saa()) return saa_objective_value(problem, u, sample);
  check_dims(problem, u, sample);
  double acc = 0.0;
  for_each_smoothed_point(
      problem, u, sample, plan, [&](std::span<const double> x, double w) { acc += w * problem.loss(u, x); },
      [&](std::span<const double> x) { acc += problem.smoothed_loss(u, x, plan.kernel(), plan.h()); });
  const double value = acc / static_cast<double>(sample.size());
  check_finite(value, problem);
  return value;
}

Eigen::VectorXd smooth_subgradient(const Problem& problem, const Eigen::VectorXd& u, const Sample& sample,
                                   const SmoothingPlan& plan) {
  check_dims(problem, u, sample);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(u.size());
  const double inv_n = 1.0 / static_cast<double>(sample.size());
  if (plan.is_saa()) {
    for (Eigen::Index i = 0; i < sample.size(); ++i) problem.add_subgradient(u, sample.row(i), inv_n, g);
  } else {
    for_each_smoothed_point(
        problem, u, sample, plan,
        [&](std::span<const double> x, double w) { problem.add_subgradient(u, x, w * inv_n, g); },
        [&](std::span<const double> x) {
          problem.add_smoothed_subgradient(u, x, plan.kernel(), plan.h(), inv_n, g);
        });
  }
  if (!g.allFinite()) throw EvaluationError("non-finite subgradient for problem '" + problem.name() + "'");
  return g;
}

double BiasBound::at(double h) const { return constant * std::pow(h, exponent); }

BiasBound bias_bound_constant(const ModulusSpec& modulus, const Kernel& kernel, double h) {
  if (!(h > 0.0 && h < 1.0)) {
    throw std::invalid_argument("bias bound is only established for bandwidths in (0, 1)");
  }
  BiasBound out{0.0, 2.0};
  for (const auto& term : modulus.terms()) {
    out.constant += term.coefficient * fractional_moment(kernel, term.exponent);
    out.exponent = std::min(out.exponent, term.exponent);
  }
  return out;
}

double modulus_integral(const ModulusSpec& modulus, const Kernel& kernel, double h) {
  if (!(h >= 0.0)) throw std::invalid_argument("bandwidth must be non-negative");
  double acc = 0.0;
  for (const auto& term : modulus.terms()) {
    acc += term.coefficient * std::pow(h, term.exponent) * fractional_moment(kernel, term.exponent);
  }
  return acc;
}

}  // namespace smoothsaa
