#include "oracles.hpp"

#include "smoothsaa/errors.hpp"
#include "smoothsaa/problems/avar.hpp"
#include "smoothsaa/problems/lasso.hpp"
#include "smoothsaa/problems/portfolio.hpp"
#include "smoothsaa/problems/quadratic_location.hpp"
#include "smoothsaa/problems/svm.hpp"
#include "smoothsaa/solvers.hpp"

#include <doctest.h>

#include <random>

using namespace smoothsaa;

namespace {

Sample random_sample(std::mt19937_64& rng, int n, int dim, double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  RowMatrix m(n, dim);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return Sample(m);
}

Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

// min over ||beta||_1 <= t of sum (y - <beta, x>)^2 + N h^2 beta~' beta~ by a refined
// grid on [-t, t]^2 whose points are pulled into the ball.
double lasso_grid_oracle(const Sample& sample, double t, double h) {
  const RowMatrix& d = sample.matrix();
  auto value = [&](const Eigen::Vector2d& beta) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
      const double r = d(i, 0) - beta(0) * d(i, 1) - beta(1) * d(i, 2);
      acc += r * r;
    }
    return acc + static_cast<double>(d.rows()) * h * h * (1.0 + beta.squaredNorm());
  };
  Eigen::Vector2d center(0.0, 0.0);
  double half = t;
  double best = std::numeric_limits<double>::infinity();
  for (int round = 0; round < 5; ++round) {
    const int points = 121;
    Eigen::Vector2d best_point = center;
    for (int i = 0; i < points; ++i) {
      for (int j = 0; j < points; ++j) {
        Eigen::Vector2d p(center(0) - half + 2.0 * half * i / (points - 1),
                          center(1) - half + 2.0 * half * j / (points - 1));
        p = oracle::l1_ball_bisection(p, t);
        const double v = value(p);
        if (v < best) {
          best = v;
          best_point = p;
        }
      }
    }
    center = best_point;
    half *= 0.1;
  }
  return best;
}

}  // namespace

TEST_CASE("golden section on convex functions") {
  const auto quad = minimize_convex_1d([](double x) { return (x - 2.0) * (x - 2.0); }, 0.0, 5.0, 1e-9);
  CHECK(std::abs(quad.x - 2.0) <= 1e-9);
  CHECK(quad.bracket_width <= 1e-9);

  const auto kink = minimize_convex_1d([](double x) { return std::abs(x); }, -1.0, 1.0, 1e-9);
  CHECK(std::abs(kink.x) <= 1e-9);

  const auto edge = minimize_convex_1d([](double x) { return x; }, -3.0, 4.0, 1e-9);
  CHECK(std::abs(edge.x + 3.0) <= 1e-9);

  CHECK_THROWS_AS(minimize_convex_1d([](double) { return std::nan(""); }, 0.0, 1.0), EvaluationError);
  CHECK_THROWS_AS(minimize_convex_1d([](double x) { return x; }, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("golden section on piecewise quadratics with known minimizers") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ud(-5.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double m = ud(rng);
    const double left = 0.5 + std::abs(ud(rng));
    const double right = 0.5 + std::abs(ud(rng));
    const auto f = [&](double x) { return x < m ? left * (x - m) * (x - m) : right * (x - m) * (x - m) + (x - m); };
    const auto r = minimize_convex_1d(f, -6.0, 6.0, 1e-9);
    CHECK(std::abs(r.x - m) <= 1e-9);
  }
}

TEST_CASE("golden section finds the smoothed AVaR minimizer") {
  const Sample sample = Sample::scalar({1.0, 2.0, 3.0, 4.0, 5.0});
  const AvarProblem problem(0.2);
  const SmoothingPlan plan(Kernel::uniform(), 0.5);
  const auto f = [&](double z) {
    return smooth_objective_value(problem, Eigen::VectorXd::Constant(1, z), sample, plan);
  };
  const auto r = minimize_convex_1d(f, 0.5, 5.5, 1e-9);
  // f is quadratic with unit curvature at the minimum, so values only resolve z to about sqrt(eps f).
  CHECK(std::abs(r.x - 4.5) <= 1e-7);
  CHECK(r.value == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("l1 ball projection") {
  CHECK(project_l1_ball(Eigen::Vector2d(3.0, 0.0), 1.0).isApprox(Eigen::Vector2d(1.0, 0.0), 1e-15));
  CHECK((project_l1_ball(Eigen::Vector2d(1.0, 1.0), 1.0) - Eigen::Vector2d(0.5, 0.5)).norm() <= 1e-15);
  CHECK(project_l1_ball(Eigen::Vector2d(0.2, -0.1), 1.0) == Eigen::Vector2d(0.2, -0.1));
  CHECK_THROWS_AS(project_l1_ball(Eigen::Vector2d(1.0, 1.0), 0.0), std::invalid_argument);

  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::VectorXd v = random_vector(rng, 1 + trial % 7, 2.0);
    const double t = 0.1 + (trial % 5) * 0.7;
    const Eigen::VectorXd p = project_l1_ball(v, t);
    CHECK(p.lpNorm<1>() <= t * (1.0 + 1e-12));
    CHECK((project_l1_ball(p, t) - p).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK((p - oracle::l1_ball_bisection(v, t)).lpNorm<Eigen::Infinity>() <= 1e-10);
  }
}

TEST_CASE("box simplex projection") {
  const Eigen::Vector2d lo(0.0, 0.0);
  const Eigen::Vector2d hi(1.0, 1.0);
  CHECK((project_box_simplex(Eigen::Vector2d(0.3, 0.7), 1.0, lo, hi) - Eigen::Vector2d(0.3, 0.7)).norm() <= 1e-15);
  CHECK((project_box_simplex(Eigen::Vector2d(1.0, 0.0), 1.0, lo, hi) - Eigen::Vector2d(1.0, 0.0)).norm() <= 1e-15);
  CHECK((project_box_simplex(Eigen::Vector2d(2.0, 2.0), 1.0, lo, hi) - Eigen::Vector2d(0.5, 0.5)).norm() <= 1e-15);
  CHECK_THROWS_AS(project_box_simplex(Eigen::Vector2d(0.0, 0.0), 3.0, lo, hi), std::invalid_argument);
  CHECK_THROWS_AS(project_box_simplex(Eigen::Vector2d(0.0, 0.0), -1.0, lo, hi), std::invalid_argument);

  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::Index m = 1 + trial % 6;
    Eigen::VectorXd l(m);
    Eigen::VectorXd b(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      l(i) = ud(rng);
      b(i) = l(i) + std::abs(ud(rng));
    }
    const double capital = l.sum() + 0.5 * (1.0 + ud(rng)) * (b.sum() - l.sum());
    const Eigen::VectorXd u = random_vector(rng, m, 3.0);
    const Eigen::VectorXd p = project_box_simplex(u, capital, l, b);
    CHECK(std::abs(p.sum() - capital) <= 1e-12 * std::max(1.0, std::abs(capital)));
    CHECK((p.array() >= l.array()).all());
    CHECK((p.array() <= b.array()).all());
    CHECK((project_box_simplex(p, capital, l, b) - p).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK((p - oracle::box_simplex_bisection(u, capital, l, b)).lpNorm<Eigen::Infinity>() <= 1e-9);
  }
}

TEST_CASE("projected subgradient on the quadratic location problem") {
  std::mt19937_64 rng(14);
  const Sample sample = random_sample(rng, 40, 1, 2.0);
  const QuadraticLocationProblem problem;
  const SubgradientOracle oracle_fn = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = smooth_subgradient(problem, x, sample, SmoothingPlan::saa());
    return saa_objective_value(problem, x, sample);
  };
  SubgradientOptions options;
  options.max_iterations = 50000;
  options.stall_tolerance = 0.0;
  const auto report = projected_subgradient(oracle_fn, [](const Eigen::VectorXd& x) { return x; },
                                            Eigen::VectorXd::Zero(1), options);
  CHECK(std::abs(report.minimizer(0) - sample.matrix().col(0).mean()) <= 1e-6);
}

TEST_CASE("projected subgradient rejects a divergent objective") {
  const SubgradientOracle oracle_fn = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = -Eigen::VectorXd::Ones(x.size());
    return x(0) > 5.0 ? std::numeric_limits<double>::infinity() : -x(0);
  };
  SubgradientOptions options;
  options.step.constant = true;
  CHECK_THROWS_AS(projected_subgradient(oracle_fn, [](const Eigen::VectorXd& x) { return x; },
                                        Eigen::VectorXd::Zero(1), options),
                  EvaluationError);
}

TEST_CASE("LASSO ridge form matches a grid oracle") {
  std::mt19937_64 rng(15);
  RowMatrix d(20, 3);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (Eigen::Index i = 0; i < 20; ++i) {
    d(i, 1) = nd(rng);
    d(i, 2) = nd(rng);
    d(i, 0) = 1.2 * d(i, 1) - 0.7 * d(i, 2) + 0.3 * nd(rng);
  }
  const Sample sample(d);
  const LassoProblem problem(2, 1.0);
  for (double h : {0.0, 0.3, 1.0}) {
    const auto report = lasso_values(problem, sample, h);
    CHECK(report.minimizer.lpNorm<1>() <= 1.0 + 1e-12);
    CHECK(std::abs(report.value - lasso_grid_oracle(sample, 1.0, h)) <= 1e-3);
  }
}

TEST_CASE("portfolio with deterministic returns picks the best feasible allocation") {
  const Eigen::Vector3d r(0.01, 0.05, 0.03);
  RowMatrix d(10, 3);
  for (Eigen::Index i = 0; i < 10; ++i) d.row(i) = r.transpose();
  const PortfolioProblem problem(0.5, 0.2, 1.0, Eigen::Vector3d::Zero(), Eigen::Vector3d(1.0, 0.6, 1.0));
  const auto report = portfolio_value(problem, Sample(d), SmoothingPlan::saa());
  const Eigen::Vector3d expected(0.0, 0.6, 0.4);
  CHECK((report.minimizer.head(3) - expected).lpNorm<Eigen::Infinity>() <= 1e-3);
  CHECK(std::abs(report.value + expected.dot(r)) <= 1e-4);
  CHECK(std::abs(report.minimizer(3) - report.minimizer.head(3).dot(r)) <= 1e-4);
}

TEST_CASE("returned subgradients support convex objectives") {
  std::mt19937_64 rng(16);
  const Sample scalar = random_sample(rng, 11, 1, 2.0);
  const Sample returns = random_sample(rng, 9, 3, 0.5);
  const AvarProblem avar(0.15);
  const LassoProblem lasso(2, 2.0);
  const Sample regression = random_sample(rng, 12, 3);
  const SvmProblem svm(random_sample(rng, 5, 2).matrix(), random_sample(rng, 7, 2).matrix());
  const PortfolioProblem portfolio(0.3, 0.1, 1.0, Eigen::Vector3d::Constant(-1.0), Eigen::Vector3d::Constant(2.0));

  struct Case {
    const Problem* problem;
    Sample sample;
  };
  const std::vector<Case> cases = {
      {&avar, scalar}, {&lasso, regression}, {&svm, svm.labeled_sample()}, {&portfolio, returns}};
  for (const auto& c : cases) {
    CAPTURE(c.problem->name());
    for (const SmoothingPlan& plan : {SmoothingPlan::saa(), SmoothingPlan(Kernel::gaussian(), 0.3)}) {
      for (int trial = 0; trial < 100; ++trial) {
        const Eigen::VectorXd x = random_vector(rng, c.problem->decision_dim());
        const Eigen::VectorXd y = random_vector(rng, c.problem->decision_dim());
        const Eigen::VectorXd g = smooth_subgradient(*c.problem, x, c.sample, plan);
        const double fx = smooth_objective_value(*c.problem, x, c.sample, plan);
        const double fy = smooth_objective_value(*c.problem, y, c.sample, plan);
        CHECK(fy >= fx + g.dot(y - x) - 1e-9);
      }
    }
  }
}

TEST_CASE("sphere search") {
  RowMatrix x(1, 2);
  x << 1.0, 0.0;
  RowMatrix y(1, 2);
  y << -1.0, 0.0;
  const SvmProblem separable(x, y);
  const auto sep = svm_values(separable, SmoothingPlan::saa());
  CHECK(sep.value <= 1e-12);
  CHECK(std::abs(sep.minimizer.head(2).norm() - 1.0) <= 1e-10);

  std::mt19937_64 rng(18);
  const RowMatrix points = random_sample(rng, 10, 2).matrix();
  const SvmProblem mirrored(points, -points);
  const auto sym = svm_values(mirrored, SmoothingPlan(Kernel::gaussian(), 0.5));
  CHECK(std::abs(sym.minimizer(2)) <= 1e-6);

  const SvmProblem random(random_sample(rng, 10, 2).matrix(),
                          (random_sample(rng, 10, 2).matrix().array() + 0.8).matrix());
  const Sample labeled = random.labeled_sample();
  const SmoothingPlan plan = SmoothingPlan::saa();
  const auto solved = svm_values(random, plan);
  const double c = random.gamma_bound(plan);
  double best = std::numeric_limits<double>::infinity();
  const int angles = 2880;
  const int gammas = 801;
  for (int i = 0; i < angles; ++i) {
    const double phi = 2.0 * std::numbers::pi * i / angles;
    for (int j = 0; j < gammas; ++j) {
      const Eigen::Vector3d u(std::cos(phi), std::sin(phi), -c + 2.0 * c * j / (gammas - 1));
      best = std::min(best, smooth_objective_value(random, u, labeled, plan));
    }
  }
  // Lipschitz constants in phi and gamma times the solver's coarse grid spacing.
  double lip_phi = 0.0;
  for (Eigen::Index i = 0; i < labeled.size(); ++i) {
    const auto row = labeled.row(i);
    const double weight = row[0] > 0 ? 1.0 / random.class1_size() : 1.0 / random.class2_size();
    lip_phi += weight * std::hypot(row[1], row[2]);
  }
  const SphereSearchOptions defaults;
  const double spacing_bound =
      lip_phi * 2.0 * std::numbers::pi / defaults.angles + 2.0 * 2.0 * c / (defaults.gammas - 1);
  CHECK(solved.value <= best + spacing_bound);
  CHECK(solved.value >= best - spacing_bound);
  CHECK(std::abs(solved.minimizer.head(2).norm() - 1.0) <= 1e-10);

  const SphereObjective bowl = [](const Eigen::Vector2d& v, double gamma) {
    return (v - Eigen::Vector2d(0.6, 0.8)).squaredNorm() + (gamma - 0.25) * (gamma - 0.25);
  };
  const auto report = sphere_search_2d(bowl, {});
  CHECK((report.minimizer - Eigen::Vector3d(0.6, 0.8, 0.25)).norm() <= 1e-8);
  CHECK_THROWS_AS(sphere_search_2d(bowl, {2, 10, 1.0, 10}), std::invalid_argument);
}

TEST_CASE("solvers are deterministic") {
  std::mt19937_64 rng(19);
  const Sample sample = random_sample(rng, 25, 1, 3.0);
  const AvarProblem problem(0.1);
  const SmoothingPlan plan(Kernel::epanechnikov(), 0.4);
  const auto a = problem.solve(sample, plan);
  const auto b = problem.solve(sample, plan);
  CHECK(a.value == b.value);
  CHECK(a.minimizer == b.minimizer);
  CHECK(a.iterations == b.iterations);
}
