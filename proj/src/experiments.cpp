#include "smoothsaa/experiments.hpp"

#include "smoothsaa/errors.hpp"
#include "smoothsaa/problems/avar.hpp"
#include "smoothsaa/problems/quadratic_location.hpp"
#include "smoothsaa/solvers.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

namespace smoothsaa {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform_open01(std::mt19937_64& rng) { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; }

struct UnitResult {
  std::vector<double> values;
  std::vector<double> bandwidths;
  double saa = 0.0;
};

struct UnitError {
  std::size_t unit;
  std::string message;
};

}  // namespace

void ExperimentConfig::validate() const {
  if (!std::isfinite(distribution.mu)) throw ConfigError("distribution mean must be finite");
  if (!(distribution.sigma2 > 0.0) || !std::isfinite(distribution.sigma2)) {
    throw ConfigError("distribution variance must be positive");
  }
  if (sample_sizes.empty()) throw ConfigError("N_list must not be empty");
  for (Eigen::Index n : sample_sizes) {
    if (n < 2) throw ConfigError("every sample size must be at least 2");
  }
  if (replications < 2) throw ConfigError("replications must be at least 2");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (problem != "avar" && problem != "quadratic_location") {
    throw ConfigError("unknown problem '" + problem + "'");
  }
  if (estimators.empty()) throw ConfigError("at least one estimator is required");
  for (const auto& e : estimators) {
    if (e.kernel && e.kernel->dim() != 1) throw ConfigError("estimator '" + e.label + "' needs a 1-D kernel");
    if (!e.is_saa() && e.rule.kind == BandwidthKind::Rate && !(e.rule.value > 0.0 && e.rule.eps > 0.0)) {
      throw ConfigError("estimator '" + e.label + "' has an invalid rate rule");
    }
  }
}

std::unique_ptr<Problem> make_problem(const std::string& name, double alpha) {
  if (name == "avar") return std::make_unique<AvarProblem>(alpha);
  if (name == "quadratic_location") return std::make_unique<QuadraticLocationProblem>();
  throw ConfigError("unknown problem '" + name + "'");
}

double true_value(const ExperimentConfig& config) {
  if (config.problem == "avar") {
    return true_avar_normal(config.distribution.mu, config.distribution.sigma2, config.alpha);
  }
  return config.distribution.sigma2;
}

std::mt19937_64 replication_stream(std::uint64_t master_seed, Eigen::Index n, int r) {
  std::uint64_t key = splitmix64(master_seed);
  key = splitmix64(key ^ static_cast<std::uint64_t>(n));
  key = splitmix64(key ^ (static_cast<std::uint64_t>(r) << 1 | 1ULL));
  return std::mt19937_64(key);
}

Sample draw_normal_sample(const NormalDistribution& dist, Eigen::Index n, std::mt19937_64& rng) {
  const boost::math::normal_distribution<double> normal(dist.mu, std::sqrt(dist.sigma2));
  RowMatrix x(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) x(i, 0) = boost::math::quantile(normal, uniform_open01(rng));
  return Sample(std::move(x));
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

EstimatorStats estimator_stats(std::span<const double> values, double truth) {
  if (values.size() < 2) throw std::invalid_argument("statistics need at least two replications");
  const double m = static_cast<double>(values.size());
  EstimatorStats s;
  s.replications = static_cast<int>(values.size());
  s.mean = pairwise_sum(values) / m;
  s.bias = s.mean - truth;
  std::vector<double> dev(values.size());
  std::vector<double> err(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    dev[i] = (values[i] - s.mean) * (values[i] - s.mean);
    err[i] = (values[i] - truth) * (values[i] - truth);
  }
  s.variance = pairwise_sum(dev) / (m - 1.0);
  s.mse = pairwise_sum(err) / m;
  s.stderr_bias = std::sqrt(s.variance / m);
  return s;
}

ExperimentResult run_replications(const ExperimentConfig& config, unsigned threads) {
  config.validate();
  const auto problem = make_problem(config.problem, config.alpha);
  const std::size_t estimators = config.estimators.size();
  const auto m = static_cast<std::size_t>(config.replications);
  const std::size_t units = config.sample_sizes.size() * m;
  std::vector<UnitResult> results(units);

  auto run_unit = [&](std::size_t unit) {
    const std::size_t k = unit / m;
    const int r = static_cast<int>(unit % m);
    const Eigen::Index n = config.sample_sizes[k];
    std::mt19937_64 rng = replication_stream(config.master_seed, n, r);
    const Sample sample = draw_normal_sample(config.distribution, n, rng);
    UnitResult out;
    out.values.resize(estimators);
    out.bandwidths.resize(estimators);
    auto fail = [&](const std::string& label, const std::exception& ex) {
      std::ostringstream msg;
      msg << "replication " << r << " (N=" << n << "), estimator '" << label << "': " << ex.what();
      throw EvaluationError(msg.str());
    };
    try {
      out.saa = problem->solve(sample, SmoothingPlan::saa()).value;
    } catch (const std::exception& ex) {
      fail("SAA reference", ex);
    }
    for (std::size_t e = 0; e < estimators; ++e) {
      const EstimatorSpec& spec = config.estimators[e];
      try {
        if (spec.is_saa()) {
          out.values[e] = out.saa;
          out.bandwidths[e] = 0.0;
          continue;
        }
        const double h = select_bandwidth(spec.rule, sample, *spec.kernel, problem.get());
        out.bandwidths[e] = h;
        out.values[e] = problem->solve(sample, SmoothingPlan(*spec.kernel, h)).value;
      } catch (const std::exception& ex) {
        fail(spec.label, ex);
      }
    }
    results[unit] = std::move(out);
  };

  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, units));
  std::vector<UnitError> errors;
  if (threads <= 1) {
    for (std::size_t u = 0; u < units; ++u) run_unit(u);
  } else {
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t u = next.fetch_add(1); u < units; u = next.fetch_add(1)) {
          try {
            run_unit(u);
          } catch (const std::exception& ex) {
            const std::lock_guard lock(error_mutex);
            errors.push_back({u, ex.what()});
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (!errors.empty()) {
      // Report the failure a sequential run would have hit first.
      const auto first = std::min_element(errors.begin(), errors.end(),
                                          [](const UnitError& a, const UnitError& b) { return a.unit < b.unit; });
      throw EvaluationError(first->message);
    }
  }

  ExperimentResult result;
  result.truth = true_value(config);
  for (std::size_t k = 0; k < config.sample_sizes.size(); ++k) {
    const Eigen::Index n = config.sample_sizes[k];
    Eigen::MatrixXd values(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(estimators));
    Eigen::MatrixXd hs(values.rows(), values.cols());
    Eigen::VectorXd saa(values.rows());
    for (std::size_t r = 0; r < m; ++r) {
      const UnitResult& unit = results[k * m + r];
      saa(static_cast<Eigen::Index>(r)) = unit.saa;
      for (std::size_t e = 0; e < estimators; ++e) {
        values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(e)) = unit.values[e];
        hs(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(e)) = unit.bandwidths[e];
      }
    }
    for (std::size_t e = 0; e < estimators; ++e) {
      const EstimatorSpec& spec = config.estimators[e];
      const auto col = static_cast<Eigen::Index>(e);
      std::vector<double> column(m);
      std::vector<double> h_column(m);
      for (std::size_t r = 0; r < m; ++r) {
        column[r] = values(static_cast<Eigen::Index>(r), col);
        h_column[r] = hs(static_cast<Eigen::Index>(r), col);
      }
      EstimatorStats s = estimator_stats(column, result.truth);
      s.n = n;
      s.label = spec.label;
      s.kernel = spec.is_saa() ? "none" : std::string(spec.kernel->name());
      s.rule = spec.is_saa() ? "saa" : spec.rule.label();
      s.h_mean = pairwise_sum(h_column) / static_cast<double>(m);
      result.stats.push_back(std::move(s));

      if (spec.is_saa() || !problem->convex_in_data()) continue;
      for (std::size_t r = 0; r < m; ++r) {
        const double gap = column[r] - saa(static_cast<Eigen::Index>(r));
        OrderingDiagnostics& d = result.ordering;
        ++d.checked;
        if (gap < -1e-9) ++d.violations;
        d.max_gap = std::max(d.max_gap, gap);
        if (config.problem == "avar") {
          const double bound = h_column[r] * fractional_moment(*spec.kernel, 1.0) / config.alpha;
          d.max_sandwich_excess = std::max(d.max_sandwich_excess, gap - bound);
        } else {
          const double bound = h_column[r] * h_column[r] * second_moment(*spec.kernel);
          d.max_sandwich_excess = std::max(d.max_sandwich_excess, gap - bound);
        }
        if (h_column[r] <= 1e-6) d.max_collapse_gap = std::max(d.max_collapse_gap, std::abs(gap));
      }
    }
    result.values.push_back(std::move(values));
    result.bandwidths.push_back(std::move(hs));
    result.saa_values.push_back(std::move(saa));
  }
  return result;
}

std::vector<TableRow> summarize(const std::vector<EstimatorStats>& stats, double truth) {
  std::vector<TableRow> rows;
  rows.reserve(stats.size());
  for (const auto& s : stats) {
    const double bias = s.mean - truth;
    const double m = static_cast<double>(s.replications);
    const double mse = m > 0.0 ? bias * bias + s.variance * (m - 1.0) / m : bias * bias;
    rows.push_back({s.n, s.label, s.h_mean, bias, s.variance, mse, s.stderr_bias});
  }
  return rows;
}

}  // namespace smoothsaa
