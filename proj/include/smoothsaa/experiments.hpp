#pragma once

#include "smoothsaa/bandwidth.hpp"
#include "smoothsaa/kernel.hpp"
#include "smoothsaa/smoothing.hpp"

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace smoothsaa {

struct NormalDistribution {
  double mu = 0.0;
  double sigma2 = 1.0;
};

/// One column of an experiment: plain SAA when `kernel` is empty.
struct EstimatorSpec {
  std::string label;
  std::optional<Kernel> kernel;
  BandwidthRule rule;

  static EstimatorSpec saa(std::string label = "SAA") { return {std::move(label), std::nullopt, {}}; }
  bool is_saa() const { return !kernel.has_value(); }
};

struct ExperimentConfig {
  NormalDistribution distribution;
  std::vector<Eigen::Index> sample_sizes;
  int replications = 1000;
  double alpha = 0.05;
  /// "avar" or "quadratic_location".
  std::string problem = "avar";
  std::vector<EstimatorSpec> estimators;
  std::uint64_t master_seed = 0;

  /// Throws ConfigError describing the first invalid field.
  void validate() const;
};

struct EstimatorStats {
  Eigen::Index n = 0;
  std::string label;
  std::string kernel;
  std::string rule;
  /// Mean bandwidth over replications (0 for SAA).
  double h_mean = 0.0;
  double mean = 0.0;
  double bias = 0.0;
  /// Divisor M - 1.
  double variance = 0.0;
  double mse = 0.0;
  /// sqrt(variance / M).
  double stderr_bias = 0.0;
  int replications = 0;
};

/// Per-sample checks of the smoothed values against SAA.
struct OrderingDiagnostics {
  /// Replications with theta_K < theta_SAA - tolerance.
  long violations = 0;
  /// Largest theta_K - theta_SAA seen.
  double max_gap = -std::numeric_limits<double>::infinity();
  /// Largest theta_K - theta_SAA - int w(h ||z||) K(z) dz seen.
  double max_sandwich_excess = -std::numeric_limits<double>::infinity();
  /// Largest |theta_K - theta_SAA| among bandwidths at most 1e-6.
  double max_collapse_gap = 0.0;
  long checked = 0;
};

struct ExperimentResult {
  double truth = 0.0;
  std::vector<EstimatorStats> stats;
  /// values[k](r, e): estimate of estimator e in replication r at sample_sizes[k].
  std::vector<Eigen::MatrixXd> values;
  std::vector<Eigen::MatrixXd> bandwidths;
  std::vector<Eigen::VectorXd> saa_values;
  OrderingDiagnostics ordering;
};

/// Problem instance named by the config.
std::unique_ptr<Problem> make_problem(const std::string& name, double alpha);

/// Ground truth theta for the config's problem and distribution.
double true_value(const ExperimentConfig& config);

/// Seeded generator for replication r at sample size n.
std::mt19937_64 replication_stream(std::uint64_t master_seed, Eigen::Index n, int r);

/// N(mu, sigma2) sample drawn from the replication stream by inverse CDF.
Sample draw_normal_sample(const NormalDistribution& dist, Eigen::Index n, std::mt19937_64& rng);

/// Runs every (N, replication) unit, possibly on several threads; the
/// result does not depend on `threads` (0 means hardware concurrency).
/// Throws EvaluationError naming the replication and estimator when a solve fails.
ExperimentResult run_replications(const ExperimentConfig& config, unsigned threads = 1);

/// Pairwise (cascade) summation.
double pairwise_sum(std::span<const double> values);

/// Bias, variance, MSE and standard error of `values` around `truth`.
EstimatorStats estimator_stats(std::span<const double> values, double truth);

struct TableRow {
  Eigen::Index n;
  std::string estimator;
  double h;
  double bias;
  double variance;
  double mse;
  double stderr_bias;
};

/// Rows keyed by (N, estimator, h) with bias recomputed against `truth`.
std::vector<TableRow> summarize(const std::vector<EstimatorStats>& stats, double truth);

}  // namespace smoothsaa
