#pragma once

#include "smoothsaa/experiments.hpp"
#include "smoothsaa/io/config.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace smoothsaa::io {

/// Rows by sample size, columns by estimator; raw values kept at full precision.
struct OutputTable {
  std::string caption;
  std::vector<std::string> columns;
  std::vector<Eigen::Index> row_keys;
  Eigen::MatrixXd raw;

  /// Cells rounded to 4 decimals.
  std::vector<std::vector<std::string>> formatted() const;
};

/// Four-decimal rendering with round-to-nearest-even on the exact binary
/// value; negative zero prints as 0.0000.
std::string format4(double value);
/// Shortest round-trip decimal text of a double.
std::string format_full(double value);

enum class Metric { Bias, Variance };

OutputTable pivot(const std::vector<EstimatorStats>& stats, Metric metric);

/// Header N,estimator,kernel,h_rule,h_value,bias,variance,mse,stderr and one row per stats entry.
std::string stats_csv(const std::vector<EstimatorStats>& stats);
std::string table_csv(const OutputTable& table);
std::string table_markdown(const OutputTable& table);
/// Bias and variance pivots followed by the full statistics.
std::string report_markdown(const ExperimentResult& result, const std::string& title);
/// Bias and variance against bandwidth, one polyline per N, SAA as a dashed reference.
std::string svg_plot(const ExperimentResult& result, const std::string& title);

/// Writes the requested formats into spec.dir and returns the paths written.
/// Throws std::runtime_error naming a path that cannot be written.
std::vector<std::string> emit_outputs(const ExperimentResult& result, const OutputSpec& spec, bool pivot_csv);

}  // namespace smoothsaa::io
