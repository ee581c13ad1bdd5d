#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace smoothsaa {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// N observations of an m-dimensional random vector, one per row.
class Sample {
 public:
  /// Throws std::invalid_argument for an empty or non-finite matrix.
  explicit Sample(RowMatrix observations);
  /// One-dimensional sample.
  static Sample scalar(std::span<const double> values);
  static Sample scalar(std::initializer_list<double> values);

  Eigen::Index size() const { return obs_.rows(); }
  Eigen::Index dim() const { return obs_.cols(); }
  std::span<const double> row(Eigen::Index i) const {
    return {obs_.data() + i * obs_.cols(), static_cast<std::size_t>(obs_.cols())};
  }
  const RowMatrix& matrix() const { return obs_; }
  /// Column 0 as a contiguous vector.
  std::vector<double> column(Eigen::Index j = 0) const;
  /// Rows [begin, end).
  Sample slice(Eigen::Index begin, Eigen::Index end) const;

 private:
  RowMatrix obs_;
};

}  // namespace smoothsaa
