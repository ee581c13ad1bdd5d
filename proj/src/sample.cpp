#include "smoothsaa/sample.hpp"

#include <stdexcept>

namespace smoothsaa {

Sample::Sample(RowMatrix observations) : obs_(std::move(observations)) {
  if (obs_.rows() < 1 || obs_.cols() < 1) throw std::invalid_argument("sample must contain at least one observation");
  if (!obs_.allFinite()) throw std::invalid_argument("sample contains non-finite entries");
}

Sample Sample::scalar(std::span<const double> values) {
  RowMatrix m(static_cast<Eigen::Index>(values.size()), 1);
  for (std::size_t i = 0; i < values.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = values[i];
  return Sample(std::move(m));
}

Sample Sample::scalar(std::initializer_list<double> values) {
  return scalar(std::span<const double>(values.begin(), values.size()));
}

std::vector<double> Sample::column(Eigen::Index j) const {
  std::vector<double> out(static_cast<std::size_t>(obs_.rows()));
  for (Eigen::Index i = 0; i < obs_.rows(); ++i) out[static_cast<std::size_t>(i)] = obs_(i, j);
  return out;
}

Sample Sample::slice(Eigen::Index begin, Eigen::Index end) const {
  if (begin < 0 || end > obs_.rows() || begin >= end) throw std::invalid_argument("invalid sample slice");
  return Sample(obs_.middleRows(begin, end - begin));
}

}  // namespace smoothsaa
