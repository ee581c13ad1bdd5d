#pragma once

#include "smoothsaa/kernel.hpp"
#include "smoothsaa/sample.hpp"
#include "smoothsaa/smoothing.hpp"

#include <span>
#include <string>

namespace smoothsaa {

/// Sample standard deviation with divisor N - 1. Requires N >= 2.
double sample_std(std::span<const double> x);

/// Linear-interpolation quantile (R type 7) of unsorted data, p in [0, 1].
double quantile_linear(std::span<const double> x, double p);

/// h = 1.06 sigma N^(-1/5), usually called the normal reference rule.
double plugin_106(const Sample& sample);
double plugin_106_from_stats(double sigma, Eigen::Index n);

/// h = 0.9 min(sigma, IQR / 1.34) N^(-1/5).
double silverman(const Sample& sample);
double silverman_from_stats(double sigma, double iqr, Eigen::Index n);

/// h = C N^(-1/2 - eps). Requires N >= 1, C > 0, eps >= 0.
double rate_rule(Eigen::Index n, double c, double eps);

/// Largest h with L h^alpha <= width, or the floor when width <= 0.
inline constexpr double kBiasMatchedFloor = 1e-6;
double bias_matched_from_width(double width, const BiasBound& bound);

/// Details of a bias-matched selection.
struct BiasMatchedResult {
  double h;
  /// Holdout estimate of E[F(u_pilot, X)] minus the pilot SAA value.
  double width;
  double pilot_value;
  double holdout_value;
  BiasBound bound;
};

/**
 * Splits the sample into a pilot (the first floor(fraction N) rows) and a
 * holdout, solves SAA on the pilot, and matches L h^alpha to the gap between
 * the holdout mean of F at the pilot solution and the pilot optimal value.
 * Throws std::invalid_argument when either part has fewer than two points.
 */
BiasMatchedResult bias_matched(const Sample& sample, const Problem& problem, const Kernel& kernel,
                               const ModulusSpec& modulus, double pilot_fraction);

enum class BandwidthKind { Plugin106, Silverman, Rate, Fixed, BiasMatched };

struct BandwidthRule {
  BandwidthKind kind = BandwidthKind::Fixed;
  /// Fixed: h. Rate: C. BiasMatched: pilot fraction.
  double value = 0.0;
  /// Rate only.
  double eps = 0.0;

  static BandwidthRule plugin106() { return {BandwidthKind::Plugin106}; }
  static BandwidthRule silverman() { return {BandwidthKind::Silverman}; }
  /// Requires c > 0 and eps > 0.
  static BandwidthRule rate(double c, double eps);
  /// Requires h > 0.
  static BandwidthRule fixed(double h);
  /// Requires fraction in (0, 1).
  static BandwidthRule bias_matched(double fraction);

  std::string label() const;
  bool depends_on_sample() const { return kind != BandwidthKind::Fixed && kind != BandwidthKind::Rate; }

  friend bool operator==(const BandwidthRule&, const BandwidthRule&) = default;
};

/// Parses plugin_106, silverman, rate, fixed, bias_matched; `value` and
/// `eps` fill the rule parameters.
BandwidthRule bandwidth_rule_from_name(const std::string& name, double value = 0.0, double eps = 0.0);

/// Bandwidth for one sample. BiasMatched needs the problem.
double select_bandwidth(const BandwidthRule& rule, const Sample& sample, const Kernel& kernel,
                        const Problem* problem = nullptr);

}  // namespace smoothsaa
