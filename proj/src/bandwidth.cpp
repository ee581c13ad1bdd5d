#include "smoothsaa/bandwidth.hpp"

#include "smoothsaa/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace smoothsaa {

namespace {

double fifth_root_rate(Eigen::Index n) { return std::pow(static_cast<double>(n), -0.2); }

void require_two(Eigen::Index n) {
  if (n < 2) throw std::invalid_argument("bandwidth rules need at least two observations");
}

std::vector<double> scalar_data(const Sample& sample) {
  if (sample.dim() != 1) throw std::invalid_argument("plug-in bandwidth rules need one-dimensional data");
  return sample.column(0);
}

}  // namespace

double sample_std(std::span<const double> x) {
  require_two(static_cast<Eigen::Index>(x.size()));
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double quantile_linear(std::span<const double> x, double p) {
  if (x.empty()) throw std::invalid_argument("quantile of empty data");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile level must lie in [0, 1]");
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double plugin_106_from_stats(double sigma, Eigen::Index n) {
  require_two(n);
  if (!(sigma > 0.0)) throw std::invalid_argument("plug-in bandwidth needs a positive standard deviation");
  return 1.06 * sigma * fifth_root_rate(n);
}

double plugin_106(const Sample& sample) {
  const std::vector<double> x = scalar_data(sample);
  require_two(sample.size());
  return plugin_106_from_stats(sample_std(x), sample.size());
}

double silverman_from_stats(double sigma, double iqr, Eigen::Index n) {
  require_two(n);
  const double a = std::min(sigma, iqr / 1.34);
  if (!(a > 0.0)) throw std::invalid_argument("Silverman bandwidth needs positive spread");
  return 0.9 * a * fifth_root_rate(n);
}

double silverman(const Sample& sample) {
  const std::vector<double> x = scalar_data(sample);
  require_two(sample.size());
  const double iqr = quantile_linear(x, 0.75) - quantile_linear(x, 0.25);
  return silverman_from_stats(sample_std(x), iqr, sample.size());
}

double rate_rule(Eigen::Index n, double c, double eps) {
  if (n < 1) throw std::invalid_argument("rate rule needs N >= 1");
  if (!(c > 0.0)) throw std::invalid_argument("rate rule needs C > 0");
  if (!(eps >= 0.0)) throw std::invalid_argument("rate rule needs eps >= 0");
  return c * std::pow(static_cast<double>(n), -0.5 - eps);
}

double bias_matched_from_width(double width, const BiasBound& bound) {
  if (!(bound.constant > 0.0) || !(bound.exponent > 0.0)) throw std::invalid_argument("bias bound must be positive");
  if (!(width > 0.0)) return kBiasMatchedFloor;
  return std::max(kBiasMatchedFloor, std::pow(width / bound.constant, 1.0 / bound.exponent));
}

BiasMatchedResult bias_matched(const Sample& sample, const Problem& problem, const Kernel& kernel,
                               const ModulusSpec& modulus, double pilot_fraction) {
  if (!(pilot_fraction > 0.0 && pilot_fraction < 1.0)) {
    throw std::invalid_argument("pilot fraction must lie in (0, 1)");
  }
  const auto pilot_size =
      static_cast<Eigen::Index>(std::floor(pilot_fraction * static_cast<double>(sample.size())));
  if (pilot_size < 2 || sample.size() - pilot_size < 2) {
    throw std::invalid_argument("bias matching needs at least two pilot and two holdout points");
  }
  const Sample pilot = sample.slice(0, pilot_size);
  const Sample holdout = sample.slice(pilot_size, sample.size());
  const SolveReport fit = problem.solve(pilot, SmoothingPlan::saa());

  BiasMatchedResult out{};
  out.bound = {0.0, 2.0};
  for (const auto& term : modulus.terms()) {
    out.bound.constant += term.coefficient * fractional_moment(kernel, term.exponent);
    out.bound.exponent = std::min(out.bound.exponent, term.exponent);
  }
  out.pilot_value = fit.value;
  out.holdout_value = saa_objective_value(problem, fit.minimizer, holdout);
  out.width = out.holdout_value - out.pilot_value;
  out.h = bias_matched_from_width(out.width, out.bound);
  return out;
}

BandwidthRule BandwidthRule::rate(double c, double eps) {
  if (!(c > 0.0)) throw std::invalid_argument("rate rule needs C > 0");
  if (!(eps > 0.0)) throw std::invalid_argument("rate rule needs eps > 0");
  return {BandwidthKind::Rate, c, eps};
}

BandwidthRule BandwidthRule::fixed(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("fixed bandwidth must be positive");
  return {BandwidthKind::Fixed, h, 0.0};
}

BandwidthRule BandwidthRule::bias_matched(double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw std::invalid_argument("pilot fraction must lie in (0, 1)");
  return {BandwidthKind::BiasMatched, fraction, 0.0};
}

std::string BandwidthRule::label() const {
  std::ostringstream out;
  switch (kind) {
    case BandwidthKind::Plugin106:
      return "plugin_106";
    case BandwidthKind::Silverman:
      return "silverman";
    case BandwidthKind::Rate:
      out << "rate(" << value << "," << eps << ")";
      return out.str();
    case BandwidthKind::Fixed:
      out << "fixed(" << value << ")";
      return out.str();
    case BandwidthKind::BiasMatched:
      out << "bias_matched(" << value << ")";
      return out.str();
  }
  return "unknown";
}

BandwidthRule bandwidth_rule_from_name(const std::string& name, double value, double eps) {
  if (name == "plugin_106") return BandwidthRule::plugin106();
  if (name == "silverman") return BandwidthRule::silverman();
  if (name == "rate") return BandwidthRule::rate(value, eps);
  if (name == "fixed") return BandwidthRule::fixed(value);
  if (name == "bias_matched") return BandwidthRule::bias_matched(value);
  throw std::invalid_argument("unknown bandwidth rule '" + name + "'");
}

double select_bandwidth(const BandwidthRule& rule, const Sample& sample, const Kernel& kernel,
                        const Problem* problem) {
  switch (rule.kind) {
    case BandwidthKind::Plugin106:
      return plugin_106(sample);
    case BandwidthKind::Silverman:
      return silverman(sample);
    case BandwidthKind::Rate:
      return rate_rule(sample.size(), rule.value, rule.eps);
    case BandwidthKind::Fixed:
      return rule.value;
    case BandwidthKind::BiasMatched:
      if (problem == nullptr) throw std::invalid_argument("bias-matched bandwidth needs a problem");
      return bias_matched(sample, *problem, kernel, problem->modulus(sample), rule.value).h;
  }
  throw std::logic_error("unhandled bandwidth rule");
}

}  // namespace smoothsaa
