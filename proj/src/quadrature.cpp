#include "smoothsaa/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace smoothsaa {

namespace {

constexpr double kGaussianTruncation = 10.0;
constexpr int kGaussianPanels = 8;

void check_count(int n) {
  if (n < 2) throw std::invalid_argument("quadrature requires at least 2 nodes");
}

}  // namespace

std::vector<QuadratureNode> gauss_legendre(int n) {
  check_count(n);
  std::vector<QuadratureNode> rule(static_cast<std::size_t>(n));
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule[static_cast<std::size_t>(i)] = {-x, w};
    rule[static_cast<std::size_t>(n - 1 - i)] = {x, w};
  }
  return rule;
}

std::vector<QuadratureNode> gauss_hermite_normal(int n) {
  check_count(n);
  // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite polynomials.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(static_cast<double>(k));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  std::vector<QuadratureNode> rule(static_cast<std::size_t>(n));
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v0 = eig.eigenvectors()(0, i);
    rule[static_cast<std::size_t>(i)] = {eig.eigenvalues()(i), v0 * v0};
    total += v0 * v0;
  }
  // Symmetrize nodes and renormalize so the rule is exactly odd-moment free.
  for (int i = 0; i < n / 2; ++i) {
    auto& lo = rule[static_cast<std::size_t>(i)];
    auto& hi = rule[static_cast<std::size_t>(n - 1 - i)];
    const double x = 0.5 * (hi.node - lo.node);
    const double w = 0.5 * (hi.weight + lo.weight);
    lo = {-x, w};
    hi = {x, w};
  }
  if (n % 2 == 1) rule[static_cast<std::size_t>(n / 2)].node = 0.0;
  for (auto& q : rule) q.weight /= total;
  return rule;
}

std::vector<QuadratureNode> quadrature_nodes(const Kernel& kernel, int n) {
  if (kernel.kind() == KernelKind::Gaussian) return gauss_hermite_normal(n);
  auto rule = gauss_legendre(n);
  for (auto& q : rule) q.weight *= density(kernel, q.node);
  return rule;
}

std::vector<QuadratureNode> split_quadrature_nodes(const Kernel& kernel, int n, std::span<const double> breaks) {
  if (breaks.empty()) return quadrature_nodes(kernel, n);
  const double lo = kernel.compact() ? -1.0 : -kGaussianTruncation;
  const double hi = -lo;
  std::vector<double> cuts{lo, hi};
  if (!kernel.compact()) {
    for (int p = 1; p < kGaussianPanels; ++p) cuts.push_back(lo + (hi - lo) * p / kGaussianPanels);
  }
  for (double b : breaks) {
    if (b > lo && b < hi) cuts.push_back(b);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const auto legendre = gauss_legendre(n);
  std::vector<QuadratureNode> rule;
  rule.reserve(legendre.size() * (cuts.size() - 1));
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double half = 0.5 * (cuts[k + 1] - cuts[k]);
    const double mid = 0.5 * (cuts[k + 1] + cuts[k]);
    for (const auto& q : legendre) {
      const double z = mid + half * q.node;
      rule.push_back({z, half * q.weight * density(kernel, z)});
    }
  }
  return rule;
}

double integrate_against_kernel(const Kernel& kernel, const std::function<double(double)>& g, int n,
                                std::span<const double> breaks) {
  double acc = 0.0;
  for (const auto& q : split_quadrature_nodes(kernel, n, breaks)) acc += q.weight * g(q.node);
  return acc;
}

}  // namespace smoothsaa
