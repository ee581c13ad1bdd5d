#pragma once

#include "smoothsaa/kernel.hpp"

#include <functional>
#include <span>
#include <vector>

namespace smoothsaa {

struct QuadratureNode {
  double node;
  double weight;
};

/// Default node count used by the quadrature smoothing strategy.
inline constexpr int kDefaultQuadratureNodes = 64;

/// Gauss-Legendre rule on [-1, 1] (weights sum to 2).
std::vector<QuadratureNode> gauss_legendre(int n);
/// Gauss-Hermite rule for the standard normal weight (weights sum to 1).
std::vector<QuadratureNode> gauss_hermite_normal(int n);

/**
 * Rule integrating g(z) K(z) dz for the one-dimensional unit kernel.
 *
 * Compact kernels: Legendre nodes on [-1, 1] with weights multiplied by the
 * density. Gaussian: Hermite nodes for the standard normal weight. Weights sum
 * to one. Requires n >= 2.
 */
std::vector<QuadratureNode> quadrature_nodes(const Kernel& kernel, int n);

/**
 * Nodes and density-weighted weights for int g(z) K(z) dz where g may have
 * kinks at `breaks`.
 *
 * Without breaks this is the plain `quadrature_nodes` rule. With breaks, each
 * piece of the support gets its own n-point Legendre rule; the Gaussian
 * support is truncated to [-10, 10] and cut into 8 panels first, so a
 * piecewise-smooth integrand is integrated to near machine precision.
 */
std::vector<QuadratureNode> split_quadrature_nodes(const Kernel& kernel, int n, std::span<const double> breaks);

/**
 * Integral of g(z) K(z) dz over the one-dimensional kernel profile using
 * split_quadrature_nodes.
 */
double integrate_against_kernel(const Kernel& kernel, const std::function<double(double)>& g, int n,
                                std::span<const double> breaks = {});

}  // namespace smoothsaa
