#pragma once

#include <Eigen/Dense>

#include <vector>

namespace logstab::quadrature {

/// One-dimensional rule for ∫ f(x) e^{-x²} dx.
struct HermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss–Hermite rule with n nodes (Golub–Welsch start, Newton-polished nodes).
[[nodiscard]] HermiteRule gauss_hermite(int n);

/// Tensor-product rule for the standard normal law on R^dims: columns of
/// `points` are nodes, `weights` sum to one. Exact for polynomials of
/// degree <= 2·order - 1 in each coordinate.
struct GaussianGrid {
    Eigen::MatrixXd points;
    Eigen::VectorXd weights;
};

[[nodiscard]] GaussianGrid standard_normal_grid(int dims, int order);

} // namespace logstab::quadrature
