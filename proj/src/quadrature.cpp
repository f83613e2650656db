#include "logstab/quadrature.hpp"

#include "logstab/errors.hpp"

#include <cmath>
#include <numbers>

namespace logstab::quadrature {

HermiteRule gauss_hermite(int n) {
    detail::require(n >= 1, "Gauss-Hermite order must be >= 1");
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(0.5 * k);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);

    HermiteRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double pim4 = std::pow(std::numbers::pi, -0.25);
    for (int i = 0; i < n; ++i) {
        double x = eig.eigenvalues()(i);
        double pp = 0.0;
        // Orthonormal recurrence; a couple of Newton steps recover full relative
        // accuracy on the outer nodes, where the eigensolver is weakest.
        for (int it = 0; it < 4; ++it) {
            double p1 = pim4;
            double p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = x * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double step = p1 / pp;
            x -= step;
            if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(x))) break;
        }
        double p1 = pim4;
        double p2 = 0.0;
        for (int j = 1; j <= n; ++j) {
            const double p3 = p2;
            p2 = p1;
            p1 = x * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
        }
        pp = std::sqrt(2.0 * n) * p2;
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / (pp * pp);
    }
    return rule;
}

GaussianGrid standard_normal_grid(int dims, int order) {
    detail::require(dims >= 1, "grid dimension must be >= 1");
    const auto rule = gauss_hermite(order);
    long total = 1;
    for (int d = 0; d < dims; ++d) {
        total *= order;
        detail::require(total <= 4'000'000, "tensor quadrature grid too large");
    }
    GaussianGrid grid;
    grid.points.resize(dims, total);
    grid.weights.resize(total);
    const double norm = std::pow(std::numbers::pi, -0.5);
    std::vector<int> idx(dims, 0);
    for (long q = 0; q < total; ++q) {
        double w = 1.0;
        for (int d = 0; d < dims; ++d) {
            grid.points(d, q) = std::numbers::sqrt2 * rule.nodes[idx[d]];
            w *= rule.weights[idx[d]] * norm;
        }
        grid.weights(q) = w;
        for (int d = 0; d < dims; ++d) {
            if (++idx[d] < order) break;
            idx[d] = 0;
        }
    }
    return grid;
}

} // namespace logstab::quadrature
