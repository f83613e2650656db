#pragma once

// Independent reference computations for the test suites. Everything here
// integrates defining formulas directly and shares no code with the library.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

/// y^{a-1} e^{-s}, zero where the product is not representable (s → ∞).
inline double decaying_power(double y, double a, double s) {
    const double v = std::exp((a - 1.0) * std::log(y) - s);
    return std::isfinite(v) ? v : 0.0;
}

/// Γ(a,x) = ∫_x^∞ t^{a-1} e^{-t} dt.
inline double gamma_upper(double a, double x) {
    boost::math::quadrature::exp_sinh<double> tail;
    if (x >= 1.0) {
        // e^{-x} ∫_0^∞ (x+s)^{a-1} e^{-s} ds keeps the integrand O(1).
        const double scaled = tail.integrate([&](double s) { return decaying_power(x + s, a, s); }, 1e-15);
        return std::exp(-x) * scaled;
    }
    // t = u^{1/a} on [x, 1] removes the t^{a-1} singularity.
    boost::math::quadrature::tanh_sinh<double> ts;
    const double head = x >= 1.0 ? 0.0
                                 : ts.integrate([&](double u) { return std::exp(-std::pow(u, 1.0 / a)); },
                                                std::pow(x, a), 1.0, 1e-15) /
                                       a;
    const double rest =
        std::exp(-1.0) * tail.integrate([&](double s) { return decaying_power(1.0 + s, a, s); }, 1e-15);
    return head + rest;
}

/// B_x(a, 1-a) = ∫_0^x t^{a-1} (1-t)^{-a} dt. Near 0 substitute t = u^{1/a};
/// past x = ¾ split at ½ and substitute 1 - t = v^{1/(1-a)} on the right piece.
inline double beta_inc(double a, double x) {
    if (x <= 0.0) return 0.0;
    boost::math::quadrature::tanh_sinh<double> ts;
    const double split = x <= 0.75 ? x : 0.5;
    auto head = [&](double u) { return std::pow(1.0 - std::pow(u, 1.0 / a), -a); };
    double total = ts.integrate(head, 0.0, std::pow(split, a), 1e-15) / a;
    if (x > 0.75) {
        const double b = 1.0 - a;
        auto tail = [&](double v) { return std::pow(1.0 - std::pow(v, 1.0 / b), a - 1.0); };
        total += ts.integrate(tail, std::pow(1.0 - x, b), std::pow(0.5, b), 1e-15) / b;
    }
    return total;
}

/// ∫_0^1 E^{c t^φ} dt.
inline double kernel_integral(double E, double phi, double c) {
    const double le = std::log(E);
    auto f = [&](double t) { return std::exp(c * std::pow(t, phi) * le); };
    // tanh-sinh copes with the t^φ kink at 0 for fractional φ.
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(f, 0.0, 1.0, 1e-15);
}

/// h(x) = (θ sin ψ / π) B_{sin²(πx/2θ)}(ψ/π, 1 - ψ/π).
inline double boundary_map(double x, double theta, double psi) {
    const double s = std::sin(std::numbers::pi * x / (2.0 * theta));
    return theta * std::sin(psi) / std::numbers::pi * beta_inc(psi / std::numbers::pi, s * s);
}

/// h^{-1}(t)/θ by plain bisection.
inline double harmonic_weight(double t, double theta, double psi) {
    double lo = 0.0, hi = theta;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (boundary_map(mid, theta, psi) < t ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi) / theta;
}

/// ∫_0^∞ e^{sB} Q e^{sBᵀ} ds with 20-point Gauss–Legendre panels; the panel
/// start exponentials are propagated by exact multiplication.
inline Eigen::MatrixXd gramian_quadrature(const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q, double width = 0.1) {
    using rule = boost::math::quadrature::gauss<double, 20>;
    const auto& x = rule::abscissa();
    const auto& w = rule::weights();
    const Eigen::VectorXcd ev = B.eigenvalues();
    const double decay = -ev.real().maxCoeff();
    const double horizon = 40.0 / decay;
    std::vector<double> nodes, weights;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (double sgn : {-1.0, 1.0}) {
            if (x[i] == 0.0 && sgn > 0) continue;
            nodes.push_back(0.5 * width * (1.0 + sgn * x[i]));
            weights.push_back(0.5 * width * w[i]);
        }
    }
    std::vector<Eigen::MatrixXd> local;
    for (double s : nodes) local.push_back((s * B).exp());
    const Eigen::MatrixXd step = (width * B).exp();
    Eigen::MatrixXd start = Eigen::MatrixXd::Identity(B.rows(), B.cols());
    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(B.rows(), B.cols());
    for (double a = 0.0; a < horizon; a += width) {
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            const Eigen::MatrixXd e = start * local[k];
            total += weights[k] * e * Q * e.transpose();
        }
        start = start * step;
    }
    return 0.5 * (total + total.transpose());
}

/// (1/Γ(ε)) ∫_0^∞ t^{ε-1} e^{t(A-λ)} v dt with t = u^{1/ε}, componentwise.
inline Eigen::VectorXd negative_power_apply(const Eigen::MatrixXd& A, double lambda, double eps, const Eigen::VectorXd& v) {
    const auto n = A.rows();
    const Eigen::MatrixXd shifted = A - lambda * Eigen::MatrixXd::Identity(n, n);
    const double decay = -Eigen::VectorXcd(shifted.eigenvalues()).real().maxCoeff();
    boost::math::quadrature::exp_sinh<double> es;
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        auto f = [&](double u) {
            if (u == 0.0) return v(i);
            const double t = std::pow(u, 1.0 / eps);
            if (!(t * decay < 745.0)) return 0.0;
            return ((t * shifted).exp() * v)(i);
        };
        out(i) = es.integrate(f, 1e-12) / (eps * std::tgamma(eps));
    }
    return out;
}

/// 1D Kolmogorov formula by direct integration over y.
inline double kolmogorov_1d(double b, double t, const std::function<double(double)>& f, double x) {
    const double qt = (1.0 - std::exp(2.0 * b * t)) / (-2.0 * b);
    const double mean = std::exp(b * t) * x;
    boost::math::quadrature::sinh_sinh<double> ss;
    auto g = [&](double y) { return std::exp(-y * y / (4.0 * qt)) * f(mean - y); };
    return ss.integrate(g, 1e-14) / std::sqrt(4.0 * std::numbers::pi * qt);
}

/// Relative difference with an absolute floor.
inline double rel(double a, double b, double floor = 1e-300) {
    return std::abs(a - b) / std::max(std::abs(b), floor);
}

} // namespace oracle
