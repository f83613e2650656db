#include "logstab/errors.hpp"
#include "logstab/harness.hpp"
#include "logstab/operators.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <thread>

using namespace logstab;
using namespace logstab::operators;
using std::numbers::pi;

namespace {

Eigen::MatrixXd worked_drift() {
    Eigen::MatrixXd b(2, 2);
    b << -1, 2, 0, -1;
    return b;
}

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error thrown");
    return ErrorKind::invalid_argument;
}

DiscreteGenerator jordan_generator(SpectralOptions spectral) {
    DiscreteGenerator::Parts parts;
    parts.matrix.resize(2, 2);
    parts.matrix << -1, 1, 0, -1;
    parts.psi = pi / 4;
    parts.lambda_shift = 1.0;
    parts.spectral = spectral;
    return DiscreteGenerator(std::move(parts));
}

} // namespace

TEST_SUITE("operators") {

TEST_CASE("drift validation") {
    CHECK(kind_of([] { DriftSpec(Eigen::MatrixXd(2, 3)); }) == ErrorKind::invalid_argument);
    Eigen::MatrixXd q(2, 2);
    q << 1, 0.5, 0, 1;
    CHECK(kind_of([&] { DriftSpec(worked_drift(), q); }) == ErrorKind::invalid_argument);
    q << 1, 2, 2, 1;
    CHECK(kind_of([&] { DriftSpec(worked_drift(), q); }) == ErrorKind::invalid_argument);
    CHECK(DriftSpec(worked_drift()).is_stable());
    CHECK(DriftSpec(worked_drift()).spectral_abscissa() == doctest::Approx(-1.0));
}

TEST_CASE("Lyapunov gramian of simple drifts") {
    const auto half = lyapunov_gramian(DriftSpec(-0.5 * Eigen::MatrixXd::Identity(2, 2)));
    CHECK((half.q_inf - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
    const auto worked = lyapunov_gramian(DriftSpec(worked_drift()));
    Eigen::MatrixXd expected(2, 2);
    expected << 1.5, 0.5, 0.5, 0.5;
    CHECK((worked.q_inf - expected).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((oracle::gramian_quadrature(worked_drift(), Eigen::MatrixXd::Identity(2, 2)) - expected).cwiseAbs().maxCoeff() <
          1e-6);
    Eigen::MatrixXd unstable(2, 2);
    unstable << 1, 0, 0, -1;
    CHECK(kind_of([&] { (void)lyapunov_gramian(DriftSpec(unstable)); }) == ErrorKind::unstable_drift);
}

TEST_CASE("Lyapunov gramian on random stable drifts against quadrature") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 20; ++i) {
        const int n = 2 + i % 3;
        const Eigen::MatrixXd b = harness::random_stable_drift(rng, n);
        Eigen::MatrixXd g = Eigen::MatrixXd::Random(n, n);
        const Eigen::MatrixXd q = g * g.transpose() + Eigen::MatrixXd::Identity(n, n);
        const DriftSpec spec(b, q);
        const auto gram = lyapunov_gramian(spec);
        CHECK(lyapunov_residual(spec, gram) <= 1e-10);
        CHECK((gram.q_inf - oracle::gramian_quadrature(b, q)).cwiseAbs().maxCoeff() <= 1e-6);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram.q_inf);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
}

TEST_CASE("analyticity angle") {
    CHECK(analyticity_angle(DriftSpec(-0.5 * Eigen::MatrixXd::Identity(2, 2))) == doctest::Approx(pi / 2).epsilon(1e-15));
    const auto rep = analyticity(DriftSpec(worked_drift()));
    CHECK(std::abs(rep.psi - pi / 4) <= 1e-10);
    CHECK(rep.gamma == doctest::Approx(1.0).epsilon(1e-12));
    for (double g : {0.0, 0.3, 1.0, 7.0, 1e3}) CHECK(std::abs(std::atan2(1.0, g) - (pi / 2 - std::atan(g))) <= 1e-14);
}

TEST_CASE("analyticity angle with a general diffusion matches the whitened drift") {
    Eigen::MatrixXd q(2, 2);
    q << 2.0, 0.3, 0.3, 0.7;
    const DriftSpec spec(worked_drift(), q);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q);
    const Eigen::MatrixXd s = es.operatorSqrt();
    const Eigen::MatrixXd s_inv = es.operatorInverseSqrt();
    // x = Q^{1/2} y turns div(Q∇) + Bx·∇ into Δ + (Q^{-1/2} B Q^{1/2}) y·∇.
    const DriftSpec whitened(s_inv * worked_drift() * s);
    CHECK(analyticity_angle(spec) == doctest::Approx(analyticity_angle(whitened)).epsilon(1e-12));
}

TEST_CASE("heat generator spectrum and finite-difference limit") {
    const auto gen = build_heat_generator(3, pi);
    CHECK(gen.matrix().isApprox(Eigen::Vector3d(-1, -4, -9).asDiagonal().toDenseMatrix()));
    CHECK(gen.matrix() == gen.matrix().transpose());
    CHECK(gen.sector_K() == 1.0);
    CHECK(gen.sector_kappa() == 0.0);
    CHECK(gen.lambda_shift() == 0.0);
    CHECK(gen.psi() == doctest::Approx(pi / 2));
    const int m = 2000;
    const double h = pi / (m + 1);
    for (int k = 1; k <= 3; ++k) {
        const double fd = -(2 - 2 * std::cos(k * pi / (m + 1))) / (h * h);
        CHECK(std::abs(fd - gen.matrix()(k - 1, k - 1)) / (k * k) < 1e-5);
    }
    for (double t : {0.0, 0.01, 0.5, 3.0}) CHECK(spectral_norm(semigroup_matrix(gen, t)) <= 1.0 + 1e-15);
    CHECK(kind_of([] { (void)build_heat_generator(1, 1.0); }) == ErrorKind::invalid_argument);
}

TEST_CASE("heat observation nodes integrate sine products exactly") {
    const auto gen = build_heat_generator(12, 2.0);
    const auto& nd = gen.nodes();
    const Eigen::MatrixXd gram = nd.basis_values.transpose() * nd.weights.asDiagonal() * nd.basis_values;
    CHECK((gram - Eigen::MatrixXd::Identity(12, 12)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("one-dimensional Ornstein-Uhlenbeck Galerkin spectrum") {
    for (double b : {0.5, 1.0, 2.5}) {
        const int order = 7;
        const auto gen = build_ou_generator(DriftSpec(Eigen::MatrixXd::Constant(1, 1, -b)), order);
        Eigen::VectorXd ev = gen.matrix().eigenvalues().real();
        std::sort(ev.data(), ev.data() + ev.size());
        for (int k = 0; k <= order; ++k) CHECK(ev(order - k) == doctest::Approx(-b * k).epsilon(1e-12));
        CHECK(gen.matrix().col(0).cwiseAbs().maxCoeff() < 1e-15);
    }
}

TEST_CASE("two-dimensional Galerkin generator is contractive on its sector") {
    const auto gen = build_ou_generator(DriftSpec(worked_drift()), 8);
    CHECK(gen.dim() == 45);
    CHECK(gen.psi() == doctest::Approx(pi / 4).epsilon(1e-10));
    CHECK(gen.sector_K() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(gen.sector_kappa() == doctest::Approx(0.0));
    CHECK(gen.matrix().col(0).cwiseAbs().maxCoeff() < 1e-14);
    for (double arg : {pi / 4 - 0.01, -(pi / 4 - 0.01)}) {
        for (double r : {0.05, 0.5, 2.0, 6.0}) {
            CHECK(spectral_norm(semigroup_matrix(gen, std::polar(r, arg))) <= 1.0 + 1e-9);
        }
    }
    // Galerkin nodes carry an orthonormal basis.
    const auto& nd = gen.nodes();
    const Eigen::MatrixXd gram = nd.basis_values.transpose() * nd.weights.asDiagonal() * nd.basis_values;
    CHECK((gram - Eigen::MatrixXd::Identity(45, 45)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("Galerkin builder errors") {
    OUBuildOptions small;
    small.max_dim = 20;
    CHECK(kind_of([&] { (void)build_ou_generator(DriftSpec(worked_drift()), 8, small); }) == ErrorKind::basis_overflow);
    Eigen::MatrixXd unstable(2, 2);
    unstable << 0.1, 0, 0, -1;
    CHECK(kind_of([&] { (void)build_ou_generator(DriftSpec(unstable), 4); }) == ErrorKind::unstable_drift);
}

TEST_CASE("semigroup action") {
    const auto heat = build_heat_generator(6, 2.0);
    const Eigen::VectorXd u = Eigen::VectorXd::LinSpaced(6, 1.0, 2.0);
    CHECK(semigroup_apply(heat, 0.0, u) == u);
    const Eigen::VectorXd e3 = Eigen::VectorXd::Unit(6, 2);
    const double rate = std::pow(3 * pi / 2.0, 2);
    CHECK((semigroup_apply(heat, 0.1, e3) - std::exp(-rate * 0.1) * e3).norm() < 1e-15);
    const auto ou = build_ou_generator(DriftSpec(worked_drift()), 5);
    const Eigen::VectorXd v = Eigen::VectorXd::Ones(ou.dim());
    const Eigen::VectorXd lhs = semigroup_apply(ou, 0.7, v);
    const Eigen::VectorXd rhs = semigroup_apply(ou, 0.3, semigroup_apply(ou, 0.4, v));
    CHECK((lhs - rhs).norm() <= 1e-10 * v.norm());
    CHECK(kind_of([&] { (void)semigroup_apply(ou, 0.1, u); }) == ErrorKind::dimension_mismatch);
}

TEST_CASE("fractional norms on the heat generator") {
    const auto heat = build_heat_generator(5, pi);
    const Eigen::VectorXd u = Eigen::VectorXd::LinSpaced(5, -1.0, 3.0);
    CHECK(fractional_norm(heat, 0.0, u) == u.norm());
    for (int k = 1; k <= 5; ++k) {
        const Eigen::VectorXd ek = Eigen::VectorXd::Unit(5, k - 1);
        for (double eps : {0.25, 0.5, 0.9}) {
            CHECK(fractional_norm(heat, eps, ek) == doctest::Approx(std::pow(k * k, eps)).epsilon(1e-13));
            // Larger order dominates on eigenvectors (eigenvalues >= 1 here).
            CHECK(fractional_norm(heat, eps, ek) <= fractional_norm(heat, std::min(1.0, eps + 0.1), ek) + 1e-15);
        }
    }
    CHECK(fractional_norm(heat, 1.0, u) == doctest::Approx((heat.matrix() * u).norm()));
}

TEST_CASE("negative fractional powers match the Gamma-integral definition") {
    const auto heat = build_heat_generator(4, pi);
    const auto ou = build_ou_generator(DriftSpec(Eigen::MatrixXd::Constant(1, 1, -0.7)), 4);
    const Eigen::VectorXd vh = Eigen::VectorXd::LinSpaced(4, 1.0, -2.0);
    const Eigen::VectorXd vo = Eigen::VectorXd::LinSpaced(5, 0.5, 1.5);
    for (double eps : {0.25, 0.5, 0.75}) {
        const Eigen::VectorXd h = fractional_power(heat, -eps) * vh;
        CHECK((h - oracle::negative_power_apply(heat.matrix(), heat.lambda_shift(), eps, vh)).norm() <= 1e-6);
        const Eigen::VectorXd o = fractional_power(ou, -eps) * vo;
        CHECK((o - oracle::negative_power_apply(ou.matrix(), ou.lambda_shift(), eps, vo)).norm() <= 1e-6);
    }
}

TEST_CASE("fractional power composition law") {
    const auto ou = build_ou_generator(DriftSpec(worked_drift()), 4);
    const Eigen::VectorXd u = Eigen::VectorXd::LinSpaced(ou.dim(), -1.0, 1.0);
    for (auto [a, b] : {std::pair{0.2, 0.3}, std::pair{0.5, 0.5}, std::pair{0.1, 0.75}}) {
        const Eigen::VectorXd lhs = fractional_power(ou, a) * (fractional_power(ou, b) * u);
        CHECK((lhs - fractional_power(ou, a + b) * u).norm() <= 1e-8 * u.norm());
    }
    CHECK(kind_of([&] { (void)fractional_power(ou, 1.5); }) == ErrorKind::invalid_argument);
}

TEST_CASE("smoothing constant estimates") {
    const auto heat = build_heat_generator(16, pi);
    std::vector<double> coarse, fine;
    for (int i = 1; i <= 20; ++i) coarse.push_back(i * 0.05);
    for (int i = 1; i <= 200; ++i) fine.push_back(i * 0.005);
    for (double alpha : {0.25, 0.5, 1.0}) {
        const double c = smoothing_constant(heat, alpha, coarse);
        const double f = smoothing_constant(heat, alpha, fine);
        CHECK(f <= std::pow(alpha / std::numbers::e, alpha) + 1e-9);
        CHECK(f >= c);
    }
    CHECK(smoothing_constant(heat, 1e-9, coarse) <= heat.sector_K() + 1e-6);
}

TEST_CASE("defective matrices take the Schur route") {
    const auto gen = jordan_generator({});
    CHECK(gen.spectral().condition > 1e8);
    for (double t : {0.1, 1.0, 3.0}) {
        Eigen::MatrixXd exact(2, 2);
        exact << 1, t, 0, 1;
        exact *= std::exp(-t);
        CHECK((semigroup_matrix(gen, t) - exact).cwiseAbs().maxCoeff() < 1e-13);
    }
    // (λ - A) = 2I - N with N² = 0, so its square root is √2 (I - N/4).
    Eigen::MatrixXd root(2, 2);
    root << 1, -0.25, 0, 1;
    root *= std::sqrt(2.0);
    CHECK((fractional_power(gen, 0.5) - root).cwiseAbs().maxCoeff() < 1e-12);
    const auto strict = jordan_generator({1e8, false});
    CHECK(kind_of([&] { (void)fractional_power(strict, 0.5); }) == ErrorKind::ill_conditioned_spectrum);
}

TEST_CASE("Schur route agrees with the eigen route") {
    const auto ou = build_ou_generator(DriftSpec(worked_drift()), 4);
    DiscreteGenerator::Parts parts;
    parts.matrix = ou.matrix();
    parts.psi = ou.psi();
    parts.lambda_shift = ou.lambda_shift();
    parts.spectral.condition_bound = 0.5;
    const DiscreteGenerator forced(std::move(parts));
    CHECK((semigroup_matrix(forced, 0.6) - semigroup_matrix(ou, 0.6)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((fractional_power(forced, 0.4) - fractional_power(ou, 0.4)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((semigroup_matrix(forced, std::complex<double>(0.5, 0.3)) - semigroup_matrix(ou, std::complex<double>(0.5, 0.3)))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
}

TEST_CASE("spectral cache is built once across threads") {
    const auto gen = build_ou_generator(DriftSpec(worked_drift()), 6);
    std::vector<const SpectralCache*> seen(8);
    {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < seen.size(); ++i) pool.emplace_back([&, i] { seen[i] = &gen.spectral(); });
    }
    for (auto* p : seen) CHECK(p == seen.front());
    const DiscreteGenerator copy = gen;
    CHECK(&copy.spectral() == seen.front());
}

TEST_CASE("sector fit on a scaled generator recovers the growth rate") {
    const Eigen::MatrixXd a = Eigen::Vector2d(0.5, -1.0).asDiagonal();
    const auto fit = fit_sector_constants(a, pi / 2);
    CHECK(fit.kappa > 0.0);
    for (double r : {0.5, 2.0, 4.0}) CHECK(std::exp(0.5 * r) <= fit.K * std::exp(fit.kappa * r) * (1 + 1e-12));
}

}
