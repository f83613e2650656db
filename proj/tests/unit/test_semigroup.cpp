#include "logstab/errors.hpp"
#include "logstab/harness.hpp"
#include "logstab/semigroup.hpp"

#include "oracles.hpp"

#include <boost/math/quadrature/sinh_sinh.hpp>
#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>
#include <random>

using namespace logstab;
using namespace logstab::semigroup;
using std::numbers::pi;

namespace {

operators::DriftSpec scalar(double b) { return operators::DriftSpec(Eigen::MatrixXd::Constant(1, 1, b)); }

operators::DriftSpec worked() {
    Eigen::MatrixXd b(2, 2);
    b << -1, 2, 0, -1;
    return operators::DriftSpec(b);
}

Eigen::VectorXd point(std::initializer_list<double> v) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double c : v) x(i++) = c;
    return x;
}

// Degree <= 4 polynomials in one or two variables.
std::vector<ScalarField> polynomials() {
    return {
        named_test_function("one"),
        named_test_function("x1"),
        named_test_function("x1sq"),
        named_test_function("poly4"),
        [](const Eigen::VectorXd& x) { return x.size() > 1 ? x(0) * x(1) * x(1) - x(1) : std::pow(x(0), 3); },
    };
}

} // namespace

TEST_SUITE("semigroup") {

TEST_CASE("time-dependent gramian closed forms") {
    const OUModel s(scalar(-0.5), 10);
    CHECK(gramian_t(s, 0.0)(0, 0) == 0.0);
    for (double t : {1e-6, 0.1, 1.0, 7.0}) CHECK(gramian_t(s, t)(0, 0) == doctest::Approx(-std::expm1(-t)).epsilon(1e-13));
    const OUModel m(worked(), 10);
    const Eigen::MatrixXd& qinf = m.gramian().q_inf;
    for (double t : {0.05, 0.3, 1.0, 4.0}) {
        // Q_t = Q_∞ - e^{tB} Q_∞ e^{tBᵀ}.
        const Eigen::MatrixXd e = (t * m.spec().drift()).exp();
        CHECK((gramian_t(m, t) - (qinf - e * qinf * e.transpose())).cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK((gramian_t(m, 50.0) - qinf).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("time-dependent gramian is monotone in the semidefinite order") {
    const OUModel m(worked(), 10);
    Eigen::MatrixXd prev = Eigen::MatrixXd::Zero(2, 2);
    for (double t = 0.05; t < 10.0; t *= 1.5) {
        const Eigen::MatrixXd q = gramian_t(m, t);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q - prev);
        CHECK(es.eigenvalues().minCoeff() >= -1e-12);
        prev = q;
    }
}

TEST_CASE("Kolmogorov formula on simple fields") {
    const OUModel s(scalar(-0.5), 40);
    const auto one = named_test_function("one");
    const auto lin = named_test_function("x1");
    for (double t : {0.1, 1.0, 5.0}) {
        for (double x : {-2.0, 0.0, 1.5}) {
            CHECK(std::abs(kolmogorov_apply(s, t, one, point({x})) - 1.0) <= 1e-10);
            CHECK(kolmogorov_apply(s, t, lin, point({x})) == doctest::Approx(std::exp(-t / 2) * x).epsilon(1e-12));
        }
    }
    const OUModel m(worked(), 20);
    CHECK(std::abs(kolmogorov_apply(m, 0.4, one, point({0.3, -2.0})) - 1.0) <= 1e-10);
}

TEST_CASE("Kolmogorov formula matches direct integration in one dimension") {
    const OUModel s(scalar(-0.8), 40);
    const auto cosine = named_test_function("cos");
    const auto gauss = named_test_function("gauss");
    for (double t : {0.2, 1.0}) {
        for (double x : {-1.0, 0.5, 2.5}) {
            const double ref_c = oracle::kolmogorov_1d(-0.8, t, [](double y) { return std::cos(y); }, x);
            const double ref_g = oracle::kolmogorov_1d(-0.8, t, [](double y) { return std::exp(-0.125 * y * y); }, x);
            CHECK(std::abs(kolmogorov_apply(s, t, cosine, point({x})) - ref_c) < 1e-10);
            CHECK(std::abs(kolmogorov_apply(s, t, gauss, point({x})) - ref_g) < 1e-10);
        }
    }
}

TEST_CASE("Kolmogorov formula reports a singular gramian") {
    const OUModel m(worked(), 8);
    try {
        (void)kolmogorov_apply(m, 1e-150, named_test_function("one"), point({0.0, 0.0}));
        FAIL("expected singular-gramian");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::singular_gramian);
    }
    CHECK_THROWS_AS((void)kolmogorov_apply(m, 0.0, named_test_function("one"), point({0.0, 0.0})), Error);
    CHECK_THROWS_AS((void)kolmogorov_apply(m, 1.0, named_test_function("one"), point({0.0})), Error);
}

TEST_CASE("semigroup law through the kernel") {
    const OUModel m(worked(), 16);
    const auto f = named_test_function("poly4");
    for (const auto& x : {point({0.2, -0.4}), point({1.0, 1.0})}) {
        const ScalarField inner = [&](const Eigen::VectorXd& y) { return kolmogorov_apply(m, 0.25, f, y); };
        CHECK(std::abs(kolmogorov_apply(m, 0.5, inner, x) - kolmogorov_apply(m, 0.75, f, x)) <= 1e-6);
    }
}

TEST_CASE("invariant density") {
    const OUModel s(scalar(-0.5), 40);
    CHECK(invariant_density(s, point({0.0})) == doctest::Approx(1.0 / std::sqrt(4 * pi)).epsilon(1e-15));
    CHECK(invariant_density(s, point({1.3})) ==
          doctest::Approx(std::exp(-1.3 * 1.3 / 4) / std::sqrt(4 * pi)).epsilon(1e-14));
    boost::math::quadrature::sinh_sinh<double> ss;
    const double mass = ss.integrate([&](double x) { return invariant_density(s, point({x})); }, 1e-14);
    CHECK(std::abs(mass - 1.0) <= 1e-10);
    const OUModel m(worked(), 20);
    const auto one = named_test_function("one");
    CHECK(std::abs(integrate_invariant(m, one) - 1.0) <= 1e-12);
    const ScalarField second = [](const Eigen::VectorXd& x) { return x(0) * x(1); };
    CHECK(integrate_invariant(m, second) == doctest::Approx(2.0 * m.gramian().q_inf(0, 1)).epsilon(1e-12));
}

TEST_CASE("invariance of the mean under the flow") {
    for (const auto& spec : {scalar(-0.5), worked()}) {
        const OUModel m(spec, 20);
        auto fields = polynomials();
        fields.push_back(named_test_function("gauss"));
        for (const auto& f : fields) {
            const double base = integrate_invariant(m, f);
            for (double t : {0.1, 1.0}) {
                const ScalarField tf = [&](const Eigen::VectorXd& x) { return kolmogorov_apply(m, t, f, x); };
                CHECK(std::abs(integrate_invariant(m, tf) - base) <= 1e-8 * std::max(1.0, std::abs(base)));
            }
        }
    }
}

TEST_CASE("Kolmogorov formula agrees with the Galerkin semigroup") {
    for (const auto& spec : {scalar(-0.5), worked()}) {
        const auto gen = operators::build_ou_generator(spec, 6);
        const OUModel m(spec, 16);
        for (const auto& f : polynomials()) {
            const Eigen::VectorXd c = project(*gen.ou(), f);
            for (double t : {0.1, 0.5, 1.0}) {
                const Eigen::VectorXd evolved = operators::semigroup_apply(gen, t, c);
                const ScalarField d2 = [&](const Eigen::VectorXd& x) {
                    const double d = kolmogorov_apply(m, t, f, x) - evaluate(*gen.ou(), evolved, x);
                    return d * d;
                };
                const ScalarField r2 = [&](const Eigen::VectorXd& x) { return std::pow(kolmogorov_apply(m, t, f, x), 2); };
                CHECK(std::sqrt(integrate_invariant(m, d2) / integrate_invariant(m, r2)) <= 1e-4);
            }
        }
    }
}

TEST_CASE("projection and evaluation round trip on polynomials") {
    const auto gen = operators::build_ou_generator(worked(), 4);
    const auto f = named_test_function("poly4");
    const Eigen::VectorXd c = project(*gen.ou(), f);
    for (const auto& x : {point({0.0, 0.0}), point({1.5, -0.7}), point({-3.0, 2.0})}) {
        CHECK(evaluate(*gen.ou(), c, x) == doctest::Approx(f(x)).epsilon(1e-11));
    }
}

TEST_CASE("weighted Sobolev norm closed forms") {
    const OUModel s(scalar(-0.5), 40);
    const auto gauss = named_test_function("gauss");
    // f e^{-x²/8} = e^{-x²/4}: ‖·‖² = √(2π) at order 0 and 1.25 √(2π) at order 1.
    CHECK(weighted_sobolev_norm(s, 0.0, gauss, 30) == doctest::Approx(std::sqrt(std::sqrt(2 * pi))).epsilon(1e-10));
    CHECK(weighted_sobolev_norm(s, 1.0, gauss, 30) == doctest::Approx(std::sqrt(2.5 * std::sqrt(pi / 2))).epsilon(1e-10));
    // Constant field: ∫ e^{-¼⟨Q_∞^{-1}x,x⟩} dx = (4π)^{N/2} √det Q_∞, the density normalization.
    const OUModel m(worked(), 30);
    const double flat = weighted_sobolev_norm(m, 0.0, named_test_function("one"), 0);
    CHECK(flat * flat == doctest::Approx(4 * pi * std::sqrt(m.gramian().q_inf.determinant())).epsilon(1e-12));
    CHECK_THROWS_AS((void)weighted_sobolev_norm(m, -0.1, named_test_function("one")), Error);
}

TEST_CASE("weighted Sobolev norm grows with the order and the weight switch matters") {
    const OUModel m(worked(), 30);
    const auto f = named_test_function("poly4");
    double prev = 0.0;
    for (double s : {0.0, 0.5, 1.0, 2.0}) {
        const double v = weighted_sobolev_norm(m, s, f, 4);
        CHECK(v > prev);
        prev = v;
    }
    const double a = weighted_sobolev_norm(m, 0.5, f, 4, SobolevWeight::inverse_gramian);
    const double b = weighted_sobolev_norm(m, 0.5, f, 4, SobolevWeight::squared_gramian);
    CHECK(std::abs(a - b) > 1e-3 * a);
    const OUModel unit(scalar(-0.5), 30);
    CHECK(weighted_sobolev_norm(unit, 0.5, f, 4, SobolevWeight::inverse_gramian) ==
          doctest::Approx(weighted_sobolev_norm(unit, 0.5, f, 4, SobolevWeight::squared_gramian)).epsilon(1e-12));
}

TEST_CASE("coefficient and field forms of the Sobolev norm agree") {
    const auto gen = operators::build_ou_generator(worked(), 4);
    const OUModel m(worked(), 30);
    const Eigen::VectorXd c = Eigen::VectorXd::LinSpaced(gen.dim(), 1.0, -0.5);
    const ScalarField field = [&](const Eigen::VectorXd& x) { return evaluate(*gen.ou(), c, x); };
    CHECK(weighted_sobolev_norm(m, 0.8, gen, c) == doctest::Approx(weighted_sobolev_norm(m, 0.8, field, 4)).epsilon(1e-12));
}

TEST_CASE("Sobolev norm of order 2 eps is equivalent to the fractional norm of order eps") {
    const auto spec = scalar(-0.5);
    const auto gen = operators::build_ou_generator(spec, 8);
    const OUModel m(spec, 30);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal;
    for (double eps : {0.25, 0.5}) {
        double lo = 1e300, hi = 0.0;
        for (int i = 0; i < 40; ++i) {
            Eigen::VectorXd c(gen.dim());
            for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = normal(rng);
            const double ratio = weighted_sobolev_norm(m, 2 * eps, gen, c) / operators::fractional_norm(gen, eps, c);
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        MESSAGE("eps " << eps << ": equivalence constant " << std::max(hi, 1.0 / lo));
        CHECK(lo > 0.0);
        CHECK(std::isfinite(hi));
        CHECK(hi / lo < 20.0);
    }
}

TEST_CASE("unknown test function names are rejected") {
    CHECK_THROWS_AS((void)named_test_function("sin"), Error);
}

}
