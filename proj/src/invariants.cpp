#include "logstab/invariants.hpp"

#include "logstab/conformal.hpp"
#include "logstab/harness.hpp"
#include "logstab/operators.hpp"
#include "logstab/semigroup.hpp"
#include "logstab/specfun.hpp"
#include "logstab/stability.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

namespace logstab::invariants {

namespace {

using std::numbers::pi;

struct Outcome {
    bool passed;
    std::string detail;
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

Outcome check_max(double worst, double tol, const std::string& what) {
    return {worst <= tol, what + " " + fmt(worst) + " (tol " + fmt(tol) + ")"};
}

Outcome beta_reflection() {
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double a = 0.02 + 0.96 * i / 49.0;
        worst = std::max(worst, std::abs(specfun::beta_inc({a, 1.0}) * std::sin(pi * a) - pi));
    }
    return check_max(worst, 1e-10, "max |B(a,1-a) sin(pi a) - pi|");
}

Outcome beta_inequality() {
    double lowest = 0.0;
    for (int i = 1; i <= 50; ++i) {
        for (int j = 1; j <= 50; ++j) {
            lowest = std::min(lowest, specfun::beta_lower_residual({0.5 * i / 50.0, j / 50.0}));
        }
    }
    return {lowest >= -1e-10, "min residual " + fmt(lowest)};
}

Outcome gamma_derivative() {
    double worst = 0.0;
    for (double a : {0.3, 1.0, 2.5, 5.0, 9.0}) {
        for (double x : {0.2, 1.0, 3.0, 10.0, 30.0}) {
            // Γ(a,x) = Γ(a) - γ(a,x); difference whichever part is small to avoid cancellation.
            const double h = 1e-4 * std::min(1.0, x);
            const auto part = [&](double y) {
                return x < a ? -specfun::gamma_lower({a, y}) : specfun::gamma_upper({a, y});
            };
            const double fd = (part(x + h) - part(x - h)) / (2 * h);
            const double exact = -std::pow(x, a - 1.0) * std::exp(-x);
            worst = std::max(worst, std::abs(fd - exact) / std::abs(exact));
        }
    }
    return check_max(worst, 1e-6, "max relative error");
}

Outcome beta_derivative() {
    double worst = 0.0;
    for (double a : {0.1, 0.25, 0.5, 0.75, 0.9}) {
        for (double x : {0.05, 0.2, 0.5, 0.8, 0.95}) {
            const double h = 1e-5 * std::min(x, 1 - x);
            const double fd = (specfun::beta_inc({a, x + h}) - specfun::beta_inc({a, x - h})) / (2 * h);
            const double exact = std::pow(x, a - 1.0) * std::pow(1.0 - x, -a);
            worst = std::max(worst, std::abs(fd - exact) / exact);
        }
    }
    return check_max(worst, 1e-6, "max relative error");
}

Outcome conformal_bounds() {
    double below = 0.0, above = 0.0, right = 0.0;
    for (double psi : {pi / 12, pi / 6, pi / 4, pi / 3, 5 * pi / 12, pi / 2}) {
        const conformal::StripGeometry geom(1.0, psi);
        double prev = 0.0;
        for (int i = 1; i <= 200; ++i) {
            const double t = i / 200.0;
            const double w = conformal::w_real(t, geom);
            below = std::max(below, conformal::w_lower_bound(t, geom) - w);
            above = std::max(above, conformal::boundary_map_h(t, geom) - conformal::boundary_map_upper_bound(t, geom));
            if (psi == pi / 2) right = std::max(right, std::abs(w - t));
            if (w < prev) return {false, "w not increasing at psi " + fmt(psi)};
            prev = w;
        }
    }
    const bool ok = below <= 1e-9 && above <= 1e-12 && right <= 1e-10;
    return {ok, "lower-bound excess " + fmt(below) + ", h excess " + fmt(above) + ", right-angle error " + fmt(right)};
}

Outcome angle_example() {
    Eigen::MatrixXd b(2, 2);
    b << -1, 2, 0, -1;
    const auto rep = operators::analyticity(operators::DriftSpec(b));
    Eigen::MatrixXd q(2, 2);
    q << 1.5, 0.5, 0.5, 0.5;
    const double dq = (rep.gramian.q_inf - q).cwiseAbs().maxCoeff();
    const double dpsi = std::abs(rep.psi - pi / 4);
    return {dpsi <= 1e-10 && dq <= 1e-12, "angle error " + fmt(dpsi) + ", gramian error " + fmt(dq)};
}

Outcome lyapunov_random() {
    std::mt19937_64 rng(7);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const operators::DriftSpec spec(harness::random_stable_drift(rng, 2 + i % 3));
        worst = std::max(worst, operators::lyapunov_residual(spec, operators::lyapunov_gramian(spec)));
    }
    return check_max(worst, 1e-10, "max relative residual");
}

Outcome self_adjoint_detection() {
    std::mt19937_64 rng(11);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const operators::DriftSpec spec(harness::random_symmetric_drift(rng, 2 + i % 3));
        const auto rep = operators::analyticity(spec);
        const Eigen::MatrixXd comm =
            rep.gramian.q_inf * spec.drift().transpose() - spec.drift() * rep.gramian.q_inf;
        if (comm.cwiseAbs().maxCoeff() > 1e-12) continue;
        worst = std::max(worst, std::abs(rep.psi - pi / 2));
    }
    return check_max(worst, 1e-10, "max |psi - pi/2|");
}

operators::DriftSpec worked_drift() {
    Eigen::MatrixXd b(2, 2);
    b << -1, 2, 0, -1;
    return operators::DriftSpec(b);
}

operators::DriftSpec scalar_drift() { return operators::DriftSpec(Eigen::MatrixXd::Constant(1, 1, -0.5)); }

Outcome markov_property() {
    const semigroup::OUModel model(worked_drift(), 20);
    const auto one = semigroup::named_test_function("one");
    double worst = 0.0;
    Eigen::VectorXd x(2);
    x << 0.7, -1.3;
    for (double t : {0.1, 1.0, 5.0}) worst = std::max(worst, std::abs(semigroup::kolmogorov_apply(model, t, one, x) - 1));
    return check_max(worst, 1e-10, "max |T(t)1 - 1|");
}

Outcome semigroup_law() {
    const semigroup::OUModel model(scalar_drift(), 40);
    const auto f = semigroup::named_test_function("poly4");
    double worst = 0.0;
    for (double x0 : {-1.0, 0.3, 2.0}) {
        const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, x0);
        const semigroup::ScalarField inner = [&](const Eigen::VectorXd& y) {
            return semigroup::kolmogorov_apply(model, 0.4, f, y);
        };
        const double lhs = semigroup::kolmogorov_apply(model, 0.3, inner, x);
        const double rhs = semigroup::kolmogorov_apply(model, 0.7, f, x);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return check_max(worst, 1e-6, "max |T(s)T(t)f - T(s+t)f|");
}

Outcome gramian_monotone() {
    const semigroup::OUModel model(worked_drift(), 10);
    double lowest = 0.0;
    Eigen::MatrixXd prev = Eigen::MatrixXd::Zero(2, 2);
    for (double t : {0.05, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0}) {
        const Eigen::MatrixXd q = semigroup::gramian_t(model, t);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q - prev);
        lowest = std::min(lowest, es.eigenvalues().minCoeff());
        prev = q;
    }
    return {lowest >= -1e-12, "min eigenvalue of increments " + fmt(lowest)};
}

Outcome invariance_identity() {
    const semigroup::OUModel model(worked_drift(), 20);
    double worst = 0.0;
    for (const char* name : {"x1", "x1sq", "poly4", "gauss"}) {
        const auto f = semigroup::named_test_function(name);
        const double base = semigroup::integrate_invariant(model, f);
        const semigroup::ScalarField tf = [&](const Eigen::VectorXd& x) {
            return semigroup::kolmogorov_apply(model, 0.5, f, x);
        };
        worst = std::max(worst, std::abs(semigroup::integrate_invariant(model, tf) - base) / std::max(1.0, std::abs(base)));
    }
    return check_max(worst, 1e-8, "max relative drift of the mean");
}

Outcome galerkin_agreement() {
    double worst = 0.0;
    for (const auto& spec : {scalar_drift(), worked_drift()}) {
        const auto gen = operators::build_ou_generator(spec, 6);
        const semigroup::OUModel model(spec, 16);
        const auto f = semigroup::named_test_function("poly4");
        const Eigen::VectorXd coeffs = semigroup::project(*gen.ou(), f);
        for (double t : {0.1, 0.5, 1.0}) {
            const Eigen::VectorXd evolved = operators::semigroup_apply(gen, t, coeffs);
            const semigroup::ScalarField diff2 = [&](const Eigen::VectorXd& x) {
                const double d = semigroup::kolmogorov_apply(model, t, f, x) - semigroup::evaluate(*gen.ou(), evolved, x);
                return d * d;
            };
            const semigroup::ScalarField ref2 = [&](const Eigen::VectorXd& x) {
                const double v = semigroup::kolmogorov_apply(model, t, f, x);
                return v * v;
            };
            worst = std::max(worst, std::sqrt(semigroup::integrate_invariant(model, diff2) /
                                              semigroup::integrate_invariant(model, ref2)));
        }
    }
    return check_max(worst, 1e-4, "max relative L2 discrepancy");
}

Outcome kernel_properties() {
    double prev = 1.0;
    for (int k = 1; k <= 12; ++k) {
        const double v = stability::gamma_kernel(std::pow(10.0, -k), 2.0, 1.0);
        if (!(v < prev && v > 0.0)) return {false, "kernel not decreasing at E = 1e-" + std::to_string(k)};
        prev = v;
    }
    double worst = 0.0;
    for (double c : {0.5, 1.0, 2.0}) {
        for (double e : {0.01, 0.3, 0.9}) {
            const double closed = (std::pow(e, c) - 1.0) / (c * std::log(e));
            worst = std::max(worst, std::abs(stability::gamma_kernel(e, 1.0, c) - closed));
        }
    }
    const double erf_value = std::sqrt(pi) / 2 * std::erf(1.0);
    worst = std::max(worst, std::abs(stability::gamma_kernel(std::exp(-1.0), 2.0, 1.0) - erf_value));
    return check_max(worst, 1e-12, "closed-form error");
}

Outcome simplified_dominates() {
    stability::StabilityParams params;
    const conformal::StripGeometry geom(1.0, pi / 4);
    double worst = -1e300;
    for (int i = 1; i <= 100; ++i) {
        const double obs = std::exp(-1.0 - 0.3 * i);
        const auto b = stability::stability_rhs(obs, params, geom, 1.0);
        worst = std::max(worst, b.exact - b.simplified);
    }
    return {worst <= 1e-15, "max exact - simplified " + fmt(worst)};
}

Outcome r_monotone() {
    for (double c : {0.5, 1.0, 2.0}) {
        for (double phi : {1.0, 1.5, 2.0, 3.0}) {
            for (double sigma : {0.5, 1.0, 2.0}) {
                const double top = std::min(1.0, 1.0 / sigma);
                std::vector<double> grid;
                for (int i = 1; i < 400; ++i) grid.push_back(top * i / 400.0);
                for (double d : stability::r_monotone_residuals(c, phi, sigma, grid)) {
                    const bool ok = sigma > 1 ? d >= -1e-9 : sigma < 1 ? d <= 1e-9 : d == 0.0;
                    if (!ok) return {false, "sign mismatch at c=" + fmt(c) + " phi=" + fmt(phi) + " sigma=" + fmt(sigma)};
                }
            }
        }
    }
    return {true, "36 grids"};
}

Outcome sampling(const SuiteOptions&) {
    const auto gen = operators::build_heat_generator(16, pi);
    const auto a = harness::sample_admissible(gen, 0.5, 2.0, 64, 99);
    const auto b = harness::sample_admissible(gen, 0.5, 2.0, 64, 99);
    double worst = 0.0;
    Eigen::MatrixXd stack(gen.dim(), 64);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return {false, "same seed produced different ensembles"};
        worst = std::max(worst, operators::fractional_norm(gen, 0.5, a[i]) - 2.0);
        stack.col(static_cast<Eigen::Index>(i)) = a[i];
    }
    const auto rank = Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(stack).rank();
    const bool ok = worst <= 1e-12 && rank >= gen.dim() - 1;
    return {ok, "max excess " + fmt(worst) + ", rank " + std::to_string(rank)};
}

Outcome logconvexity(const std::string& preset, const SuiteOptions& options) {
    auto config = harness::preset_config(preset);
    config.ensemble.threads = options.threads;
    if (options.quick) config.ensemble.count = 20;
    const auto report = harness::run_experiment(harness::ExperimentMode::logconvexity, config);
    const auto& s = report.summary;
    const bool ok = report.complete() && s.violations == 0 && harness::inconsistent_rows(report).empty();
    return {ok, std::to_string(s.violations) + " violations, " + std::to_string(s.surrogate_violations) +
                    " surrogate violations, max excess " + fmt(s.max_violation) + ", K " + fmt(s.K) + ", kappa " +
                    fmt(s.kappa)};
}

Outcome stability_experiment(const SuiteOptions& options) {
    auto config = harness::preset_config("ou-slabs");
    config.ensemble.threads = options.threads;
    if (options.quick) config.ensemble.count = 20;
    const auto report = harness::run_experiment(harness::ExperimentMode::stability, config);
    const auto& s = report.summary;
    const bool ok = report.complete() && s.cover_ok && s.kappa_obs && std::isfinite(*s.kappa_obs) &&
                    s.violations == 0 && s.admissibility_violations == 0 && s.empirical_K1 &&
                    std::isfinite(*s.empirical_K1) && s.k1_spread && *s.k1_spread <= 10.0 && s.kernel_monotone &&
                    harness::inconsistent_rows(report).empty();
    return {ok, "kappa_obs " + fmt(s.kappa_obs.value_or(NAN)) + ", K1 " + fmt(s.empirical_K1.value_or(NAN)) +
                    ", spread " + fmt(s.k1_spread.value_or(NAN)) + ", observability violations " +
                    std::to_string(s.violations)};
}

} // namespace

std::vector<CheckResult> run_invariant_suite(const SuiteOptions& options) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
        {"beta_reflection", beta_reflection},
        {"beta_lower_inequality", beta_inequality},
        {"gamma_derivative", gamma_derivative},
        {"beta_derivative", beta_derivative},
        {"harmonic_weight_bounds", conformal_bounds},
        {"angle_worked_example", angle_example},
        {"lyapunov_residual", lyapunov_random},
        {"self_adjoint_angle", self_adjoint_detection},
        {"markov_property", markov_property},
        {"semigroup_law", semigroup_law},
        {"gramian_monotone", gramian_monotone},
        {"invariance_identity", invariance_identity},
        {"kolmogorov_galerkin", galerkin_agreement},
        {"kernel_properties", kernel_properties},
        {"simplified_bound_dominates", simplified_dominates},
        {"ratio_monotone", r_monotone},
        {"admissible_sampling", [&] { return sampling(options); }},
        {"logconvexity_heat", [&] { return logconvexity("heat", options); }},
        {"logconvexity_ou", [&] { return logconvexity("ou", options); }},
        {"stability_ou_slabs", [&] { return stability_experiment(options); }},
    };
    std::vector<CheckResult> results;
    for (const auto& [name, fn] : checks) {
        CheckResult r;
        r.name = name;
        const auto start = std::chrono::steady_clock::now();
        try {
            const auto out = fn();
            r.passed = out.passed;
            r.detail = out.detail;
        } catch (const std::exception& e) {
            r.passed = false;
            r.detail = std::string("error: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        results.push_back(std::move(r));
    }
    return results;
}

} // namespace logstab::invariants
