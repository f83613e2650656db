#include "logstab/stability.hpp"

#include "logstab/errors.hpp"
#include "logstab/specfun.hpp"

#include <cmath>
#include <string>

namespace logstab::stability {

namespace {

// k(X) = γ(1/φ, X) / (X^{1/φ} φ); equals 1 at X = 0.
double kernel_of_argument(double x, double phi) {
    return specfun::gamma_lower_scaled(specfun::GammaArgs(1.0 / phi, x)) / phi;
}

void check_shape(double phi, double c) {
    detail::require(phi >= 1.0 && std::isfinite(phi), "kernel exponent phi must be >= 1");
    detail::require(c > 0.0 && std::isfinite(c), "kernel constant c must be > 0");
}

} // namespace

double StabilityParams::k0() const { return K * std::exp(kappa * theta); }

std::vector<Violation> validate_params(const StabilityParams& params) {
    std::vector<Violation> out;
    auto check = [&out](bool ok, const char* name, std::string message) {
        if (!ok) out.push_back({name, std::move(message)});
    };
    check(params.theta > 0.0, "theta", "final time must be > 0");
    check(params.eps > 0.0 && params.eps < 1.0, "eps", "eps must lie in (0, 1)");
    check(params.M > 0.0, "M", "admissible radius must be > 0");
    check(params.K >= 1.0, "K", "sector constant K must be >= 1");
    check(params.kappa >= 0.0, "kappa", "sector type kappa must be >= 0");
    check(params.kappa_obs > 0.0, "kappa_obs", "observability constant must be > 0");
    check(params.kappa_adm > 0.0, "kappa_adm", "admissibility constant must be > 0");
    if (params.eps > 0.0 && params.eps < 1.0) {
        const double p_max = 1.0 / (1.0 - params.eps);
        check(params.p > 1.0 && params.p < p_max, "p",
              "p = " + std::to_string(params.p) + " must lie in (1, " + std::to_string(p_max) + ")");
    }
    if (params.p > 0.0) {
        const double s_max = 1.0 - 1.0 / params.p;
        check(params.s > 0.0 && params.s < s_max, "s",
              "s = " + std::to_string(params.s) + " must lie in (0, " + std::to_string(s_max) + ")");
    }
    return out;
}

double logconvexity_bound(double t, double w_t, double M, double final_norm, double K, double kappa, double theta) {
    detail::require(M >= 0.0 && final_norm >= 0.0, "norms must be non-negative");
    detail::require(theta > 0.0 && t >= 0.0 && t <= theta, "time must lie in [0, theta]");
    detail::require(w_t >= 0.0 && w_t <= 1.0, "harmonic weight must lie in [0, 1]");
    detail::require(K > 0.0 && kappa >= 0.0, "sector constants must satisfy K > 0, kappa >= 0");
    return K * std::exp(kappa * (t - theta * w_t)) * std::pow(M, 1.0 - w_t) * std::pow(final_norm, w_t);
}

double gamma_kernel_log(double log_e, double phi, double c) {
    check_shape(phi, c);
    detail::require(log_e < 0.0, "kernel argument E must lie in (0, 1)");
    return kernel_of_argument(-c * log_e, phi);
}

double gamma_kernel(double E, double phi, double c) {
    detail::require(E > 0.0 && E < 1.0, "kernel argument E must lie in (0, 1), got " + std::to_string(E));
    return gamma_kernel_log(std::log(E), phi, c);
}

StabilityBound stability_rhs(double obs_norm, const StabilityParams& params, const conformal::StripGeometry& geom,
                             double K1) {
    detail::require(obs_norm > 0.0 && obs_norm < 1.0,
                    "observation norm must lie in (0, 1) (not sufficiently small), got " + std::to_string(obs_norm));
    const auto violations = validate_params(params);
    if (!violations.empty()) {
        detail::fail(ErrorKind::invalid_argument, "invalid stability parameter '" + violations.front().name + "': " +
                                                      violations.front().message);
    }
    detail::require(K1 > 0.0, "K1 must be > 0");
    const double phi = geom.phi();
    const double c = geom.c_psi() * params.p;
    const double x = -c * std::log(obs_norm);
    const double exponent = params.s / params.p;

    StabilityBound out{};
    out.kernel = gamma_kernel_log(std::log(obs_norm), phi, c);
    out.exact = K1 * std::pow(out.kernel, exponent);
    const double a = 1.0 / phi;
    const double simplified_kernel = std::exp(std::lgamma(a) - a * std::log(x)) / phi;
    out.simplified = K1 * std::pow(simplified_kernel, exponent);
    return out;
}

std::vector<double> r_monotone_residuals(double c, double phi, double sigma, std::span<const double> grid) {
    check_shape(phi, c);
    detail::require(sigma > 0.0, "sigma must be > 0");
    detail::require(grid.size() >= 2, "grid needs at least two points");
    const double upper = std::min(1.0, 1.0 / sigma);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        detail::require(grid[i] > 0.0 && grid[i] < upper, "grid point outside (0, min(1, 1/sigma))");
        if (i > 0) detail::require(grid[i] > grid[i - 1], "grid must be strictly increasing");
    }
    const double log_sigma = std::log(sigma);
    auto r = [&](double x) {
        const double lx = std::log(x);
        return kernel_of_argument(-c * (log_sigma + lx), phi) / kernel_of_argument(-c * lx, phi);
    };
    std::vector<double> out;
    out.reserve(grid.size() - 1);
    double prev = r(grid[0]);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double cur = r(grid[i]);
        out.push_back(cur - prev);
        prev = cur;
    }
    return out;
}

} // namespace logstab::stability
