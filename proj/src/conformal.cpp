#include "logstab/conformal.hpp"

#include "logstab/errors.hpp"
#include "logstab/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace logstab::conformal {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kRootBudget = 400;

void require_segment(double x, const StripGeometry& geom, const char* what) {
    detail::require(x > 0.0 && x <= geom.theta(),
                    std::string(what) + " must lie in (0, theta], got " + std::to_string(x));
}

} // namespace

AngleConstants angle_constants(double psi) {
    detail::require(psi > 0.0 && psi <= kPi / 2.0, "angle must lie in (0, pi/2], got " + std::to_string(psi));
    const double phi = kPi / (2.0 * psi);
    const double c_psi = (2.0 / kPi) * std::pow(psi / std::sin(psi), phi);
    return {phi, c_psi};
}

StripGeometry::StripGeometry(double theta, double psi) : theta_(theta), psi_(psi) {
    detail::require(theta > 0.0 && std::isfinite(theta), "final time must be > 0");
    const auto constants = angle_constants(psi);
    phi_ = constants.phi;
    c_psi_ = constants.c_psi;
    sc_exponent_ = psi / kPi;
}

double boundary_map_h(double x, const StripGeometry& geom) {
    require_segment(x, geom, "boundary map argument");
    const double theta = geom.theta();
    if (x == theta) return theta;
    const double s = std::sin(kPi * x / (2.0 * theta));
    const double beta = specfun::beta_inc(specfun::BetaArgs(geom.sc_exponent(), std::min(1.0, s * s)));
    return theta * std::sin(geom.psi()) / kPi * beta;
}

double boundary_map_upper_bound(double x, const StripGeometry& geom) {
    require_segment(x, geom, "boundary map argument");
    const double a = geom.sc_exponent();
    const double psi = geom.psi();
    return std::pow(geom.theta(), 1.0 - 2.0 * a) * (std::sin(psi) / psi) * std::pow(kPi, 2.0 * a) /
           std::pow(4.0, a) * std::pow(x, 2.0 * a);
}

double default_w_tolerance(const StripGeometry& geom) { return 1e-12 * geom.theta(); }

double w_real(double t, const StripGeometry& geom, double tol) {
    require_segment(t, geom, "time");
    detail::require(tol > 0.0, "root-finder tolerance must be > 0");
    const double theta = geom.theta();
    if (t == theta) return 1.0;

    // f(x) = h(x) - t changes sign on [0, θ]: h(0) = 0 < t < θ = h(θ).
    double lo = 0.0;
    double hi = theta;
    double f_lo = -t;
    double f_hi = theta - t;
    for (int iter = 0; iter < kRootBudget; ++iter) {
        // Converged once the bracket is narrow in x and the residual is small in t;
        // near 0 the map is steep, so the second condition can take longer.
        const double resid = std::min(-f_lo, f_hi);
        const double best = f_hi < -f_lo ? hi : lo;
        if (hi - lo <= tol && resid <= tol) return best / theta;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) return best / theta;
        const double width = hi - lo;
        double x = lo - f_lo * (hi - lo) / (f_hi - f_lo);
        // Secant step only when it lands well inside the bracket; otherwise bisect.
        if (!(x > lo + 0.01 * width && x < hi - 0.01 * width)) x = 0.5 * (lo + hi);
        const double fx = boundary_map_h(x, geom) - t;
        if (fx == 0.0) return x / theta;
        if (fx < 0.0) {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
            f_hi = fx;
        }
        // Force a bisection if the secant step only trimmed one side slightly.
        if (hi - lo > 0.5 * width) {
            const double mid = 0.5 * (lo + hi);
            const double fm = boundary_map_h(mid, geom) - t;
            if (fm == 0.0) return mid / theta;
            if (fm < 0.0) {
                lo = mid;
                f_lo = fm;
            } else {
                hi = mid;
                f_hi = fm;
            }
        }
    }
    detail::fail(ErrorKind::no_convergence, "w_real bracket did not close to tolerance " + std::to_string(tol));
}

double w_real(double t, const StripGeometry& geom) { return w_real(t, geom, default_w_tolerance(geom)); }

double w_lower_bound(double t, const StripGeometry& geom) {
    require_segment(t, geom, "time");
    return geom.c_psi() * std::pow(t / geom.theta(), geom.phi());
}

} // namespace logstab::conformal
