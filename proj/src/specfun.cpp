#include "logstab/specfun.hpp"

#include "logstab/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace logstab::specfun {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 1000;

// Σ_{n>=0} x^n / (a (a+1) ... (a+n)); γ(a, x) = x^a e^{-x} times this.
double lower_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int n = 0; n < kMaxIter; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) return sum;
    }
    detail::fail(ErrorKind::no_convergence, "incomplete gamma series");
}

// Continued fraction for Γ(a, x) e^{x} x^{-a}, modified Lentz. Used for x >= a + 1.
double upper_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    detail::fail(ErrorKind::no_convergence, "incomplete gamma continued fraction");
}

// Γ(a, x) for 0 < a <= 1, 0 < x < a + 1 without forming Γ(a) - γ(a, x):
//   Γ(a, x) = (Γ(1+a) - 1)/a - (x^a - 1)/a - x^a Σ_{n>=1} (-x)^n / (n! (a+n)).
double upper_small_shape(double a, double x) {
    const double gam1pm1 = std::expm1(std::lgamma(1.0 + a));
    const double xa_m1 = std::expm1(a * std::log(x));
    double tail = 0.0;
    double pw = 1.0;
    for (int n = 1; n < kMaxIter; ++n) {
        pw *= -x / n;
        const double term = pw / (a + n);
        tail += term;
        if (std::abs(term) < std::abs(tail) * kEps) break;
    }
    return (gam1pm1 - xa_m1) / a - (xa_m1 + 1.0) * tail;
}

// Continued fraction for B_x(a, b) (x^a (1-x)^b / a)^{-1}; converges for x < (a+1)/(a+b+2).
double beta_fraction(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m < kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    detail::fail(ErrorKind::no_convergence, "incomplete beta continued fraction");
}

} // namespace

GammaArgs::GammaArgs(double a, double x) : a_(a), x_(x) {
    detail::require(a > 0.0 && std::isfinite(a), "gamma shape must be > 0, got " + std::to_string(a));
    detail::require(x >= 0.0 && !std::isnan(x), "gamma argument must be >= 0, got " + std::to_string(x));
}

BetaArgs::BetaArgs(double a, double x) : a_(a), x_(x) {
    detail::require(a > 0.0 && a < 1.0, "beta parameter must lie in (0,1), got " + std::to_string(a));
    detail::require(x >= 0.0 && x <= 1.0, "beta limit must lie in [0,1], got " + std::to_string(x));
}

double gamma_upper(const GammaArgs& args) {
    const double a = args.a();
    const double x = args.x();
    if (x == 0.0) return std::tgamma(a);
    if (x >= a + 1.0) {
        return std::exp(-x + a * std::log(x)) * upper_fraction(a, x);
    }
    if (a <= 1.0) return upper_small_shape(a, x);
    const double p = std::exp(-x + a * std::log(x) - std::lgamma(a)) * lower_series(a, x);
    return std::tgamma(a) * (1.0 - p);
}

double gamma_lower(const GammaArgs& args) {
    const double a = args.a();
    const double x = args.x();
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return std::exp(-x + a * std::log(x)) * lower_series(a, x);
    return std::tgamma(a) - gamma_upper(args);
}

double gamma_lower_scaled(const GammaArgs& args) {
    const double a = args.a();
    const double x = args.x();
    if (x == 0.0) return 1.0 / a;
    if (x < a + 1.0) return std::exp(-x) * lower_series(a, x);
    const double q = std::exp(-x + a * std::log(x) - std::lgamma(a)) * upper_fraction(a, x);
    return std::exp(std::lgamma(a) - a * std::log(x)) * (1.0 - q);
}

double gamma_q(const GammaArgs& args) {
    const double a = args.a();
    const double x = args.x();
    if (x == 0.0) return 1.0;
    if (x >= a + 1.0) {
        return std::exp(-x + a * std::log(x) - std::lgamma(a)) * upper_fraction(a, x);
    }
    return gamma_upper(args) / std::tgamma(a);
}

double beta_complete(double a) {
    detail::require(a > 0.0 && a < 1.0, "beta parameter must lie in (0,1)");
    return std::numbers::pi / std::sin(std::numbers::pi * a);
}

double beta_inc(const BetaArgs& args) {
    const double a = args.a();
    const double b = args.b();
    const double x = args.x();
    if (x == 0.0) return 0.0;
    if (x == 1.0) return beta_complete(a);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return std::exp(a * std::log(x) + b * std::log1p(-x)) * beta_fraction(a, b, x) / a;
    }
    const double tail = std::exp(b * std::log1p(-x) + a * std::log(x)) * beta_fraction(b, a, 1.0 - x) / b;
    return beta_complete(a) - tail;
}

double beta_lower_residual(const BetaArgs& args) {
    const double a = args.a();
    const double x = args.x();
    detail::require(a <= 0.5, "inequality only holds for a <= 1/2, got " + std::to_string(a));
    detail::require(x > 0.0, "inequality requires x > 0");
    const double rhs = std::pow(1.0 / x - 1.0, 0.5 - a) * std::asin(std::sqrt(x));
    return a * beta_inc(args) - rhs;
}

} // namespace logstab::specfun
