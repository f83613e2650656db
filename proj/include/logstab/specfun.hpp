#pragma once

// Incomplete Gamma and Beta functions restricted to the parameter ranges the
// stability kernel and the boundary map need.

namespace logstab::specfun {

/// Shape a > 0, lower truncation x >= 0.
class GammaArgs {
public:
    GammaArgs(double a, double x);
    [[nodiscard]] double a() const noexcept { return a_; }
    [[nodiscard]] double x() const noexcept { return x_; }

private:
    double a_;
    double x_;
};

/// Symmetric Beta parameters (a, 1 - a) with 0 < a < 1 and upper limit x in [0, 1].
class BetaArgs {
public:
    BetaArgs(double a, double x);
    [[nodiscard]] double a() const noexcept { return a_; }
    [[nodiscard]] double b() const noexcept { return 1.0 - a_; }
    [[nodiscard]] double x() const noexcept { return x_; }

private:
    double a_;
    double x_;
};

/// Upper incomplete Gamma function Γ(a, x) = ∫_x^∞ t^{a-1} e^{-t} dt.
/// Γ(a, 0) is the complete Gamma function.
[[nodiscard]] double gamma_upper(const GammaArgs& args);

/// Lower incomplete Gamma function γ(a, x) = Γ(a) - Γ(a, x), evaluated
/// without the subtraction.
[[nodiscard]] double gamma_lower(const GammaArgs& args);

/// γ(a, x) / x^a. Finite at x = 0 (limit 1/a) and never overflows, so the
/// stability kernel can be formed for arguments far beyond exp's range.
[[nodiscard]] double gamma_lower_scaled(const GammaArgs& args);

/// Regularized upper function Q(a, x) = Γ(a, x) / Γ(a).
[[nodiscard]] double gamma_q(const GammaArgs& args);

/// B_x(a, 1 - a) = ∫_0^x t^{a-1} (1 - t)^{-a} dt.
[[nodiscard]] double beta_inc(const BetaArgs& args);

/// Complete value B(a, 1 - a) = π / sin(πa).
[[nodiscard]] double beta_complete(double a);

/// a·B_x(a, 1 - a) - (1/x - 1)^{1/2 - a}·arcsin(√x) for 0 < a <= 1/2, 0 < x <= 1.
/// Non-negative up to rounding.
[[nodiscard]] double beta_lower_residual(const BetaArgs& args);

} // namespace logstab::specfun
