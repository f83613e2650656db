#pragma once

// Harmonic weight w on the sector strip between the rays of angle ψ issued from
// 0 and from θ, evaluated on the real segment (0, θ] through the composition
// h = f ∘ g of the half-strip-to-half-plane map g(z) = θ sin²(πz / 2θ) and the
// Schwarz–Christoffel map f onto the upper half of the sector strip.

namespace logstab::conformal {

struct AngleConstants {
    double phi;   ///< π / (2ψ)
    double c_psi; ///< (2/π) (ψ / sin ψ)^{π/(2ψ)}
};

/// Throws invalid-argument unless 0 < psi <= π/2.
[[nodiscard]] AngleConstants angle_constants(double psi);

/// Final time θ and analyticity angle ψ with the two derived constants.
class StripGeometry {
public:
    StripGeometry(double theta, double psi);

    [[nodiscard]] double theta() const noexcept { return theta_; }
    [[nodiscard]] double psi() const noexcept { return psi_; }
    [[nodiscard]] double phi() const noexcept { return phi_; }
    [[nodiscard]] double c_psi() const noexcept { return c_psi_; }
    /// ψ / π, the Schwarz–Christoffel exponent.
    [[nodiscard]] double sc_exponent() const noexcept { return sc_exponent_; }

private:
    double theta_;
    double psi_;
    double phi_;
    double c_psi_;
    double sc_exponent_;
};

/// h(x) = (θ sin ψ / π) B_{sin²(πx/2θ)}(ψ/π, 1 - ψ/π) for 0 < x <= θ.
/// Strictly increasing with h(θ) = θ; the identity when ψ = π/2.
[[nodiscard]] double boundary_map_h(double x, const StripGeometry& geom);

/// θ^{1-2a} (sin ψ / ψ) (π^{2a} / 4^a) x^{2a} with a = ψ/π; dominates h on (0, θ].
[[nodiscard]] double boundary_map_upper_bound(double x, const StripGeometry& geom);

/// Default root-finder tolerance 1e-12·θ.
[[nodiscard]] double default_w_tolerance(const StripGeometry& geom);

/// w(t) = h^{-1}(t) / θ for 0 < t <= θ, with h^{-1}(t) located to absolute
/// accuracy tol by bracketed bisection with secant acceleration.
/// Throws no-convergence if the bracket fails to close within the iteration budget.
[[nodiscard]] double w_real(double t, const StripGeometry& geom, double tol);
[[nodiscard]] double w_real(double t, const StripGeometry& geom);

/// c_ψ (t/θ)^φ.
[[nodiscard]] double w_lower_bound(double t, const StripGeometry& geom);

} // namespace logstab::conformal
