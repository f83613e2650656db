#pragma once

// Logarithmic-convexity bound, the incomplete-Gamma stability kernel and the
// monotone ratio used to move constants inside its logarithm.

#include "logstab/conformal.hpp"

#include <span>
#include <string>
#include <vector>

namespace logstab::stability {

struct StabilityParams {
    double theta = 1.0;
    double eps = 0.5;
    double M = 1.0;
    double p = 1.5;
    double s = 0.2;
    double K = 1.0;
    double kappa = 0.0;
    double kappa_obs = 1.0;
    double kappa_adm = 1.0;

    /// K₀ = K e^{κθ}.
    [[nodiscard]] double k0() const;
};

struct Violation {
    std::string name;
    std::string message;
};

/// Every violated constraint, by field name; empty when the parameters are usable.
[[nodiscard]] std::vector<Violation> validate_params(const StabilityParams& params);

/// K e^{κ(t - θw)} M^{1-w} final_norm^{w}.
[[nodiscard]] double logconvexity_bound(double t, double w_t, double M, double final_norm, double K, double kappa,
                                        double theta);

/// (Γ(1/φ) - Γ(1/φ, -c log E)) / ((-c log E)^{1/φ} φ) = ∫_0^1 E^{c t^φ} dt for 0 < E < 1.
[[nodiscard]] double gamma_kernel(double E, double phi, double c);

/// Kernel as a function of log E, for arguments whose power underflows.
[[nodiscard]] double gamma_kernel_log(double log_e, double phi, double c);

struct StabilityBound {
    double kernel;     ///< kernel at E = obs_norm with c = c_ψ p
    double exact;      ///< K₁ kernel^{s/p}
    double simplified; ///< K₁ (Γ(1/φ) / ((-c_ψ p log obs)^{1/φ} φ))^{s/p}
};

/// Both forms of the stability right-hand side. Throws invalid-argument when
/// obs_norm is not in (0, 1) or the parameters fail validation.
[[nodiscard]] StabilityBound stability_rhs(double obs_norm, const StabilityParams& params,
                                           const conformal::StripGeometry& geom, double K1);

/// Consecutive differences of r(x) = k(-c log(σx)) / k(-c log x) along an
/// increasing grid in (0, min(1, 1/σ)), where k is the kernel as a function of
/// its Gamma argument.
[[nodiscard]] std::vector<double> r_monotone_residuals(double c, double phi, double sigma, std::span<const double> grid);

} // namespace logstab::stability
