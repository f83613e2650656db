#pragma once

// Experiment orchestration: discrete observation maps, observability
// constants, admissible initial data and the two end-to-end experiments.

#include "logstab/config.hpp"
#include "logstab/operators.hpp"
#include "logstab/region.hpp"
#include "logstab/report.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace logstab::harness {

/// Stacked observation map G u₀ = (√ω_i C_ω e^{t_i A} u₀)_i with trapezoid weights
/// ω_i on [0, θ], so ‖G u₀‖² approximates ∫_0^θ ‖𝟙_ω u(t)‖² dt.
struct ObservationOperator {
    Eigen::MatrixXd stacked;
    Eigen::MatrixXd final_map; ///< e^{θA}
    std::vector<double> t_grid;
    std::vector<double> weights;
    std::vector<bool> mask;
};

[[nodiscard]] ObservationOperator build_observation_operator(const operators::DiscreteGenerator& gen,
                                                             const ObservationRegion& region, double theta,
                                                             int n_times);

struct ObservabilityEstimate {
    double kappa_obs = 0.0;
    double kappa_adm = 0.0;
    std::vector<double> t_grid;
    double conditioning = 0.0; ///< smallest singular value of G
    bool cover_ok = true;
    std::string warning;
};

/// κ_obs = ‖F G⁺‖₂ = max ‖F u‖/‖G u‖ and κ_adm = ‖G‖₂, by dense SVD.
/// Throws degenerate-observation when σ_min(G) < 1e-13.
[[nodiscard]] ObservabilityEstimate estimate_observability(const operators::DiscreteGenerator& gen,
                                                           const ObservationRegion& region, double theta,
                                                           int n_times);

/// Radius of the truncated computational domain: 8 √λ_max(2Q_∞) for
/// Ornstein–Uhlenbeck generators, the interval length otherwise.
[[nodiscard]] double domain_radius(const operators::DiscreteGenerator& gen);

/// count vectors with ‖(λ - A)^ε u₀‖ = U·M, U uniform on [0, 1), from isotropic
/// normal directions. Deterministic in seed.
[[nodiscard]] std::vector<Eigen::VectorXd> sample_admissible(const operators::DiscreteGenerator& gen, double eps,
                                                             double M, int count, std::uint64_t seed);

/// Random drift with eigenvalues of real part in [-3, -0.1]: V diag V⁻¹ with a
/// well-conditioned V and optional complex pairs.
[[nodiscard]] Eigen::MatrixXd random_stable_drift(std::mt19937_64& rng, int n);

/// Symmetric negative definite drift (self-adjoint in L²_μ when Q = I).
[[nodiscard]] Eigen::MatrixXd random_symmetric_drift(std::mt19937_64& rng, int n);

[[nodiscard]] operators::DiscreteGenerator build_generator(const GeneratorConfig& config);
[[nodiscard]] ObservationRegion build_region(const RegionConfig& config, const operators::DiscreteGenerator& gen);

/// Runs one experiment. Invalid configurations throw; failures after setup are
/// recorded in report.errors and the records gathered so far are kept.
[[nodiscard]] ExperimentReport run_experiment(ExperimentMode mode, const ExperimentConfig& config);

} // namespace logstab::harness
