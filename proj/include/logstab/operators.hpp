#pragma once

// Finite-dimensional generators of analytic semigroups: the Dirichlet heat
// operator in its sine eigenbasis and the Ornstein–Uhlenbeck operator
// div(Q∇) + Bx·∇ compressed onto Hermite polynomials orthonormal in L²_μ.

#include "logstab/hermite_basis.hpp"

#include <Eigen/Dense>

#include <complex>
#include <memory>
#include <mutex>
#include <optional>
#include <span>

namespace logstab::operators {

/// Drift B and diffusion Q (symmetric positive definite, identity by default).
class DriftSpec {
public:
    explicit DriftSpec(Eigen::MatrixXd drift);
    DriftSpec(Eigen::MatrixXd drift, Eigen::MatrixXd diffusion);

    [[nodiscard]] const Eigen::MatrixXd& drift() const noexcept { return drift_; }
    [[nodiscard]] const Eigen::MatrixXd& diffusion() const noexcept { return diffusion_; }
    [[nodiscard]] int dims() const noexcept { return static_cast<int>(drift_.rows()); }

    /// True when every eigenvalue of B has negative real part.
    [[nodiscard]] bool is_stable() const;
    /// Largest real part over σ(B).
    [[nodiscard]] double spectral_abscissa() const;

private:
    Eigen::MatrixXd drift_;
    Eigen::MatrixXd diffusion_;
};

/// Q_∞ = ∫_0^∞ e^{sB} Q e^{sBᵀ} ds.
struct Gramian {
    Eigen::MatrixXd q_inf;
};

/// Solves B X + X Bᵀ = -Q. Throws unstable-drift unless σ(B) lies in the open left half-plane.
[[nodiscard]] Gramian lyapunov_gramian(const DriftSpec& spec);

/// ‖B Q_∞ + Q_∞ Bᵀ + Q‖ / ‖Q‖ in the Frobenius norm.
[[nodiscard]] double lyapunov_residual(const DriftSpec& spec, const Gramian& gramian);

struct AngleReport {
    double psi;   ///< analyticity angle in (0, π/2]
    double gamma; ///< cot ψ = 2‖½I + Q^{-1/2} Q_∞ Bᵀ Q^{-1/2}‖₂
    Gramian gramian;
};

[[nodiscard]] AngleReport analyticity(const DriftSpec& spec);
[[nodiscard]] double analyticity_angle(const DriftSpec& spec);

enum class GeneratorKind { heat, ornstein_uhlenbeck, custom };

/// Physical nodes carrying the basis, used to restrict functions to an
/// observation region. Columns of `points` are nodes; `basis_values(q, k)` is
/// the k-th basis function at node q; the weighted Gram matrix over all nodes is
/// the identity.
struct ObservationNodes {
    Eigen::MatrixXd points;
    Eigen::VectorXd weights;
    Eigen::MatrixXd basis_values;
};

/// Coordinates in which the Ornstein–Uhlenbeck Galerkin basis is orthonormal:
/// x = L z with L Lᵀ = 2 Q_∞ and z standard normal.
struct OUStructure {
    DriftSpec spec;
    Gramian gramian;
    Eigen::MatrixXd whitening;
    HermiteBasis basis;
};

struct SpectralOptions {
    double condition_bound = 1e8;
    bool allow_schur_fallback = true;
};

struct SectorFitOptions {
    int samples_per_ray = 64;
    double ray_margin = 0.05;
    double horizon = 4.0;
};

/// Constants of ‖e^{zA}‖ <= K e^{κ Re z} fitted on sampled rays.
struct SectorFit {
    double K = 1.0;
    double kappa = 0.0;
    double ray_angle = 0.0;
    double max_sampled_norm = 0.0;
};

/// Eigendecomposition of A, reused by every matrix function.
struct SpectralCache {
    bool diagonalizable = false;
    double condition = 0.0;
    Eigen::VectorXcd eigenvalues;
    Eigen::MatrixXcd vectors;
    Eigen::MatrixXcd inverse;
};

/// Immutable generator; the spectral cache is built once on first use and is
/// shared between copies.
class DiscreteGenerator {
public:
    struct Parts {
        Eigen::MatrixXd matrix;
        double lambda_shift = 0.0;
        double psi = 0.0;
        SectorFit sector;
        ObservationNodes nodes;
        GeneratorKind kind = GeneratorKind::custom;
        SpectralOptions spectral;
        std::shared_ptr<const OUStructure> ou;
    };

    explicit DiscreteGenerator(Parts parts);

    [[nodiscard]] int dim() const noexcept { return static_cast<int>(parts_.matrix.rows()); }
    [[nodiscard]] const Eigen::MatrixXd& matrix() const noexcept { return parts_.matrix; }
    [[nodiscard]] double lambda_shift() const noexcept { return parts_.lambda_shift; }
    [[nodiscard]] double sector_K() const noexcept { return parts_.sector.K; }
    [[nodiscard]] double sector_kappa() const noexcept { return parts_.sector.kappa; }
    [[nodiscard]] const SectorFit& sector() const noexcept { return parts_.sector; }
    /// Analyticity angle of the continuum generator this matrix discretizes.
    [[nodiscard]] double psi() const noexcept { return parts_.psi; }
    [[nodiscard]] GeneratorKind kind() const noexcept { return parts_.kind; }
    [[nodiscard]] const ObservationNodes& nodes() const noexcept { return parts_.nodes; }
    [[nodiscard]] const SpectralOptions& spectral_options() const noexcept { return parts_.spectral; }
    [[nodiscard]] const OUStructure* ou() const noexcept { return parts_.ou.get(); }

    [[nodiscard]] const SpectralCache& spectral() const;

private:
    struct CacheSlot {
        std::once_flag once;
        SpectralCache cache;
    };

    Parts parts_;
    std::shared_ptr<CacheSlot> slot_;
};

/// -(kπ/length)², k = 1..n, in the orthonormal sine basis of L²(0, length).
[[nodiscard]] DiscreteGenerator build_heat_generator(int n, double length);

struct OUBuildOptions {
    std::size_t max_dim = 2000;
    /// Gauss–Hermite nodes per dimension for the observation grid (0 = automatic).
    int node_order = 0;
    SectorFitOptions sector;
    SpectralOptions spectral;
};

/// Galerkin matrix of div(Q∇) + Bx·∇ on polynomials of total degree <= order.
/// Throws unstable-drift or basis-overflow.
[[nodiscard]] DiscreteGenerator build_ou_generator(const DriftSpec& spec, int order, const OUBuildOptions& options = {});

/// Wraps an arbitrary matrix; sector constants are fitted and λ = κ + 1.
[[nodiscard]] DiscreteGenerator make_custom_generator(Eigen::MatrixXd matrix, double psi, ObservationNodes nodes,
                                                      const SectorFitOptions& sector = {});

/// Samples ‖e^{zA}‖ on arg z ∈ {0, ±(ψ - margin)} and returns K >= 1, κ >= 0
/// with K e^{κ Re z} above every sample.
[[nodiscard]] SectorFit fit_sector_constants(const Eigen::MatrixXd& matrix, double psi,
                                             const SectorFitOptions& options = {});

[[nodiscard]] Eigen::MatrixXd semigroup_matrix(const DiscreteGenerator& gen, double t);
[[nodiscard]] Eigen::MatrixXcd semigroup_matrix(const DiscreteGenerator& gen, std::complex<double> z);
[[nodiscard]] Eigen::VectorXd semigroup_apply(const DiscreteGenerator& gen, double t,
                                              const Eigen::Ref<const Eigen::VectorXd>& u);

/// (λ - A)^α for α in [-1, 1]. Eigendecomposition when its condition number is
/// below the configured bound, Schur–Padé otherwise (or ill-conditioned-spectrum
/// if the fallback is disabled).
[[nodiscard]] Eigen::MatrixXd fractional_power(const DiscreteGenerator& gen, double alpha);

/// ‖(λ - A)^ε u‖ for ε in [0, 1].
[[nodiscard]] double fractional_norm(const DiscreteGenerator& gen, double eps,
                                     const Eigen::Ref<const Eigen::VectorXd>& u);

/// max over t_grid of t^α ‖(λ - A)^α e^{t(A - λ)}‖₂.
[[nodiscard]] double smoothing_constant(const DiscreteGenerator& gen, double alpha, std::span<const double> t_grid);

[[nodiscard]] double spectral_norm(const Eigen::Ref<const Eigen::MatrixXd>& m);
[[nodiscard]] double spectral_norm(const Eigen::Ref<const Eigen::MatrixXcd>& m);

} // namespace logstab::operators
