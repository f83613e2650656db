#include "logstab/operators.hpp"

#include "logstab/errors.hpp"
#include "logstab/quadrature.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace logstab::operators {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_symmetric(const Eigen::MatrixXd& m, double rel_tol) {
    const double scale = std::max(1.0, m.norm());
    return (m - m.transpose()).norm() <= rel_tol * scale;
}

void require_square(const Eigen::MatrixXd& m, const char* what) {
    detail::require(m.rows() > 0 && m.rows() == m.cols(), std::string(what) + " must be a non-empty square matrix");
}

SpectralCache build_cache(const Eigen::MatrixXd& a) {
    SpectralCache cache;
    const auto n = a.rows();
    if (is_symmetric(a, 1e-14)) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (a + a.transpose()));
        cache.eigenvalues = eig.eigenvalues().cast<std::complex<double>>();
        cache.vectors = eig.eigenvectors().cast<std::complex<double>>();
        cache.inverse = cache.vectors.adjoint();
        cache.condition = 1.0;
        cache.diagonalizable = true;
        return cache;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> eig(a);
    if (eig.info() != Eigen::Success) {
        cache.diagonalizable = false;
        cache.condition = std::numeric_limits<double>::infinity();
        return cache;
    }
    cache.eigenvalues = eig.eigenvalues();
    cache.vectors = eig.eigenvectors();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(cache.vectors);
    const auto& sv = svd.singularValues();
    cache.condition = sv(n - 1) > 0.0 ? sv(0) / sv(n - 1) : std::numeric_limits<double>::infinity();
    if (std::isfinite(cache.condition)) cache.inverse = cache.vectors.inverse();
    return cache;
}

bool use_eigen_route(const DiscreteGenerator& gen) {
    const auto& cache = gen.spectral();
    return cache.condition <= gen.spectral_options().condition_bound;
}

// Columns of the tensor Gauss–Hermite grid mapped through x = L z.
ObservationNodes ou_nodes(const OUStructure& ou, int node_order) {
    const auto grid = quadrature::standard_normal_grid(ou.basis.dims(), node_order);
    ObservationNodes nodes;
    nodes.points = ou.whitening * grid.points;
    nodes.weights = grid.weights;
    nodes.basis_values.resize(grid.points.cols(), static_cast<Eigen::Index>(ou.basis.size()));
    for (Eigen::Index q = 0; q < grid.points.cols(); ++q) {
        nodes.basis_values.row(q) = ou.basis.evaluate(grid.points.col(q)).transpose();
    }
    return nodes;
}

} // namespace

// ---------------------------------------------------------------------------
// Drift and Gramian

DriftSpec::DriftSpec(Eigen::MatrixXd drift)
    : DriftSpec(drift, Eigen::MatrixXd::Identity(drift.rows(), drift.cols())) {}

DriftSpec::DriftSpec(Eigen::MatrixXd drift, Eigen::MatrixXd diffusion)
    : drift_(std::move(drift)), diffusion_(std::move(diffusion)) {
    require_square(drift_, "drift B");
    require_square(diffusion_, "diffusion Q");
    detail::require(drift_.rows() == diffusion_.rows(), "drift and diffusion must have the same size");
    detail::require(drift_.allFinite() && diffusion_.allFinite(), "drift and diffusion must be finite");
    detail::require(is_symmetric(diffusion_, 1e-12), "diffusion Q must be symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(diffusion_);
    detail::require(llt.info() == Eigen::Success, "diffusion Q must be positive definite");
}

double DriftSpec::spectral_abscissa() const {
    Eigen::EigenSolver<Eigen::MatrixXd> eig(drift_, false);
    return eig.eigenvalues().real().maxCoeff();
}

bool DriftSpec::is_stable() const { return spectral_abscissa() < 0.0; }

Gramian lyapunov_gramian(const DriftSpec& spec) {
    const double abscissa = spec.spectral_abscissa();
    if (!(abscissa < 0.0)) {
        detail::fail(ErrorKind::unstable_drift,
                     "drift has an eigenvalue with real part " + std::to_string(abscissa) + " >= 0");
    }
    const auto& b = spec.drift();
    const auto& q = spec.diffusion();
    const auto n = b.rows();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    // Column-major vec: vec(BX) = (I ⊗ B) vec X, vec(XBᵀ) = (B ⊗ I) vec X.
    Eigen::MatrixXd kron(n * n, n * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            kron.block(i * n, j * n, n, n) = id(i, j) * b + b(i, j) * id;
        }
    }
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(kron);
    const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(q.data(), n * n);
    Eigen::VectorXd x = lu.solve(rhs);
    x += lu.solve(rhs - kron * x);
    Eigen::MatrixXd sol = Eigen::Map<Eigen::MatrixXd>(x.data(), n, n);
    return Gramian{0.5 * (sol + sol.transpose())};
}

double lyapunov_residual(const DriftSpec& spec, const Gramian& gramian) {
    const auto& b = spec.drift();
    const auto& q = spec.diffusion();
    return (b * gramian.q_inf + gramian.q_inf * b.transpose() + q).norm() / q.norm();
}

AngleReport analyticity(const DriftSpec& spec) {
    auto gramian = lyapunov_gramian(spec);
    const auto n = spec.dims();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> qeig(spec.diffusion());
    const Eigen::MatrixXd q_inv_sqrt = qeig.operatorInverseSqrt();
    const Eigen::MatrixXd m = 0.5 * Eigen::MatrixXd::Identity(n, n) +
                              q_inv_sqrt * gramian.q_inf * spec.drift().transpose() * q_inv_sqrt;
    const double gamma = 2.0 * spectral_norm(m);
    // arccot γ = π/2 - arctan γ for γ >= 0.
    const double psi = kPi / 2.0 - std::atan(gamma);
    return AngleReport{psi, gamma, std::move(gramian)};
}

double analyticity_angle(const DriftSpec& spec) { return analyticity(spec).psi; }

// ---------------------------------------------------------------------------
// Generators

DiscreteGenerator::DiscreteGenerator(Parts parts) : parts_(std::move(parts)), slot_(std::make_shared<CacheSlot>()) {
    require_square(parts_.matrix, "generator matrix");
    detail::require(parts_.lambda_shift >= 0.0, "lambda shift must be >= 0");
    detail::require(parts_.psi > 0.0 && parts_.psi <= kPi / 2.0, "generator angle must lie in (0, pi/2]");
    if (parts_.nodes.basis_values.size() != 0 && parts_.nodes.basis_values.cols() != parts_.matrix.rows()) {
        detail::fail(ErrorKind::dimension_mismatch, "observation nodes do not match the generator dimension");
    }
}

const SpectralCache& DiscreteGenerator::spectral() const {
    std::call_once(slot_->once, [this] { slot_->cache = build_cache(parts_.matrix); });
    return slot_->cache;
}

SectorFit fit_sector_constants(const Eigen::MatrixXd& matrix, double psi, const SectorFitOptions& options) {
    require_square(matrix, "generator matrix");
    detail::require(options.samples_per_ray >= 2, "sector fit needs at least two samples per ray");
    double ray = psi - options.ray_margin;
    if (ray <= 0.0) ray = 0.5 * psi;
    const Eigen::MatrixXcd ac = matrix.cast<std::complex<double>>();

    std::vector<double> re_z;
    std::vector<double> log_norm;
    std::vector<double> norms;
    for (double angle : {0.0, ray, -ray}) {
        const std::complex<double> dir = std::polar(1.0, angle);
        for (int k = 1; k <= options.samples_per_ray; ++k) {
            const double r = options.horizon * k / options.samples_per_ray;
            const Eigen::MatrixXcd e = (r * dir * ac).exp();
            const double nrm = spectral_norm(e);
            re_z.push_back(r * std::cos(angle));
            norms.push_back(nrm);
            log_norm.push_back(std::log(std::max(nrm, 1e-300)));
        }
    }
    // Least-squares slope of log‖e^{zA}‖ against Re z, then lift K over every sample.
    const auto m = static_cast<double>(re_z.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < re_z.size(); ++i) {
        sx += re_z[i];
        sy += log_norm[i];
        sxx += re_z[i] * re_z[i];
        sxy += re_z[i] * log_norm[i];
    }
    const double denom = m * sxx - sx * sx;
    const double slope = denom > 0.0 ? (m * sxy - sx * sy) / denom : 0.0;

    SectorFit fit;
    fit.ray_angle = ray;
    fit.kappa = std::max(0.0, slope);
    fit.K = 1.0;
    for (std::size_t i = 0; i < re_z.size(); ++i) {
        fit.K = std::max(fit.K, norms[i] * std::exp(-fit.kappa * re_z[i]));
        fit.max_sampled_norm = std::max(fit.max_sampled_norm, norms[i]);
    }
    return fit;
}

DiscreteGenerator build_heat_generator(int n, double length) {
    detail::require(n >= 2, "heat generator needs n >= 2, got " + std::to_string(n));
    detail::require(length > 0.0 && std::isfinite(length), "interval length must be > 0");
    DiscreteGenerator::Parts parts;
    parts.kind = GeneratorKind::heat;
    parts.psi = kPi / 2.0;
    parts.lambda_shift = 0.0;
    parts.matrix = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k <= n; ++k) {
        const double wave = k * kPi / length;
        parts.matrix(k - 1, k - 1) = -wave * wave;
    }
    // Midpoint rule with 8n nodes integrates products of the first n sines exactly.
    const int m = 8 * n;
    parts.nodes.points.resize(1, m);
    parts.nodes.weights = Eigen::VectorXd::Constant(m, length / m);
    parts.nodes.basis_values.resize(m, n);
    const double amp = std::sqrt(2.0 / length);
    for (int q = 0; q < m; ++q) {
        const double x = (q + 0.5) * length / m;
        parts.nodes.points(0, q) = x;
        for (int k = 1; k <= n; ++k) parts.nodes.basis_values(q, k - 1) = amp * std::sin(k * kPi * x / length);
    }
    parts.sector = fit_sector_constants(parts.matrix, parts.psi);
    return DiscreteGenerator(std::move(parts));
}

DiscreteGenerator build_ou_generator(const DriftSpec& spec, int order, const OUBuildOptions& options) {
    detail::require(order >= 1, "Galerkin order must be >= 1");
    const int dims = spec.dims();
    const auto size = HermiteBasis::count(dims, order);
    if (size > options.max_dim) {
        detail::fail(ErrorKind::basis_overflow, "order " + std::to_string(order) + " in " + std::to_string(dims) +
                                                    " dimensions needs " + std::to_string(size) +
                                                    " basis functions, limit " + std::to_string(options.max_dim));
    }
    const auto angle = analyticity(spec);
    const Eigen::MatrixXd cov = 2.0 * angle.gramian.q_inf;
    const Eigen::MatrixXd whitening = cov.llt().matrixL();
    const Eigen::MatrixXd w_inv = whitening.inverse();
    auto ou = std::make_shared<OUStructure>(OUStructure{spec, angle.gramian, whitening, HermiteBasis(dims, order)});

    // In z = L^{-1} x the operator reads Σ D_ij ∂_i∂_j + Σ C_ij z_j ∂_i.
    const Eigen::MatrixXd diff = w_inv * spec.diffusion() * w_inv.transpose();
    const Eigen::MatrixXd conv = w_inv * spec.drift() * whitening;

    const auto& basis = ou->basis;
    const auto n = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    auto add = [&](const MultiIndex& target, Eigen::Index col, double value) {
        if (value == 0.0) return;
        const auto row = basis.find(target);
        if (row) a(static_cast<Eigen::Index>(*row), col) += value;
    };
    for (Eigen::Index col = 0; col < n; ++col) {
        const MultiIndex& idx = basis.indices()[static_cast<std::size_t>(col)];
        for (int i = 0; i < dims; ++i) {
            if (idx[i] == 0) continue;
            // Second-order part.
            for (int j = 0; j < dims; ++j) {
                MultiIndex t = idx;
                double coef = 0.0;
                if (i == j) {
                    if (idx[i] < 2) continue;
                    coef = diff(i, i) * std::sqrt(double(idx[i]) * (idx[i] - 1));
                    t[i] -= 2;
                } else {
                    if (idx[j] == 0) continue;
                    coef = diff(i, j) * std::sqrt(double(idx[i]) * idx[j]);
                    t[i] -= 1;
                    t[j] -= 1;
                }
                add(t, col, coef);
            }
            // Drift part: z_j ∂_i.
            MultiIndex lowered = idx;
            lowered[i] -= 1;
            const double d_coef = std::sqrt(double(idx[i]));
            for (int j = 0; j < dims; ++j) {
                if (conv(i, j) == 0.0) continue;
                MultiIndex up = lowered;
                up[j] += 1;
                add(up, col, conv(i, j) * d_coef * std::sqrt(double(up[j])));
                if (lowered[j] > 0) {
                    MultiIndex down = lowered;
                    down[j] -= 1;
                    add(down, col, conv(i, j) * d_coef * std::sqrt(double(lowered[j])));
                }
            }
        }
    }

    DiscreteGenerator::Parts parts;
    parts.kind = GeneratorKind::ornstein_uhlenbeck;
    parts.psi = angle.psi;
    parts.matrix = std::move(a);
    parts.sector = fit_sector_constants(parts.matrix, parts.psi, options.sector);
    parts.lambda_shift = parts.sector.kappa + 1.0;
    parts.spectral = options.spectral;
    const int node_order = options.node_order > 0 ? options.node_order : std::max(order + 1, dims == 1 ? 48 : 24);
    detail::require(node_order >= order + 1, "observation grid too coarse for the basis degree");
    parts.nodes = ou_nodes(*ou, node_order);
    parts.ou = std::move(ou);
    return DiscreteGenerator(std::move(parts));
}

DiscreteGenerator make_custom_generator(Eigen::MatrixXd matrix, double psi, ObservationNodes nodes,
                                        const SectorFitOptions& sector) {
    DiscreteGenerator::Parts parts;
    parts.kind = GeneratorKind::custom;
    parts.psi = psi;
    parts.sector = fit_sector_constants(matrix, psi, sector);
    parts.lambda_shift = parts.sector.kappa + 1.0;
    parts.matrix = std::move(matrix);
    parts.nodes = std::move(nodes);
    return DiscreteGenerator(std::move(parts));
}

// ---------------------------------------------------------------------------
// Matrix functions

Eigen::MatrixXd semigroup_matrix(const DiscreteGenerator& gen, double t) {
    detail::require(t >= 0.0, "semigroup time must be >= 0");
    const auto n = gen.dim();
    if (t == 0.0) return Eigen::MatrixXd::Identity(n, n);
    if (use_eigen_route(gen)) {
        const auto& c = gen.spectral();
        const Eigen::VectorXcd e = (t * c.eigenvalues).array().exp();
        return (c.vectors * e.asDiagonal() * c.inverse).real();
    }
    return (t * gen.matrix()).exp();
}

Eigen::MatrixXcd semigroup_matrix(const DiscreteGenerator& gen, std::complex<double> z) {
    if (use_eigen_route(gen)) {
        const auto& c = gen.spectral();
        const Eigen::VectorXcd e = (z * c.eigenvalues).array().exp();
        return c.vectors * e.asDiagonal() * c.inverse;
    }
    return (z * gen.matrix().cast<std::complex<double>>()).exp();
}

Eigen::VectorXd semigroup_apply(const DiscreteGenerator& gen, double t, const Eigen::Ref<const Eigen::VectorXd>& u) {
    if (u.size() != gen.dim()) detail::fail(ErrorKind::dimension_mismatch, "state vector has wrong dimension");
    if (t == 0.0) return u;
    return semigroup_matrix(gen, t) * u;
}

Eigen::MatrixXd fractional_power(const DiscreteGenerator& gen, double alpha) {
    detail::require(alpha >= -1.0 && alpha <= 1.0, "fractional exponent must lie in [-1, 1]");
    const auto n = gen.dim();
    const double lambda = gen.lambda_shift();
    const Eigen::MatrixXd shifted = lambda * Eigen::MatrixXd::Identity(n, n) - gen.matrix();
    if (alpha == 0.0) return Eigen::MatrixXd::Identity(n, n);
    if (alpha == 1.0) return shifted;
    if (alpha == -1.0) return shifted.inverse();
    if (use_eigen_route(gen)) {
        const auto& c = gen.spectral();
        Eigen::VectorXcd p(n);
        for (Eigen::Index i = 0; i < n; ++i) p(i) = std::pow(lambda - c.eigenvalues(i), alpha);
        return (c.vectors * p.asDiagonal() * c.inverse).real();
    }
    if (!gen.spectral_options().allow_schur_fallback) {
        detail::fail(ErrorKind::ill_conditioned_spectrum,
                     "eigenvector condition number " + std::to_string(gen.spectral().condition) + " exceeds bound " +
                         std::to_string(gen.spectral_options().condition_bound));
    }
    Eigen::MatrixPower<Eigen::MatrixXd> power(shifted);
    return power(alpha);
}

double fractional_norm(const DiscreteGenerator& gen, double eps, const Eigen::Ref<const Eigen::VectorXd>& u) {
    detail::require(eps >= 0.0 && eps <= 1.0, "fractional order must lie in [0, 1]");
    if (u.size() != gen.dim()) detail::fail(ErrorKind::dimension_mismatch, "state vector has wrong dimension");
    if (eps == 0.0) return u.norm();
    return (fractional_power(gen, eps) * u).norm();
}

double smoothing_constant(const DiscreteGenerator& gen, double alpha, std::span<const double> t_grid) {
    detail::require(alpha > 0.0 && alpha <= 1.0, "smoothing exponent must lie in (0, 1]");
    const Eigen::MatrixXd power = fractional_power(gen, alpha);
    const double lambda = gen.lambda_shift();
    double best = 0.0;
    for (double t : t_grid) {
        detail::require(t > 0.0, "smoothing grid must be positive");
        const Eigen::MatrixXd e = semigroup_matrix(gen, t) * std::exp(-lambda * t);
        best = std::max(best, std::pow(t, alpha) * spectral_norm(power * e));
    }
    return best;
}

double spectral_norm(const Eigen::Ref<const Eigen::MatrixXd>& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(0);
}

double spectral_norm(const Eigen::Ref<const Eigen::MatrixXcd>& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues()(0);
}

} // namespace logstab::operators
