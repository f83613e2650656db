#include "logstab/semigroup.hpp"

#include "logstab/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

namespace logstab::semigroup {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::MatrixXd inverse_sqrt_weight(const OUModel& model, SobolevWeight weight) {
    const Eigen::MatrixXd& q = model.gramian().q_inf;
    const Eigen::MatrixXd w = weight == SobolevWeight::inverse_gramian ? Eigen::MatrixXd(q.inverse()) : Eigen::MatrixXd(q * q);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (w + w.transpose()));
    return eig.operatorInverseSqrt();
}

// ‖g‖²_{H^s} = |det R| ∫ (1 + |R^{-T} η|²)^s |P(η)|² e^{-|η|²} dη, where x = R u maps the
// Gaussian factor to e^{-|u|²/2} and P(η) = Σ c_n (-i)^{|n|} φ_n(√2 η): Hermite functions
// are eigenfunctions of the Fourier transform.
double spectral_sobolev(const Eigen::MatrixXd& r, const HermiteBasis& basis, const Eigen::VectorXd& coeffs, double s,
                        int order) {
    const int dims = basis.dims();
    const auto grid = quadrature::standard_normal_grid(dims, order);
    const Eigen::MatrixXd r_inv_t = r.inverse().transpose();
    std::vector<int> degree(basis.size());
    for (std::size_t k = 0; k < basis.size(); ++k) {
        int d = 0;
        for (int v : basis.indices()[k]) d += v;
        degree[k] = d % 4;
    }
    double acc = 0.0;
    for (Eigen::Index q = 0; q < grid.points.cols(); ++q) {
        // Grid nodes are √2 η for η Gauss–Hermite; weights already carry π^{-N/2}.
        const Eigen::VectorXd node = grid.points.col(q);
        const Eigen::VectorXd eta = node / std::numbers::sqrt2;
        const Eigen::VectorXd b = basis.evaluate(node);
        std::complex<double> p = 0.0;
        for (std::size_t k = 0; k < basis.size(); ++k) {
            const double v = coeffs(static_cast<Eigen::Index>(k)) * b(static_cast<Eigen::Index>(k));
            switch (degree[k]) {
            case 0: p += v; break;
            case 1: p += std::complex<double>(0.0, -v); break;
            case 2: p -= v; break;
            default: p += std::complex<double>(0.0, v); break;
            }
        }
        const double xi2 = (r_inv_t * eta).squaredNorm();
        acc += grid.weights(q) * std::pow(1.0 + xi2, s) * std::norm(p);
    }
    return std::sqrt(std::abs(r.determinant()) * std::pow(kPi, 0.5 * dims) * acc);
}

} // namespace

OUModel::OUModel(operators::DriftSpec spec, int quadrature_order)
    : spec_(std::move(spec)), gramian_(operators::lyapunov_gramian(spec_)), quadrature_order_(quadrature_order) {
    detail::require(quadrature_order >= 2, "quadrature order must be >= 2");
    grid_ = quadrature::standard_normal_grid(spec_.dims(), quadrature_order);
}

Eigen::MatrixXd gramian_t(const OUModel& model, double t) {
    detail::require(t >= 0.0, "Gramian time must be >= 0");
    const auto& b = model.spec().drift();
    const auto& q = model.spec().diffusion();
    const auto n = b.rows();
    if (t == 0.0) return Eigen::MatrixXd::Zero(n, n);

    // Van Loan block exponential on a short step, then Q_{2τ} = Q_τ + e^{τB} Q_τ e^{τBᵀ}.
    int doublings = 0;
    double tau = t;
    const double bnorm = b.lpNorm<1>();
    while (tau * bnorm > 0.5 && doublings < 60) {
        tau *= 0.5;
        ++doublings;
    }
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    block.topLeftCorner(n, n) = -b * tau;
    block.topRightCorner(n, n) = q * tau;
    block.bottomRightCorner(n, n) = b.transpose() * tau;
    const Eigen::MatrixXd e = block.exp();
    Eigen::MatrixXd qt = e.bottomRightCorner(n, n).transpose() * e.topRightCorner(n, n);
    Eigen::MatrixXd step = e.bottomRightCorner(n, n).transpose();
    qt = 0.5 * (qt + qt.transpose());
    for (int k = 0; k < doublings; ++k) {
        qt = qt + step * qt * step.transpose();
        qt = 0.5 * (qt + qt.transpose());
        step = step * step;
    }
    return qt;
}

double kolmogorov_apply(const OUModel& model, double t, const ScalarField& f, const Eigen::VectorXd& x) {
    detail::require(t > 0.0, "Kolmogorov formula needs t > 0");
    const int dims = model.dims();
    if (x.size() != dims) detail::fail(ErrorKind::dimension_mismatch, "evaluation point has wrong dimension");
    const Eigen::MatrixXd qt = gramian_t(model, t);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(qt);
    const double min_eig = eig.eigenvalues().minCoeff();
    const double det = qt.determinant();
    constexpr double kThreshold = 1e-280;
    if (!(min_eig > 0.0) || !(det > kThreshold)) {
        detail::fail(ErrorKind::singular_gramian, "det Q_t = " + std::to_string(det) + " at t = " + std::to_string(t) +
                                                      " is below the quadrature threshold " +
                                                      std::to_string(kThreshold));
    }
    const Eigen::MatrixXd chol = qt.llt().matrixL();
    const Eigen::VectorXd mean = (t * model.spec().drift()).exp() * x;

    // y = 2 C u with C Cᵀ = Q_t turns e^{-¼⟨Q_t^{-1}y,y⟩} dy into 2^N det C e^{-|u|²} du;
    // the grid integrates against the standard normal, i.e. π^{-N/2} e^{-|u|²} with u = z/√2.
    const double prefactor = std::pow(4.0 * kPi, -0.5 * dims) / std::sqrt(det) * std::pow(2.0, dims) *
                             chol.determinant() * std::pow(kPi, 0.5 * dims);
    const auto& grid = model.grid();
    double acc = 0.0;
    for (Eigen::Index q = 0; q < grid.points.cols(); ++q) {
        const Eigen::VectorXd u = grid.points.col(q) / std::numbers::sqrt2;
        acc += grid.weights(q) * f(mean - 2.0 * chol * u);
    }
    return prefactor * acc;
}

double invariant_density(const OUModel& model, const Eigen::VectorXd& x) {
    const auto& q = model.gramian().q_inf;
    if (x.size() != q.rows()) detail::fail(ErrorKind::dimension_mismatch, "density point has wrong dimension");
    const double quad = x.dot(q.ldlt().solve(x));
    return std::exp(-0.25 * quad) / std::sqrt(std::pow(4.0 * kPi, double(q.rows())) * q.determinant());
}

double integrate_invariant(const OUModel& model, const ScalarField& f) {
    const Eigen::MatrixXd l = (2.0 * model.gramian().q_inf).llt().matrixL();
    const auto& grid = model.grid();
    double acc = 0.0;
    for (Eigen::Index q = 0; q < grid.points.cols(); ++q) acc += grid.weights(q) * f(l * grid.points.col(q));
    return acc;
}

double weighted_sobolev_norm(const OUModel& model, double s, const ScalarField& f, int degree, SobolevWeight weight) {
    detail::require(s >= 0.0, "Sobolev order must be >= 0");
    detail::require(degree >= 0, "expansion degree must be >= 0");
    const int dims = model.dims();
    const int order = model.quadrature_order();
    detail::require(order >= degree + 1, "quadrature order too low for the expansion degree");
    const Eigen::MatrixXd r = 2.0 * inverse_sqrt_weight(model, weight);
    const HermiteBasis basis(dims, degree);
    // c_n = E[f(R v/√2) φ_n(v)], v standard normal.
    Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
    const auto& grid = model.grid();
    for (Eigen::Index q = 0; q < grid.points.cols(); ++q) {
        const Eigen::VectorXd v = grid.points.col(q);
        coeffs += grid.weights(q) * f(r * v / std::numbers::sqrt2) * basis.evaluate(v);
    }
    return spectral_sobolev(r, basis, coeffs, s, order);
}

double weighted_sobolev_norm(const OUModel& model, double s, const operators::DiscreteGenerator& gen,
                             const Eigen::VectorXd& coeffs, SobolevWeight weight) {
    const auto* ou = gen.ou();
    detail::require(ou != nullptr, "coefficient norms need an Ornstein-Uhlenbeck generator");
    if (coeffs.size() != gen.dim()) detail::fail(ErrorKind::dimension_mismatch, "coefficient vector has wrong dimension");
    const ScalarField field = [ou, &coeffs](const Eigen::VectorXd& x) { return evaluate(*ou, coeffs, x); };
    return weighted_sobolev_norm(model, s, field, ou->basis.max_degree(), weight);
}

Eigen::VectorXd project(const operators::OUStructure& ou, const ScalarField& f, int quadrature_order) {
    const auto grid = quadrature::standard_normal_grid(ou.basis.dims(), quadrature_order);
    Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ou.basis.size()));
    for (Eigen::Index q = 0; q < grid.points.cols(); ++q) {
        const Eigen::VectorXd z = grid.points.col(q);
        coeffs += grid.weights(q) * f(ou.whitening * z) * ou.basis.evaluate(z);
    }
    return coeffs;
}

double evaluate(const operators::OUStructure& ou, const Eigen::VectorXd& coeffs, const Eigen::VectorXd& x) {
    const Eigen::VectorXd z = ou.whitening.triangularView<Eigen::Lower>().solve(x);
    return coeffs.dot(ou.basis.evaluate(z));
}

ScalarField named_test_function(std::string_view name) {
    if (name == "one") return [](const Eigen::VectorXd&) { return 1.0; };
    if (name == "x1") return [](const Eigen::VectorXd& x) { return x(0); };
    if (name == "x1sq") return [](const Eigen::VectorXd& x) { return x(0) * x(0); };
    if (name == "poly4") {
        return [](const Eigen::VectorXd& x) {
            const double y = x.size() > 1 ? x(1) : 0.0;
            return std::pow(x(0), 4) - 2.0 * x(0) * x(0) * y + 0.5 * y * y * y - x(0) + 3.0;
        };
    }
    if (name == "gauss") return [](const Eigen::VectorXd& x) { return std::exp(-0.125 * x.squaredNorm()); };
    if (name == "cos") return [](const Eigen::VectorXd& x) { return std::cos(x(0)); };
    detail::fail(ErrorKind::invalid_argument, "unknown test function '" + std::string(name) + "'");
}

} // namespace logstab::semigroup
