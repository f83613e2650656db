#pragma once

// The Ornstein–Uhlenbeck semigroup through Kolmogorov's formula, its
// time-dependent Gramians, the invariant Gaussian measure and the weighted
// Sobolev norms built on it.

#include "logstab/operators.hpp"
#include "logstab/quadrature.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string_view>

namespace logstab::semigroup {

using ScalarField = std::function<double(const Eigen::VectorXd&)>;

class OUModel {
public:
    explicit OUModel(operators::DriftSpec spec, int quadrature_order = 40);

    [[nodiscard]] const operators::DriftSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] const operators::Gramian& gramian() const noexcept { return gramian_; }
    [[nodiscard]] int quadrature_order() const noexcept { return quadrature_order_; }
    [[nodiscard]] int dims() const noexcept { return spec_.dims(); }
    /// Standard-normal tensor grid shared by every quadrature in this model.
    [[nodiscard]] const quadrature::GaussianGrid& grid() const noexcept { return grid_; }

private:
    operators::DriftSpec spec_;
    operators::Gramian gramian_;
    int quadrature_order_;
    quadrature::GaussianGrid grid_;
};

/// Q_t = ∫_0^t e^{sB} Q e^{sBᵀ} ds.
[[nodiscard]] Eigen::MatrixXd gramian_t(const OUModel& model, double t);

/// (T(t) f)(x) = (4π)^{-N/2} det(Q_t)^{-1/2} ∫ e^{-¼⟨Q_t^{-1} y, y⟩} f(e^{tB} x - y) dy.
/// Throws singular-gramian when Q_t is numerically singular (t too small).
[[nodiscard]] double kolmogorov_apply(const OUModel& model, double t, const ScalarField& f, const Eigen::VectorXd& x);

/// ρ(x) = ((4π)^N det Q_∞)^{-1/2} e^{-¼⟨Q_∞^{-1} x, x⟩}.
[[nodiscard]] double invariant_density(const OUModel& model, const Eigen::VectorXd& x);

/// ∫ f dμ.
[[nodiscard]] double integrate_invariant(const OUModel& model, const ScalarField& f);

/// Which quadratic form appears in the Gaussian factor of the weighted norm.
/// Q_∞^{-1} is the default; Q_∞² is the alternative reading of the weight.
enum class SobolevWeight { inverse_gramian, squared_gramian };

/// ‖f e^{-⅛⟨W x, x⟩}‖_{H^s(R^N)} with W = Q_∞^{-1} (or Q_∞²), computed from the
/// Hermite expansion of f to the given degree and the Fourier-side quadrature
/// ∫ (1 + |ξ|²)^s |ĝ(ξ)|² dξ / (2π)^N.
[[nodiscard]] double weighted_sobolev_norm(const OUModel& model, double s, const ScalarField& f, int degree = 12,
                                           SobolevWeight weight = SobolevWeight::inverse_gramian);

/// Same norm for a coefficient vector of an Ornstein–Uhlenbeck Galerkin generator.
[[nodiscard]] double weighted_sobolev_norm(const OUModel& model, double s, const operators::DiscreteGenerator& gen,
                                           const Eigen::VectorXd& coeffs,
                                           SobolevWeight weight = SobolevWeight::inverse_gramian);

/// L²_μ-orthogonal projection of f onto the generator's Hermite basis.
[[nodiscard]] Eigen::VectorXd project(const operators::OUStructure& ou, const ScalarField& f, int quadrature_order = 40);

/// Evaluates a Galerkin coefficient vector at a physical point.
[[nodiscard]] double evaluate(const operators::OUStructure& ou, const Eigen::VectorXd& coeffs, const Eigen::VectorXd& x);

/// Named fields for the command line: one, x1, x1sq, poly4, gauss, cos.
[[nodiscard]] ScalarField named_test_function(std::string_view name);

} // namespace logstab::semigroup
