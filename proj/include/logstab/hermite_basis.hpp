#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

namespace logstab {

using MultiIndex = std::vector<int>;

/// Tensor products of normalized probabilists' Hermite polynomials
/// He_n(z)/√(n!) of total degree <= max_degree: an orthonormal basis of the
/// polynomial subspace of L²(N(0, I)). Index 0 is the constant function.
class HermiteBasis {
public:
    HermiteBasis(int dims, int max_degree);

    [[nodiscard]] int dims() const noexcept { return dims_; }
    [[nodiscard]] int max_degree() const noexcept { return max_degree_; }
    [[nodiscard]] std::size_t size() const noexcept { return indices_.size(); }
    [[nodiscard]] const std::vector<MultiIndex>& indices() const noexcept { return indices_; }
    [[nodiscard]] std::optional<std::size_t> find(const MultiIndex& index) const;

    /// Values of every basis function at z (length dims).
    [[nodiscard]] Eigen::VectorXd evaluate(const Eigen::Ref<const Eigen::VectorXd>& z) const;

    /// Basis dimension for the given layout without building it.
    [[nodiscard]] static std::size_t count(int dims, int max_degree);

private:
    int dims_;
    int max_degree_;
    std::vector<MultiIndex> indices_;
    std::map<MultiIndex, std::size_t> lookup_;
};

} // namespace logstab
