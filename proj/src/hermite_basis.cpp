#include "logstab/hermite_basis.hpp"

#include "logstab/errors.hpp"

#include <cmath>
#include <functional>

namespace logstab {

HermiteBasis::HermiteBasis(int dims, int max_degree) : dims_(dims), max_degree_(max_degree) {
    detail::require(dims >= 1, "basis dimension must be >= 1");
    detail::require(max_degree >= 0, "basis degree must be >= 0");
    MultiIndex current(dims, 0);
    // Enumerate by total degree, then lexicographically within a degree.
    std::function<void(int, int)> fill = [&](int slot, int remaining) {
        if (slot == dims - 1) {
            current[slot] = remaining;
            lookup_.emplace(current, indices_.size());
            indices_.push_back(current);
            return;
        }
        for (int k = remaining; k >= 0; --k) {
            current[slot] = k;
            fill(slot + 1, remaining - k);
        }
    };
    for (int degree = 0; degree <= max_degree; ++degree) fill(0, degree);
}

std::optional<std::size_t> HermiteBasis::find(const MultiIndex& index) const {
    auto it = lookup_.find(index);
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
}

Eigen::VectorXd HermiteBasis::evaluate(const Eigen::Ref<const Eigen::VectorXd>& z) const {
    if (z.size() != dims_) detail::fail(ErrorKind::dimension_mismatch, "basis evaluation point has wrong dimension");
    Eigen::MatrixXd table(max_degree_ + 1, dims_);
    for (int d = 0; d < dims_; ++d) {
        table(0, d) = 1.0;
        if (max_degree_ >= 1) table(1, d) = z(d);
        for (int n = 1; n < max_degree_; ++n) {
            table(n + 1, d) = (z(d) * table(n, d) - std::sqrt(double(n)) * table(n - 1, d)) / std::sqrt(n + 1.0);
        }
    }
    Eigen::VectorXd values(indices_.size());
    for (std::size_t i = 0; i < indices_.size(); ++i) {
        double v = 1.0;
        for (int d = 0; d < dims_; ++d) v *= table(indices_[i][d], d);
        values(static_cast<Eigen::Index>(i)) = v;
    }
    return values;
}

std::size_t HermiteBasis::count(int dims, int max_degree) {
    // C(max_degree + dims, dims)
    double c = 1.0;
    for (int k = 1; k <= dims; ++k) c = c * (max_degree + k) / k;
    return static_cast<std::size_t>(std::llround(c));
}

} // namespace logstab
