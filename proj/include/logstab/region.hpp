#pragma once

#include <Eigen/Dense>

#include <vector>

namespace logstab::harness {

enum class RegionKind { full, slabs, custom_mask };

/// Parallel slabs {x : |x_axis - offset - kP| <= half_width}, period P = 2·half_width + gap.
struct SlabLayout {
    int axis = 0;
    double half_width = 1.0;
    double gap = 1.0;
    double offset = 0.0;

    [[nodiscard]] double period() const noexcept { return 2.0 * half_width + gap; }
};

/// Observation set ω with the net constants (r, δ) of the cover condition:
/// every y has a y' ∈ ω with B(y', r) ⊂ ω and |y - y'| < δ.
class ObservationRegion {
public:
    [[nodiscard]] static ObservationRegion full();
    /// Requires half_width >= r.
    [[nodiscard]] static ObservationRegion slabs(const SlabLayout& layout, double r, double delta);
    /// Indicator given per node; `nodes` holds one point per column.
    [[nodiscard]] static ObservationRegion custom(Eigen::MatrixXd nodes, std::vector<bool> mask, double r,
                                                  double delta);

    [[nodiscard]] RegionKind kind() const noexcept { return kind_; }
    [[nodiscard]] double r() const noexcept { return r_; }
    [[nodiscard]] double delta() const noexcept { return delta_; }
    [[nodiscard]] const SlabLayout& layout() const noexcept { return layout_; }
    [[nodiscard]] const Eigen::MatrixXd& nodes() const noexcept { return nodes_; }
    [[nodiscard]] const std::vector<bool>& mask() const noexcept { return mask_; }

    /// Indicator on an arbitrary node set. A custom mask only applies to its own nodes.
    [[nodiscard]] std::vector<bool> mask_for(const Eigen::MatrixXd& points) const;

private:
    RegionKind kind_ = RegionKind::full;
    double r_ = 1.0;
    double delta_ = 1.0;
    SlabLayout layout_;
    Eigen::MatrixXd nodes_;
    std::vector<bool> mask_;
};

/// Cover condition on the truncated domain {|y| <= domain_radius}: exact for
/// slabs, checked on the node grid for custom masks.
[[nodiscard]] bool region_satisfies_cover(const ObservationRegion& region, double domain_radius);

} // namespace logstab::harness
