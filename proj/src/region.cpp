#include "logstab/region.hpp"

#include "logstab/errors.hpp"

#include <cmath>

namespace logstab::harness {

namespace {

// Signed offset of v from the nearest slab centre.
double centre_offset(const SlabLayout& layout, double v) {
    const double p = layout.period();
    const double d = v - layout.offset;
    return d - p * std::round(d / p);
}

} // namespace

ObservationRegion ObservationRegion::full() {
    ObservationRegion region;
    region.kind_ = RegionKind::full;
    return region;
}

ObservationRegion ObservationRegion::slabs(const SlabLayout& layout, double r, double delta) {
    detail::require(r > 0.0 && delta > 0.0, "cover constants r and delta must be > 0");
    detail::require(layout.axis >= 0, "slab axis must be >= 0");
    detail::require(layout.gap >= 0.0, "slab gap must be >= 0");
    detail::require(layout.half_width >= r, "slab half-width must be >= r");
    ObservationRegion region;
    region.kind_ = RegionKind::slabs;
    region.layout_ = layout;
    region.r_ = r;
    region.delta_ = delta;
    return region;
}

ObservationRegion ObservationRegion::custom(Eigen::MatrixXd nodes, std::vector<bool> mask, double r, double delta) {
    detail::require(r > 0.0 && delta > 0.0, "cover constants r and delta must be > 0");
    if (static_cast<std::size_t>(nodes.cols()) != mask.size()) {
        detail::fail(ErrorKind::dimension_mismatch, "mask length differs from the node count");
    }
    ObservationRegion region;
    region.kind_ = RegionKind::custom_mask;
    region.nodes_ = std::move(nodes);
    region.mask_ = std::move(mask);
    region.r_ = r;
    region.delta_ = delta;
    return region;
}

std::vector<bool> ObservationRegion::mask_for(const Eigen::MatrixXd& points) const {
    const auto count = static_cast<std::size_t>(points.cols());
    switch (kind_) {
    case RegionKind::full: return std::vector<bool>(count, true);
    case RegionKind::slabs: {
        if (layout_.axis >= points.rows()) detail::fail(ErrorKind::dimension_mismatch, "slab axis exceeds dimension");
        std::vector<bool> out(count);
        for (std::size_t q = 0; q < count; ++q) {
            out[q] = std::abs(centre_offset(layout_, points(layout_.axis, static_cast<Eigen::Index>(q)))) <=
                     layout_.half_width;
        }
        return out;
    }
    case RegionKind::custom_mask:
        if (points.rows() != nodes_.rows() || points.cols() != nodes_.cols() ||
            !points.isApprox(nodes_, 1e-12)) {
            detail::fail(ErrorKind::dimension_mismatch, "custom mask was built on a different node set");
        }
        return mask_;
    }
    return {};
}

bool region_satisfies_cover(const ObservationRegion& region, double domain_radius) {
    detail::require(domain_radius > 0.0, "domain radius must be > 0");
    switch (region.kind()) {
    case RegionKind::full: return true;
    case RegionKind::slabs: {
        // Admissible centres form the cores |offset| <= half_width - r; the distance from y
        // to them is max(0, |offset(y)| - core), maximal at ±R or at gap midpoints.
        const auto& layout = region.layout();
        const double core = layout.half_width - region.r();
        auto distance = [&](double v) { return std::max(0.0, std::abs(centre_offset(layout, v)) - core); };
        double worst = std::max(distance(-domain_radius), distance(domain_radius));
        const double p = layout.period();
        const auto k_lo = static_cast<long>(std::floor((-domain_radius - layout.offset) / p - 0.5));
        const auto k_hi = static_cast<long>(std::ceil((domain_radius - layout.offset) / p + 0.5));
        for (long k = k_lo; k <= k_hi; ++k) {
            const double mid = layout.offset + (k + 0.5) * p;
            if (std::abs(mid) <= domain_radius) worst = std::max(worst, distance(mid));
        }
        return worst < region.delta();
    }
    case RegionKind::custom_mask: {
        const auto& nodes = region.nodes();
        const auto& mask = region.mask();
        const auto n = nodes.cols();
        std::vector<Eigen::Index> centres;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!mask[static_cast<std::size_t>(i)]) continue;
            bool inside = true;
            for (Eigen::Index j = 0; j < n && inside; ++j) {
                if (!mask[static_cast<std::size_t>(j)] && (nodes.col(j) - nodes.col(i)).norm() <= region.r()) {
                    inside = false;
                }
            }
            if (inside) centres.push_back(i);
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            if (nodes.col(j).norm() > domain_radius) continue;
            bool reached = false;
            for (auto c : centres) {
                if ((nodes.col(j) - nodes.col(c)).norm() < region.delta()) {
                    reached = true;
                    break;
                }
            }
            if (!reached) return false;
        }
        return true;
    }
    }
    return false;
}

} // namespace logstab::harness
