#include "wearclass/shapefeat.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wearclass {

const std::array<std::string_view, 10>& shapefeat_names() {
    static constexpr std::array<std::string_view, 10> names = {
        "convex_area", "eccentricity",      "perimeter",         "equivalent_diameter", "extent",
        "filled_area", "minor_axis_length", "major_axis_length", "r",                   "solidity"};
    return names;
}

std::array<double, 10> ShapeFeatVector::values() const {
    return {convex_area, eccentricity,      perimeter,         equivalent_diameter, extent,
            filled_area, minor_axis_length, major_axis_length, r,                   solidity};
}

ShapeFeatVector compute_shapefeat(const BinaryRegion& region, const ShapeFeatOptions& options) {
    ShapeFeatVector f;
    const auto area = static_cast<double>(region.area());

    const auto hull = convex_hull(region.pixels());
    f.convex_area = std::abs(polygon_area(hull));
    if (options.convex_area_correction)
        f.convex_area += 0.5 * static_cast<double>(polygon_boundary_lattice_points(hull)) + 1.0;

    const MomentEllipse ellipse = second_central_moments(region);
    f.eccentricity = std::clamp(ellipse.eccentricity(), 0.0, 1.0);
    f.major_axis_length = 2.0 * ellipse.a;
    f.minor_axis_length = 2.0 * ellipse.b;
    f.r = ellipse.a > 0.0 ? ellipse.b / ellipse.a : 1.0;

    f.perimeter = static_cast<double>(trace_boundary(region).size());
    f.equivalent_diameter = std::sqrt(4.0 * area / std::numbers::pi);

    const auto& box = region.bbox();
    f.extent = area / (static_cast<double>(box.width()) * box.height());

    f.filled_area = static_cast<double>(fill_holes(region.to_local_mask(1)).count());
    f.solidity = f.convex_area > 0.0 ? area / f.convex_area : 1.0;
    return f;
}

ShapeFeatVector compute_shapefeat(const BinaryMask& mask, const ShapeFeatOptions& options) {
    return compute_shapefeat(largest_region(mask), options);
}

}  // namespace wearclass
