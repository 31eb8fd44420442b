/**
 * @file shapefeat.hpp
 * @brief ShapeFeat: ten scalar shape features of a binary wear region.
 */
#pragma once

#include "wearclass/imgcore.hpp"

#include <array>
#include <string_view>

namespace wearclass {

struct ShapeFeatVector {
    double convex_area = 0.0;
    double eccentricity = 0.0;
    double perimeter = 0.0;
    double equivalent_diameter = 0.0;
    double extent = 0.0;
    double filled_area = 0.0;
    double minor_axis_length = 0.0;
    double major_axis_length = 0.0;
    double r = 0.0;
    double solidity = 0.0;

    /// Values in canonical order (see shapefeat_names()).
    std::array<double, 10> values() const;
};

struct ShapeFeatOptions {
    /// Adds half the hull's boundary lattice count plus one to the shoelace area (Pick's
    /// theorem), so convex_area counts the pixel centres inside the hull.
    bool convex_area_correction = true;
};

/// Canonical feature order used by every serialization and by feature ranking.
const std::array<std::string_view, 10>& shapefeat_names();

ShapeFeatVector compute_shapefeat(const BinaryRegion& region, const ShapeFeatOptions& options = {});

/// Features of the largest component of @p mask; throws DataError("empty shape") if none.
ShapeFeatVector compute_shapefeat(const BinaryMask& mask, const ShapeFeatOptions& options = {});

}  // namespace wearclass
