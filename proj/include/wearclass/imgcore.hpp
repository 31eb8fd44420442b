/**
 * @file imgcore.hpp
 * @brief Binary-region primitives: labelling, boundary tracing, convex hulls,
 *        second-order moments and disc-structuring-element morphology.
 *
 * Conventions used throughout the library:
 *  - foreground is 8-connected, background 4-connected;
 *  - coordinates are (x, y) with y growing downwards. "Counter-clockwise" means a
 *    positive shoelace sum in these coordinates, which appears clockwise on screen.
 */
#pragma once

#include "wearclass/image.hpp"

#include <span>
#include <vector>

namespace wearclass {

struct BoundingBox {
    int xmin = 0;
    int ymin = 0;
    int xmax = 0;
    int ymax = 0;

    int width() const { return xmax - xmin + 1; }
    int height() const { return ymax - ymin + 1; }
    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/**
 * @brief A nonempty connected set of pixels with cached geometry.
 *
 * Pixels are stored in row-major order without duplicates.
 */
class BinaryRegion {
public:
    /// Throws std::invalid_argument when @p pixels is empty.
    explicit BinaryRegion(std::vector<Point> pixels);

    const std::vector<Point>& pixels() const { return pixels_; }
    std::size_t area() const { return pixels_.size(); }
    Vec2 centroid() const { return centroid_; }
    const BoundingBox& bbox() const { return bbox_; }

    /// Tight raster of the region; pixel (x, y) maps to (x - bbox.xmin + pad, y - bbox.ymin + pad).
    BinaryMask to_local_mask(int pad = 0) const;
    /// Raster of the region inside a canvas of the given size (pixels outside are dropped).
    BinaryMask to_mask(int width, int height) const;

private:
    std::vector<Point> pixels_;
    Vec2 centroid_;
    BoundingBox bbox_;
};

/// Closed boundary loop; the first point is not repeated at the end.
struct Contour {
    std::vector<Point> points;
    std::size_t size() const { return points.size(); }
};

/// Ellipse with the same second central moments as a region.
struct MomentEllipse {
    double a = 0.0;      ///< semi-major length
    double b = 0.0;      ///< semi-minor length
    double c = 0.0;      ///< focal half-distance, sqrt(a^2 - b^2)
    double theta = 0.0;  ///< major-axis orientation in radians, (-pi/2, pi/2]

    double eccentricity() const { return a > 0.0 ? c / a : 0.0; }
};

/// Maximal 8-connected foreground components, largest first (ties by first pixel, row-major).
std::vector<BinaryRegion> connected_components(const BinaryMask& mask);

/// Moore-neighbour boundary trace starting at the topmost-leftmost pixel.
Contour trace_boundary(const BinaryRegion& region);

/// Monotone-chain hull, counter-clockwise, collinear points dropped.
/// Collinear input yields the two extremes; a single distinct point yields itself.
std::vector<Point> convex_hull(std::span<const Point> points);

/// Signed shoelace area; nonnegative for counter-clockwise vertices, zero below three vertices.
double polygon_area(std::span<const Point> polygon);
double polygon_area(std::span<const Vec2> polygon);

/// Lattice points on the boundary of a closed integer polygon (sum of per-edge gcds).
long long polygon_boundary_lattice_points(std::span<const Point> polygon);

MomentEllipse second_central_moments(const BinaryRegion& region);

enum class MorphOp { dilate, erode, close, open, fill_holes };

/**
 * @brief Set morphology with a disc structuring element of radius @p se_radius.
 *
 * Dilation treats pixels outside the raster as background and erosion ignores them,
 * which keeps the pair an adjunction on the finite canvas (closing is extensive and
 * idempotent, opening anti-extensive). fill_holes ignores @p se_radius.
 */
BinaryMask morphology(const BinaryMask& mask, MorphOp op, int se_radius = 1);

/// Sets every background pixel not 4-connected to the raster border.
BinaryMask fill_holes(const BinaryMask& mask);

/// Largest component of @p mask, or throws DataError("empty shape").
BinaryRegion largest_region(const BinaryMask& mask);

}  // namespace wearclass
