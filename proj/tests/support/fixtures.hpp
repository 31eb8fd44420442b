// Raster fixtures and independent oracles shared by the test suites.
#pragma once

#include "wearclass/imgcore.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace fixtures {

using wearclass::BinaryMask;
using wearclass::GrayImage;
using wearclass::Point;

/// Pixels whose integer centre (x, y) satisfies @p inside.
BinaryMask rasterize(int width, int height, const std::function<bool(double, double)>& inside);

/// Ellipse with semi-axes (a, b), major axis at @p angle_rad (image coordinates), centred at (cx, cy).
BinaryMask ellipse(int width, int height, double cx, double cy, double a, double b, double angle_rad);
BinaryMask disc(int width, int height, double cx, double cy, double radius);
BinaryMask rect(int width, int height, int x0, int y0, int w, int h);

/// Rhombus with half-diagonals (p, q), the p diagonal at @p angle_rad; pixels inside get
/// @p inside, the rest @p outside.
GrayImage rhombus_image(int width, int height, double cx, double cy, double p, double q, double angle_rad,
                        std::uint8_t inside = 160, std::uint8_t outside = 20);

/// 500 x 500 rhombus insert (half-diagonals 200, 130) turned by @p angle, with bright wear
/// strips along the two sides facing +u+v and -u-v.
GrayImage worn_insert(double angle);

/// Random mask with independent pixels.
BinaryMask random_mask(int width, int height, double density, std::mt19937_64& rng);
/// Union of a few random discs: blob-like masks.
BinaryMask random_blobs(int width, int height, int count, std::mt19937_64& rng);

/// Brute-force component labelling (iterated min-label propagation).
std::vector<int> brute_force_labels(const BinaryMask& mask);

/// Hull vertices by checking every ordered pair (O(n^3)); returned sorted row-major.
std::vector<Point> brute_force_hull(const std::vector<Point>& points);

/// Foreground pixels with a 4-neighbour in the background or outside the raster.
std::size_t boundary_pixel_count(const BinaryMask& mask);

}  // namespace fixtures
