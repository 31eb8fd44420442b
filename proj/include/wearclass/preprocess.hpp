/**
 * @file preprocess.hpp
 * @brief From an insert image to per-edge wear masks: insert location, centre removal,
 *        cutting-edge bands, rotation to horizontal and wear segmentation.
 */
#pragma once

#include "wearclass/imgcore.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wearclass {

enum class EdgeSide { north, east, south, west };

std::string_view side_name(EdgeSide side);
/// Throws std::invalid_argument for anything but north/east/south/west.
EdgeSide parse_side(std::string_view name);

enum class Completeness { complete, incomplete };

std::string_view completeness_name(Completeness c);
Completeness parse_completeness(std::string_view name);

struct InsertGeometry {
    Vec2 centroid;
    double major_diagonal_d = 0.0;
    double center_radius_r = 0.0;  ///< major_diagonal_d / diagonal_ratio
};

struct PreprocessOptions {
    int insert_threshold = 127;
    double diagonal_ratio = 4.92;
    double edge_fraction = 0.25;   ///< Sobel magnitude kept at or above this fraction of the maximum
    int edge_closing_radius = 2;
    int band_radius = 8;           ///< dilation of the edge band searched for wear
    double min_contrast = 20.0;    ///< minimum gap between Otsu class means
    int wear_closing_radius = 2;
};

struct LocatedInsert {
    BinaryRegion region;
    InsertGeometry geometry;
    std::vector<Point> hull;
};

/// Largest component of the thresholded image. D is the largest distance between hull
/// vertices and R = D / diagonal_ratio. Throws DataError("no insert found").
LocatedInsert locate_insert(const GrayImage& image, int level = 127, double diagonal_ratio = 4.92);

/// The region on a width x height canvas minus the disc of radius R around the centroid.
BinaryMask remove_center(const BinaryRegion& region, const InsertGeometry& geometry, int width, int height);

/// The four insert corners: ends of the major diagonal and the hull points farthest from it
/// on either side, ordered by angle around the centroid.
std::array<Vec2, 4> insert_corners(const LocatedInsert& insert);

struct CuttingEdgeCrop {
    GrayImage image;                   ///< rotated crop
    BinaryMask band;                   ///< edge pixels of this side, same frame as image
    std::optional<BinaryMask> insert;  ///< insert footprint in the crop, when known
    EdgeSide side = EdgeSide::north;   ///< position before rotation
    int rotation_applied = 0;          ///< degrees clockwise as displayed: 0, 90, 180 or 270
    std::vector<Point> source_band;    ///< band pixels in source image coordinates
};

/// Sobel magnitude over the image.
std::vector<double> sobel_magnitude(const GrayImage& image);

/**
 * @brief Splits the closed Sobel edge map of the insert into four side bands.
 *
 * Sides are wedges between consecutive corners seen from the centroid; the side whose
 * outward normal is nearest to up is north, the rest follow clockwise as displayed.
 * Each crop is turned by the quarter turn that brings its outward normal closest to up.
 * Throws DataError naming the sides without edge pixels.
 */
std::array<CuttingEdgeCrop, 4> extract_cutting_edges(const GrayImage& image, const LocatedInsert& insert,
                                                     const PreprocessOptions& options = {});

/// Otsu threshold over the 256-bin histogram of @p values; returns the level t with foreground = value > t.
int otsu_level(const std::vector<std::uint8_t>& values);

/**
 * @brief Bright wear region near the edge band.
 *
 * Otsu inside the dilated band (and inside the insert when known), closing, hole filling,
 * largest component. Empty when nothing stands out by at least min_contrast.
 */
BinaryMask segment_wear_region(const CuttingEdgeCrop& crop, const PreprocessOptions& options = {});

/// Complete when the mask's bounding box is at least as wide as it is tall (empty masks count as complete).
Completeness classify_completeness(const BinaryMask& wear);

struct EdgeWear {
    EdgeSide side = EdgeSide::north;
    int rotation_applied = 0;
    Completeness completeness = Completeness::complete;
    BinaryMask mask;  ///< in the rotated crop frame
};

/// Full chain for one insert image, sides in N, E, S, W order.
std::vector<EdgeWear> process_insert(const GrayImage& image, const PreprocessOptions& options = {});

}  // namespace wearclass
