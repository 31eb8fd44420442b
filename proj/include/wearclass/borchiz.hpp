/**
 * @file borchiz.hpp
 * @brief B-ORCHIZ contour descriptor: Zernike magnitudes of a normalized 128x128
 *        shape raster plus two local boundary descriptors.
 *
 * The local blocks are reconstructions. Their original definitions live in the
 * descriptor's own publication; here they are built to keep the properties that
 * matter downstream (boundary-orientation content, locality, rotation invariance):
 *  - boundary_orientation_chain(): histogram of tangent directions taken between
 *    contour points a fixed stride apart, after Gaussian smoothing of the contour,
 *    with linear votes into the two nearest bins. Directions are measured from the
 *    modal direction (modal bin refined to a fractional bin), so bin 0 holds the mode;
 *  - gradient_cooccurrence(): co-occurrence of the tangent direction at i and at
 *    i + offset, both measured from that same modal direction.
 * compute_borchiz() traces the contour on a copy resampled to a fixed extent, so the
 * local blocks see the same point density at any input scale.
 */
#pragma once

#include "wearclass/imgcore.hpp"

#include <string>
#include <vector>

namespace wearclass {

/// 128x128 raster with graded values in [0, 255].
class NormalizedShape {
public:
    static constexpr int kSize = 128;

    NormalizedShape() : values_(static_cast<std::size_t>(kSize) * kSize, 0.0) {}

    double operator()(int x, int y) const { return values_[static_cast<std::size_t>(y) * kSize + x]; }
    double& operator()(int x, int y) { return values_[static_cast<std::size_t>(y) * kSize + x]; }
    const std::vector<double>& values() const { return values_; }

private:
    std::vector<double> values_;
};

struct ZernikeIndex {
    int n = 0;  ///< order
    int m = 0;  ///< repetition, m <= n and n - m even
    friend bool operator==(const ZernikeIndex&, const ZernikeIndex&) = default;
};

/// (n, m) pairs with m >= 0 in lexicographic order; 36 pairs for order 10.
std::vector<ZernikeIndex> zernike_indices(int max_order);

/// Crops the foreground bounding box and resamples it bilinearly onto 128x128 (0 -> 0, 1 -> 255).
NormalizedShape normalize_shape(const BinaryMask& mask);

/// Crops the foreground bounding box and resamples it bilinearly so the longer side is
/// @p extent pixels, keeping the aspect ratio. Samples at or above half coverage are foreground.
BinaryMask resize_to_extent(const BinaryMask& mask, int extent = 64);

/**
 * @brief |A_nm| for all indices up to @p max_order.
 *
 * A_nm = (n+1)/pi * sum f(x,y) V*_nm(rho,theta) dA over the disc inscribed in the frame.
 * Each pixel's basis value is integrated over an 8x8 grid of sub-samples, dropping
 * sub-samples that fall outside the unit disc. Radial polynomials use the q-recursive method.
 */
std::vector<double> zernike_magnitudes(const NormalizedShape& image, int max_order = 10);

/// R_nm(rho) by the q-recursive method, indexed [n][m] (entries with n-m odd are zero).
std::vector<std::vector<double>> zernike_radial_table(double rho, int max_order);

std::vector<double> boundary_orientation_chain(const Contour& contour, int bins = 16, int stride = 3,
                                               double smoothing = 6.0);

/// Row-major bins x bins matrix; nonzero rows sum to one. Zero matrix if the contour is too short.
std::vector<double> gradient_cooccurrence(const Contour& contour, int bins = 16, int offset = 5, int stride = 3,
                                          double smoothing = 6.0);

struct BorchizOptions {
    int max_order = 10;
    int bins = 16;
    int stride = 3;
    int offset = 5;
    int contour_extent = 64;
    double smoothing = 6.0;  ///< Gaussian sigma along the contour, in points
};

struct BorchizVector {
    std::vector<double> zernike_mags;
    std::vector<double> boc_hist;
    std::vector<double> iegcm_flat;

    /// [zernike | boc | iegcm]
    std::vector<double> flatten() const;
};

/// Zernike block from normalize_shape(mask); local blocks from the boundary of the largest
/// component of resize_to_extent(mask, options.contour_extent). Each block is L2-normalized (all-zero blocks stay zero).
BorchizVector compute_borchiz(const BinaryMask& mask, const BorchizOptions& options = {});

std::size_t borchiz_length(const BorchizOptions& options = {});
std::vector<std::string> borchiz_names(const BorchizOptions& options = {});

}  // namespace wearclass
