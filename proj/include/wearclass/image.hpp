/**
 * @file image.hpp
 * @brief Raster containers (binary and 8-bit grayscale) and image file IO.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace wearclass {

/// Raised for malformed or unusable input data (unreadable files, empty shapes, ...).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Point {
    int x = 0;
    int y = 0;
    friend bool operator==(const Point&, const Point&) = default;
};

/// Row-major ordering: by y, then by x.
inline bool row_major_less(const Point& a, const Point& b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
}

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/**
 * @brief Row-major boolean raster.
 *
 * Out-of-bounds reads through at() return false (background).
 */
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height, bool fill = false);

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return width_ == 0 || height_ == 0; }

    bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
    bool at(int x, int y) const { return in_bounds(x, y) && bits_[index(x, y)] != 0; }
    bool operator()(int x, int y) const { return bits_[index(x, y)] != 0; }
    void set(int x, int y, bool value = true) { bits_[index(x, y)] = value ? 1 : 0; }

    std::size_t count() const;
    const std::vector<std::uint8_t>& bits() const { return bits_; }

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// 8-bit single-channel image.
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(int width, int height, std::uint8_t fill = 0);

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return width_ == 0 || height_ == 0; }
    bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    std::uint8_t operator()(int x, int y) const { return data_[index(x, y)]; }
    std::uint8_t& operator()(int x, int y) { return data_[index(x, y)]; }

    const std::vector<std::uint8_t>& data() const { return data_; }
    std::vector<std::uint8_t>& data() { return data_; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Pixels strictly greater than @p level become foreground.
BinaryMask threshold(const GrayImage& image, int level);
GrayImage to_gray(const BinaryMask& mask);

/// Quarter turns. A positive count turns the raster clockwise as displayed (y axis down).
BinaryMask rotate90(const BinaryMask& mask, int quarter_turns);
GrayImage rotate90(const GrayImage& image, int quarter_turns);

/// Reads an 8-bit grayscale PGM (P5) or PNG. Colour PNGs are converted to gray.
GrayImage read_gray(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const GrayImage& image);
void write_pgm(const std::filesystem::path& path, const GrayImage& image);

/// Loads an image and thresholds it (default foreground rule: value > 127).
BinaryMask read_mask(const std::filesystem::path& path, int level = 127);

}  // namespace wearclass
