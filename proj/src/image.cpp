#include "wearclass/image.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <memory>

namespace wearclass {

BinaryMask::BinaryMask(int width, int height, bool fill)
    : width_(width), height_(height),
      bits_(static_cast<std::size_t>(std::max(width, 0)) * static_cast<std::size_t>(std::max(height, 0)),
            fill ? 1 : 0) {
    if (width < 0 || height < 0) throw std::invalid_argument("BinaryMask: negative dimensions");
}

std::size_t BinaryMask::count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height),
      data_(static_cast<std::size_t>(std::max(width, 0)) * static_cast<std::size_t>(std::max(height, 0)), fill) {
    if (width < 0 || height < 0) throw std::invalid_argument("GrayImage: negative dimensions");
}

BinaryMask threshold(const GrayImage& image, int level) {
    BinaryMask mask(image.width(), image.height());
    for (int y = 0; y < image.height(); ++y)
        for (int x = 0; x < image.width(); ++x)
            if (image(x, y) > level) mask.set(x, y);
    return mask;
}

GrayImage to_gray(const BinaryMask& mask) {
    GrayImage out(mask.width(), mask.height());
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            out(x, y) = mask(x, y) ? 255 : 0;
    return out;
}

namespace {

int normalize_turns(int quarter_turns) { return ((quarter_turns % 4) + 4) % 4; }

// Destination (x', y') of source (x, y) for a clockwise (as displayed) rotation.
template <typename Raster, typename Get, typename Put>
Raster rotate_impl(const Raster& src, int quarter_turns, Get get, Put put) {
    const int turns = normalize_turns(quarter_turns);
    const int w = src.width();
    const int h = src.height();
    Raster dst = (turns % 2 == 0) ? Raster(w, h) : Raster(h, w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int nx = x, ny = y;
            switch (turns) {
                case 1: nx = h - 1 - y; ny = x; break;
                case 2: nx = w - 1 - x; ny = h - 1 - y; break;
                case 3: nx = y; ny = w - 1 - x; break;
                default: break;
            }
            put(dst, nx, ny, get(src, x, y));
        }
    }
    return dst;
}

}  // namespace

BinaryMask rotate90(const BinaryMask& mask, int quarter_turns) {
    return rotate_impl(
        mask, quarter_turns, [](const BinaryMask& m, int x, int y) { return m(x, y); },
        [](BinaryMask& m, int x, int y, bool v) { m.set(x, y, v); });
}

GrayImage rotate90(const GrayImage& image, int quarter_turns) {
    return rotate_impl(
        image, quarter_turns, [](const GrayImage& m, int x, int y) { return m(x, y); },
        [](GrayImage& m, int x, int y, std::uint8_t v) { m(x, y) = v; });
}

namespace {

using FilePtr = std::unique_ptr<std::FILE, int (*)(std::FILE*)>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr fp(std::fopen(path.c_str(), mode), &std::fclose);
    if (!fp) throw DataError("cannot open " + path.string());
    return fp;
}

// Skips whitespace and '#' comments in a PNM header.
void skip_pnm_space(std::istream& in) {
    while (in) {
        const int c = in.peek();
        if (c == '#') {
            std::string discard;
            std::getline(in, discard);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
}

GrayImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::string magic;
    in >> magic;
    if (magic != "P5") throw DataError(path.string() + ": only binary PGM (P5) is supported");
    int width = 0, height = 0, maxval = 0;
    skip_pnm_space(in);
    in >> width;
    skip_pnm_space(in);
    in >> height;
    skip_pnm_space(in);
    in >> maxval;
    in.get();
    if (!in || width <= 0 || height <= 0 || maxval <= 0 || maxval > 255)
        throw DataError(path.string() + ": malformed PGM header");
    GrayImage image(width, height);
    in.read(reinterpret_cast<char*>(image.data().data()), static_cast<std::streamsize>(image.data().size()));
    if (in.gcount() != static_cast<std::streamsize>(image.data().size()))
        throw DataError(path.string() + ": truncated PGM data");
    if (maxval != 255)
        for (auto& v : image.data()) v = static_cast<std::uint8_t>(std::min(255, v * 255 / maxval));
    return image;
}

GrayImage read_png(const std::filesystem::path& path) {
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&img, path.c_str()))
        throw DataError(path.string() + ": " + img.message);
    img.format = PNG_FORMAT_GRAY;
    GrayImage image(static_cast<int>(img.width), static_cast<int>(img.height));
    if (!png_image_finish_read(&img, nullptr, image.data().data(), 0, nullptr)) {
        png_image_free(&img);
        throw DataError(path.string() + ": " + img.message);
    }
    return image;
}

}  // namespace

GrayImage read_gray(const std::filesystem::path& path) {
    unsigned char magic[8] = {};
    {
        auto fp = open_file(path, "rb");
        if (std::fread(magic, 1, sizeof(magic), fp.get()) < 2) throw DataError(path.string() + ": file too short");
    }
    if (magic[0] == 'P' && magic[1] == '5') return read_pgm(path);
    if (png_sig_cmp(magic, 0, 8) == 0) return read_png(path);
    throw DataError(path.string() + ": unrecognised image format (expected PGM P5 or PNG)");
}

BinaryMask read_mask(const std::filesystem::path& path, int level) { return threshold(read_gray(path), level); }

void write_png(const std::filesystem::path& path, const GrayImage& image) {
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(image.width());
    img.height = static_cast<png_uint_32>(image.height());
    img.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&img, path.c_str(), 0, image.data().data(), 0, nullptr))
        throw DataError(path.string() + ": " + img.message);
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.data().data()), static_cast<std::streamsize>(image.data().size()));
    if (!out) throw DataError("cannot write " + path.string());
}

}  // namespace wearclass
