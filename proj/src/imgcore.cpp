#include "wearclass/imgcore.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace wearclass {

BinaryRegion::BinaryRegion(std::vector<Point> pixels) : pixels_(std::move(pixels)) {
    if (pixels_.empty()) throw std::invalid_argument("BinaryRegion: empty pixel set");
    std::sort(pixels_.begin(), pixels_.end(), row_major_less);
    pixels_.erase(std::unique(pixels_.begin(), pixels_.end()), pixels_.end());

    double sx = 0.0, sy = 0.0;
    bbox_ = {pixels_.front().x, pixels_.front().y, pixels_.front().x, pixels_.front().y};
    for (const auto& p : pixels_) {
        sx += p.x;
        sy += p.y;
        bbox_.xmin = std::min(bbox_.xmin, p.x);
        bbox_.xmax = std::max(bbox_.xmax, p.x);
        bbox_.ymin = std::min(bbox_.ymin, p.y);
        bbox_.ymax = std::max(bbox_.ymax, p.y);
    }
    const auto n = static_cast<double>(pixels_.size());
    centroid_ = {sx / n, sy / n};
}

BinaryMask BinaryRegion::to_local_mask(int pad) const {
    BinaryMask mask(bbox_.width() + 2 * pad, bbox_.height() + 2 * pad);
    for (const auto& p : pixels_) mask.set(p.x - bbox_.xmin + pad, p.y - bbox_.ymin + pad);
    return mask;
}

BinaryMask BinaryRegion::to_mask(int width, int height) const {
    BinaryMask mask(width, height);
    for (const auto& p : pixels_)
        if (mask.in_bounds(p.x, p.y)) mask.set(p.x, p.y);
    return mask;
}

namespace {

constexpr std::array<Point, 8> kNeighbors8 = {{{-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1}}};
constexpr std::array<Point, 4> kNeighbors4 = {{{0, -1}, {-1, 0}, {1, 0}, {0, 1}}};

}  // namespace

std::vector<BinaryRegion> connected_components(const BinaryMask& mask) {
    const int w = mask.width();
    const int h = mask.height();
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0);
    auto idx = [w](int x, int y) { return static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + x; };

    std::vector<BinaryRegion> regions;
    std::vector<Point> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask(x, y) || seen[idx(x, y)]) continue;
            std::vector<Point> pixels;
            stack.push_back({x, y});
            seen[idx(x, y)] = 1;
            while (!stack.empty()) {
                const Point p = stack.back();
                stack.pop_back();
                pixels.push_back(p);
                for (const auto& d : kNeighbors8) {
                    const int nx = p.x + d.x, ny = p.y + d.y;
                    if (mask.at(nx, ny) && !seen[idx(nx, ny)]) {
                        seen[idx(nx, ny)] = 1;
                        stack.push_back({nx, ny});
                    }
                }
            }
            regions.emplace_back(std::move(pixels));
        }
    }
    // Discovery order is row-major by first pixel, so a stable sort keeps that as the tie-break.
    std::stable_sort(regions.begin(), regions.end(),
                     [](const BinaryRegion& a, const BinaryRegion& b) { return a.area() > b.area(); });
    return regions;
}

BinaryRegion largest_region(const BinaryMask& mask) {
    auto regions = connected_components(mask);
    if (regions.empty()) throw DataError("empty shape");
    return std::move(regions.front());
}

Contour trace_boundary(const BinaryRegion& region) {
    constexpr int pad = 1;
    const BinaryMask local = region.to_local_mask(pad);
    const int ox = region.bbox().xmin - pad;
    const int oy = region.bbox().ymin - pad;

    // Clockwise as displayed, starting west.
    constexpr std::array<Point, 8> dirs = {{{-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}}};
    auto dir_index = [&](Point d) {
        for (int i = 0; i < 8; ++i)
            if (dirs[i] == d) return i;
        throw std::logic_error("trace_boundary: non-adjacent backtrack");
    };

    struct State {
        Point pixel;
        int backtrack;  // index into dirs of the background neighbour we came from
        bool operator==(const State&) const = default;
    };

    // Moves to the next boundary pixel; returns false for an isolated pixel.
    auto step = [&](const State& s, State& next) {
        for (int k = 0; k < 8; ++k) {
            const int i = (s.backtrack + k) % 8;
            const Point q{s.pixel.x + dirs[i].x, s.pixel.y + dirs[i].y};
            if (local.at(q.x, q.y)) {
                const int prev = (i + 7) % 8;
                const Point b{s.pixel.x + dirs[prev].x, s.pixel.y + dirs[prev].y};
                next = {q, dir_index({b.x - q.x, b.y - q.y})};
                return true;
            }
        }
        return false;
    };

    const Point start{region.pixels().front().x - ox, region.pixels().front().y - oy};
    Contour contour;
    contour.points.push_back({start.x + ox, start.y + oy});

    State first{};
    if (!step({start, 0}, first)) return contour;

    // The trace closes when the first move out of the start pixel is about to repeat.
    const std::size_t limit = 4 * region.area() + 8;
    State cur = first;
    while (contour.points.size() <= limit) {
        contour.points.push_back({cur.pixel.x + ox, cur.pixel.y + oy});
        State next{};
        step(cur, next);
        if (cur.pixel == start && next == first) {
            contour.points.pop_back();
            break;
        }
        cur = next;
    }
    return contour;
}

namespace {

long long cross(const Point& o, const Point& a, const Point& b) {
    return static_cast<long long>(a.x - o.x) * (b.y - o.y) - static_cast<long long>(a.y - o.y) * (b.x - o.x);
}

}  // namespace

std::vector<Point> convex_hull(std::span<const Point> points) {
    std::vector<Point> pts(points.begin(), points.end());
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;

    std::vector<Point> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    const std::size_t lower = k + 1;
    for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], *it) <= 0) --k;
        hull[k++] = *it;
    }
    hull.resize(k - 1);
    return hull;
}

namespace {

template <typename P>
double shoelace(std::span<const P> poly) {
    if (poly.size() < 3) return 0.0;
    double twice = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto& a = poly[i];
        const auto& b = poly[(i + 1) % poly.size()];
        twice += static_cast<double>(a.x) * b.y - static_cast<double>(b.x) * a.y;
    }
    return 0.5 * twice;
}

}  // namespace

double polygon_area(std::span<const Point> polygon) { return shoelace(polygon); }
double polygon_area(std::span<const Vec2> polygon) { return shoelace(polygon); }

long long polygon_boundary_lattice_points(std::span<const Point> polygon) {
    if (polygon.size() < 2) return 0;
    long long total = 0;
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        const auto& a = polygon[i];
        const auto& b = polygon[(i + 1) % polygon.size()];
        total += std::gcd(std::abs(b.x - a.x), std::abs(b.y - a.y));
    }
    return total;
}

MomentEllipse second_central_moments(const BinaryRegion& region) {
    const Vec2 c = region.centroid();
    double mu20 = 0.0, mu02 = 0.0, mu11 = 0.0;
    for (const auto& p : region.pixels()) {
        const double dx = p.x - c.x;
        const double dy = p.y - c.y;
        mu20 += dx * dx;
        mu02 += dy * dy;
        mu11 += dx * dy;
    }
    const auto n = static_cast<double>(region.area());
    // Unit-square pixels: each contributes its own variance 1/12 along both axes.
    mu20 = mu20 / n + 1.0 / 12.0;
    mu02 = mu02 / n + 1.0 / 12.0;
    mu11 = mu11 / n;

    const double half_trace = 0.5 * (mu20 + mu02);
    const double disc = std::sqrt(0.25 * (mu20 - mu02) * (mu20 - mu02) + mu11 * mu11);
    const double lmax = half_trace + disc;
    const double lmin = std::max(half_trace - disc, 0.0);

    MomentEllipse e;
    e.a = 2.0 * std::sqrt(lmax);
    e.b = 2.0 * std::sqrt(lmin);
    e.c = std::sqrt(std::max(e.a * e.a - e.b * e.b, 0.0));
    e.theta = (disc == 0.0) ? 0.0 : 0.5 * std::atan2(2.0 * mu11, mu20 - mu02);
    return e;
}

namespace {

std::vector<Point> disc_offsets(int radius) {
    std::vector<Point> offsets;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dx * dx + dy * dy <= radius * radius) offsets.push_back({dx, dy});
    return offsets;
}

BinaryMask dilate(const BinaryMask& in, const std::vector<Point>& se) {
    BinaryMask out(in.width(), in.height());
    for (int y = 0; y < in.height(); ++y)
        for (int x = 0; x < in.width(); ++x) {
            if (!in(x, y)) continue;
            for (const auto& d : se)
                if (out.in_bounds(x + d.x, y + d.y)) out.set(x + d.x, y + d.y);
        }
    return out;
}

BinaryMask erode(const BinaryMask& in, const std::vector<Point>& se) {
    BinaryMask out(in.width(), in.height());
    for (int y = 0; y < in.height(); ++y)
        for (int x = 0; x < in.width(); ++x) {
            if (!in(x, y)) continue;
            bool keep = true;
            for (const auto& d : se) {
                const int nx = x + d.x, ny = y + d.y;
                if (in.in_bounds(nx, ny) && !in(nx, ny)) {
                    keep = false;
                    break;
                }
            }
            if (keep) out.set(x, y);
        }
    return out;
}

}  // namespace

BinaryMask fill_holes(const BinaryMask& mask) {
    const int w = mask.width();
    const int h = mask.height();
    BinaryMask outside(w, h);
    std::vector<Point> stack;
    auto seed = [&](int x, int y) {
        if (!mask(x, y) && !outside(x, y)) {
            outside.set(x, y);
            stack.push_back({x, y});
        }
    };
    for (int x = 0; x < w; ++x) {
        seed(x, 0);
        seed(x, h - 1);
    }
    for (int y = 0; y < h; ++y) {
        seed(0, y);
        seed(w - 1, y);
    }
    while (!stack.empty()) {
        const Point p = stack.back();
        stack.pop_back();
        for (const auto& d : kNeighbors4) {
            const int nx = p.x + d.x, ny = p.y + d.y;
            if (mask.in_bounds(nx, ny)) seed(nx, ny);
        }
    }
    BinaryMask filled(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (!outside(x, y)) filled.set(x, y);
    return filled;
}

BinaryMask morphology(const BinaryMask& mask, MorphOp op, int se_radius) {
    if (op == MorphOp::fill_holes) return fill_holes(mask);
    if (se_radius < 1) throw std::invalid_argument("morphology: structuring element radius must be >= 1");
    const auto se = disc_offsets(se_radius);
    switch (op) {
        case MorphOp::dilate: return dilate(mask, se);
        case MorphOp::erode: return erode(mask, se);
        case MorphOp::close: return erode(dilate(mask, se), se);
        case MorphOp::open: return dilate(erode(mask, se), se);
        case MorphOp::fill_holes: break;
    }
    return mask;
}

}  // namespace wearclass
