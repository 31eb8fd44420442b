#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace fixtures {

BinaryMask rasterize(int width, int height, const std::function<bool(double, double)>& inside) {
    BinaryMask mask(width, height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            if (inside(x, y)) mask.set(x, y);
    return mask;
}

BinaryMask ellipse(int width, int height, double cx, double cy, double a, double b, double angle_rad) {
    const double c = std::cos(angle_rad), s = std::sin(angle_rad);
    return rasterize(width, height, [=](double x, double y) {
        const double dx = x - cx, dy = y - cy;
        const double u = (dx * c + dy * s) / a;
        const double v = (-dx * s + dy * c) / b;
        return u * u + v * v <= 1.0;
    });
}

BinaryMask disc(int width, int height, double cx, double cy, double radius) {
    return ellipse(width, height, cx, cy, radius, radius, 0.0);
}

BinaryMask rect(int width, int height, int x0, int y0, int w, int h) {
    BinaryMask mask(width, height);
    for (int y = y0; y < y0 + h; ++y)
        for (int x = x0; x < x0 + w; ++x)
            if (mask.in_bounds(x, y)) mask.set(x, y);
    return mask;
}

GrayImage rhombus_image(int width, int height, double cx, double cy, double p, double q, double angle_rad,
                        std::uint8_t inside, std::uint8_t outside) {
    const double c = std::cos(angle_rad), s = std::sin(angle_rad);
    GrayImage img(width, height, outside);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const double dx = x - cx, dy = y - cy;
            const double u = dx * c + dy * s;
            const double v = -dx * s + dy * c;
            if (std::abs(u) / p + std::abs(v) / q <= 1.0 + 1e-12) img(x, y) = inside;
        }
    return img;
}

BinaryMask random_mask(int width, int height, double density, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(density);
    BinaryMask mask(width, height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            if (coin(rng)) mask.set(x, y);
    return mask;
}

BinaryMask random_blobs(int width, int height, int count, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ux(0.25 * width, 0.75 * width);
    std::uniform_real_distribution<double> uy(0.25 * height, 0.75 * height);
    std::uniform_real_distribution<double> ur(3.0, 0.2 * std::min(width, height));
    BinaryMask mask(width, height);
    for (int i = 0; i < count; ++i) {
        const double cx = ux(rng), cy = uy(rng), r = ur(rng);
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x)
                if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) mask.set(x, y);
    }
    return mask;
}

std::vector<int> brute_force_labels(const BinaryMask& mask) {
    const int w = mask.width(), h = mask.height();
    std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (mask(x, y)) label[static_cast<std::size_t>(y) * w + x] = y * w + x;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                auto& l = label[static_cast<std::size_t>(y) * w + x];
                if (l < 0) continue;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (!mask.at(x + dx, y + dy)) continue;
                        const int other = label[static_cast<std::size_t>(y + dy) * w + (x + dx)];
                        if (other < l) {
                            l = other;
                            changed = true;
                        }
                    }
            }
    }
    return label;
}

std::vector<Point> brute_force_hull(const std::vector<Point>& points) {
    std::set<std::pair<int, int>> unique;
    for (const auto& p : points) unique.insert({p.x, p.y});
    std::vector<Point> pts;
    for (const auto& [x, y] : unique) pts.push_back({x, y});

    auto cross = [](const Point& o, const Point& a, const Point& b) {
        return static_cast<long long>(a.x - o.x) * (b.y - o.y) - static_cast<long long>(a.y - o.y) * (b.x - o.x);
    };
    // A point is a hull vertex iff it is an endpoint of an edge with every other point
    // strictly on one side or on the closed segment, and it is not strictly between other
    // collinear points.
    std::set<std::pair<int, int>> vertices;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (i == j) continue;
            bool edge = true;
            for (std::size_t k = 0; k < pts.size() && edge; ++k) {
                if (k == i || k == j) continue;
                const long long c = cross(pts[i], pts[j], pts[k]);
                if (c < 0) edge = false;
                if (c == 0) {
                    // collinear: must lie within the segment
                    const bool within = std::min(pts[i].x, pts[j].x) <= pts[k].x && pts[k].x <= std::max(pts[i].x, pts[j].x) &&
                                        std::min(pts[i].y, pts[j].y) <= pts[k].y && pts[k].y <= std::max(pts[i].y, pts[j].y);
                    if (!within) edge = false;
                }
            }
            if (edge) {
                vertices.insert({pts[i].x, pts[i].y});
                vertices.insert({pts[j].x, pts[j].y});
            }
        }
    std::vector<Point> out;
    for (const auto& [x, y] : vertices) out.push_back({x, y});
    std::sort(out.begin(), out.end(), wearclass::row_major_less);
    return out;
}

std::size_t boundary_pixel_count(const BinaryMask& mask) {
    std::size_t n = 0;
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask(x, y)) continue;
            if (!mask.at(x - 1, y) || !mask.at(x + 1, y) || !mask.at(x, y - 1) || !mask.at(x, y + 1)) ++n;
        }
    return n;
}

GrayImage worn_insert(double angle) {
    constexpr double cx = 250, cy = 250, p = 200, q = 130;
    GrayImage img = rhombus_image(500, 500, cx, cy, p, q, angle, 150, 20);
    const double c = std::cos(angle), s = std::sin(angle);
    const double norm = std::sqrt(1.0 / (p * p) + 1.0 / (q * q));
    for (int y = 0; y < 500; ++y)
        for (int x = 0; x < 500; ++x) {
            const double dx = x - cx, dy = y - cy;
            const double u = dx * c + dy * s;
            const double v = -dx * s + dy * c;
            if (u * v <= 0.0) continue;
            const double dist = (1.0 - std::abs(u) / p - std::abs(v) / q) / norm;
            if (dist >= 0.0 && dist <= 10.0 && std::abs(std::abs(u) - p / 2.0) <= p / 4.0) img(x, y) = 235;
        }
    return img;
}


}  // namespace fixtures
