#include "wearclass/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wearclass {

std::string_view side_name(EdgeSide side) {
    switch (side) {
        case EdgeSide::north: return "north";
        case EdgeSide::east: return "east";
        case EdgeSide::south: return "south";
        case EdgeSide::west: return "west";
    }
    return "north";
}

EdgeSide parse_side(std::string_view name) {
    if (name == "north") return EdgeSide::north;
    if (name == "east") return EdgeSide::east;
    if (name == "south") return EdgeSide::south;
    if (name == "west") return EdgeSide::west;
    throw std::invalid_argument("unknown side '" + std::string(name) + "'");
}

std::string_view completeness_name(Completeness c) {
    return c == Completeness::complete ? "complete" : "incomplete";
}

Completeness parse_completeness(std::string_view name) {
    if (name == "complete") return Completeness::complete;
    if (name == "incomplete") return Completeness::incomplete;
    throw std::invalid_argument("unknown completeness '" + std::string(name) + "'");
}

LocatedInsert locate_insert(const GrayImage& image, int level, double diagonal_ratio) {
    if (!(diagonal_ratio > 0.0)) throw std::invalid_argument("locate_insert: diagonal ratio must be > 0");
    const auto components = connected_components(threshold(image, level));
    if (components.empty()) throw DataError("no insert found");
    const BinaryRegion& region = components.front();

    auto hull = convex_hull(region.pixels());
    double best = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i)
        for (std::size_t j = i + 1; j < hull.size(); ++j) {
            const double dx = hull[i].x - hull[j].x;
            const double dy = hull[i].y - hull[j].y;
            best = std::max(best, dx * dx + dy * dy);
        }
    if (best <= 0.0) throw DataError("no insert found: region is a single pixel");

    InsertGeometry geometry;
    geometry.centroid = region.centroid();
    geometry.major_diagonal_d = std::sqrt(best);
    geometry.center_radius_r = geometry.major_diagonal_d / diagonal_ratio;
    return {region, geometry, std::move(hull)};
}

BinaryMask remove_center(const BinaryRegion& region, const InsertGeometry& geometry, int width, int height) {
    BinaryMask out = region.to_mask(width, height);
    const double r2 = geometry.center_radius_r * geometry.center_radius_r;
    if (r2 <= 0.0) return out;
    for (const Point& p : region.pixels()) {
        if (!out.in_bounds(p.x, p.y)) continue;
        const double dx = p.x - geometry.centroid.x;
        const double dy = p.y - geometry.centroid.y;
        if (dx * dx + dy * dy <= r2) out.set(p.x, p.y, false);
    }
    return out;
}

namespace {

double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
Vec2 sub(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
Vec2 to_vec(Point p) { return {static_cast<double>(p.x), static_cast<double>(p.y)}; }

// Direction after @p k clockwise quarter turns (as displayed): (x, y) -> (-y, x).
Vec2 turn(Vec2 v, int k) {
    for (int i = 0; i < ((k % 4) + 4) % 4; ++i) v = {-v.y, v.x};
    return v;
}

}  // namespace

std::array<Vec2, 4> insert_corners(const LocatedInsert& insert) {
    const auto& hull = insert.hull;
    if (hull.size() < 3) throw DataError("insert hull is degenerate");
    std::size_t ia = 0, ib = 1;
    long long best = -1;
    for (std::size_t i = 0; i < hull.size(); ++i)
        for (std::size_t j = i + 1; j < hull.size(); ++j) {
            const long long dx = hull[i].x - hull[j].x;
            const long long dy = hull[i].y - hull[j].y;
            if (dx * dx + dy * dy > best) {
                best = dx * dx + dy * dy;
                ia = i;
                ib = j;
            }
        }
    const Vec2 a = to_vec(hull[ia]);
    const Vec2 b = to_vec(hull[ib]);
    const Vec2 ab = sub(b, a);
    double pos = 0.0, neg = 0.0;
    Vec2 c = a, d = b;
    for (const Point& p : hull) {
        const double s = cross(ab, sub(to_vec(p), a));
        if (s > pos) {
            pos = s;
            c = to_vec(p);
        }
        if (s < neg) {
            neg = s;
            d = to_vec(p);
        }
    }
    if (pos <= 0.0 || neg >= 0.0) throw DataError("insert hull has no corners off its major diagonal");

    std::array<Vec2, 4> corners{a, c, b, d};
    const Vec2 g = insert.geometry.centroid;
    std::sort(corners.begin(), corners.end(), [&](Vec2 p, Vec2 q) {
        return std::atan2(p.y - g.y, p.x - g.x) < std::atan2(q.y - g.y, q.x - g.x);
    });
    return corners;
}

std::vector<double> sobel_magnitude(const GrayImage& image) {
    const int w = image.width();
    const int h = image.height();
    std::vector<double> out(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0.0);
    auto px = [&](int x, int y) {
        return static_cast<double>(image(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1)));
    };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double gx = px(x + 1, y - 1) + 2.0 * px(x + 1, y) + px(x + 1, y + 1) - px(x - 1, y - 1) -
                              2.0 * px(x - 1, y) - px(x - 1, y + 1);
            const double gy = px(x - 1, y + 1) + 2.0 * px(x, y + 1) + px(x + 1, y + 1) - px(x - 1, y - 1) -
                              2.0 * px(x, y - 1) - px(x + 1, y - 1);
            out[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)] =
                std::hypot(gx, gy);
        }
    return out;
}

std::array<CuttingEdgeCrop, 4> extract_cutting_edges(const GrayImage& image, const LocatedInsert& insert,
                                                     const PreprocessOptions& options) {
    const int w = image.width();
    const int h = image.height();
    const auto corners = insert_corners(insert);
    const Vec2 g = insert.geometry.centroid;

    // Edge map restricted to the insert (slightly grown) outside the centre disc.
    const auto magnitude = sobel_magnitude(image);
    const double peak = *std::max_element(magnitude.begin(), magnitude.end());
    if (!(peak > 0.0)) throw DataError("no edges found in insert image");
    BinaryMask edges(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (magnitude[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)] >=
                options.edge_fraction * peak)
                edges.set(x, y);
    if (options.edge_closing_radius > 0) edges = morphology(edges, MorphOp::close, options.edge_closing_radius);

    const BinaryMask footprint = insert.region.to_mask(w, h);
    const BinaryMask annulus =
        morphology(remove_center(insert.region, insert.geometry, w, h), MorphOp::dilate, 2);
    const double r2 = insert.geometry.center_radius_r * insert.geometry.center_radius_r;

    // Wedge i spans corners[i] -> corners[i + 1] (increasing angle about the centroid).
    std::array<Vec2, 4> rel{};
    for (int i = 0; i < 4; ++i) rel[static_cast<std::size_t>(i)] = sub(corners[static_cast<std::size_t>(i)], g);
    auto wedge_of = [&](Vec2 p) {
        const Vec2 v = sub(p, g);
        for (int i = 0; i < 4; ++i) {
            const Vec2 lo = rel[static_cast<std::size_t>(i)];
            const Vec2 hi = rel[static_cast<std::size_t>((i + 1) % 4)];
            if (cross(lo, v) >= 0.0 && cross(v, hi) > 0.0) return i;
        }
        return -1;
    };
    std::array<std::vector<Point>, 4> bands;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!edges(x, y) || !annulus(x, y)) continue;
            const double dx = x - g.x, dy = y - g.y;
            if (dx * dx + dy * dy <= r2) continue;
            const int k = wedge_of({static_cast<double>(x), static_cast<double>(y)});
            if (k >= 0) bands[static_cast<std::size_t>(k)].push_back({x, y});
        }

    // Outward direction of each wedge and the wedge nearest to straight up.
    std::array<Vec2, 4> outward{};
    std::array<double, 4> angle{};
    for (int i = 0; i < 4; ++i) {
        const Vec2 a = corners[static_cast<std::size_t>(i)];
        const Vec2 b = corners[static_cast<std::size_t>((i + 1) % 4)];
        Vec2 normal{b.y - a.y, a.x - b.x};
        if (normal.x * (a.x - g.x) + normal.y * (a.y - g.y) < 0.0) normal = {-normal.x, -normal.y};
        outward[static_cast<std::size_t>(i)] = normal;
        angle[static_cast<std::size_t>(i)] =
            std::atan2(outward[static_cast<std::size_t>(i)].y, outward[static_cast<std::size_t>(i)].x);
    }
    int north = 0;
    double best = 1e300;
    for (int i = 0; i < 4; ++i) {
        double d = std::abs(std::remainder(angle[static_cast<std::size_t>(i)] + std::numbers::pi / 2.0,
                                           2.0 * std::numbers::pi));
        if (d < best - 1e-12) {
            best = d;
            north = i;
        }
    }

    std::string missing;
    std::array<CuttingEdgeCrop, 4> crops;
    for (int s = 0; s < 4; ++s) {
        const int i = (north + s) % 4;
        const auto side = static_cast<EdgeSide>(s);
        const auto& band = bands[static_cast<std::size_t>(i)];
        if (band.empty()) {
            missing += (missing.empty() ? "" : ", ") + std::string(side_name(side));
            continue;
        }
        int xmin = w, ymin = h, xmax = -1, ymax = -1;
        for (const Point& p : band) {
            xmin = std::min(xmin, p.x);
            xmax = std::max(xmax, p.x);
            ymin = std::min(ymin, p.y);
            ymax = std::max(ymax, p.y);
        }
        const int pad = options.band_radius + 2;
        xmin = std::max(0, xmin - pad);
        ymin = std::max(0, ymin - pad);
        xmax = std::min(w - 1, xmax + pad);
        ymax = std::min(h - 1, ymax + pad);
        const int cw = xmax - xmin + 1;
        const int ch = ymax - ymin + 1;

        GrayImage gray(cw, ch);
        BinaryMask band_mask(cw, ch);
        BinaryMask inside(cw, ch);
        for (int y = 0; y < ch; ++y)
            for (int x = 0; x < cw; ++x) {
                gray(x, y) = image(xmin + x, ymin + y);
                if (footprint(xmin + x, ymin + y)) inside.set(x, y);
            }
        for (const Point& p : band) band_mask.set(p.x - xmin, p.y - ymin);

        int quarter = 0;
        double up = 1e300;
        for (int k = 0; k < 4; ++k) {
            const double y = turn(outward[static_cast<std::size_t>(i)], k).y;
            if (y < up - 1e-12) {
                up = y;
                quarter = k;
            }
        }

        CuttingEdgeCrop& crop = crops[static_cast<std::size_t>(s)];
        crop.image = rotate90(gray, quarter);
        crop.band = rotate90(band_mask, quarter);
        crop.insert = rotate90(inside, quarter);
        crop.side = side;
        crop.rotation_applied = 90 * quarter;
        crop.source_band = band;
    }
    if (!missing.empty()) throw DataError("missing cutting-edge bands: " + missing);
    return crops;
}

int otsu_level(const std::vector<std::uint8_t>& values) {
    std::array<double, 256> hist{};
    for (auto v : values) hist[v] += 1.0;
    const double total = static_cast<double>(values.size());
    if (total == 0.0) return 255;
    double sum_all = 0.0;
    for (int i = 0; i < 256; ++i) sum_all += i * hist[static_cast<std::size_t>(i)];
    double w0 = 0.0, sum0 = 0.0, best = -1.0;
    int level = 255;
    for (int t = 0; t < 255; ++t) {
        w0 += hist[static_cast<std::size_t>(t)];
        sum0 += t * hist[static_cast<std::size_t>(t)];
        const double w1 = total - w0;
        if (w0 == 0.0 || w1 == 0.0) continue;
        const double m0 = sum0 / w0;
        const double m1 = (sum_all - sum0) / w1;
        const double between = w0 * w1 * (m0 - m1) * (m0 - m1);
        if (between > best) {
            best = between;
            level = t;
        }
    }
    return level;
}

BinaryMask segment_wear_region(const CuttingEdgeCrop& crop, const PreprocessOptions& options) {
    const int w = crop.image.width();
    const int h = crop.image.height();
    BinaryMask empty(w, h);
    if (crop.image.empty() || crop.band.count() == 0) return empty;

    BinaryMask search = options.band_radius > 0 ? morphology(crop.band, MorphOp::dilate, options.band_radius)
                                                : crop.band;
    if (crop.insert) {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if (!(*crop.insert)(x, y)) search.set(x, y, false);
    }
    std::vector<std::uint8_t> values;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (search(x, y)) values.push_back(crop.image(x, y));
    if (values.empty()) return empty;

    const int level = otsu_level(values);
    double lo = 0.0, hi = 0.0;
    std::size_t nlo = 0, nhi = 0;
    for (auto v : values) {
        if (v > level) {
            hi += v;
            ++nhi;
        } else {
            lo += v;
            ++nlo;
        }
    }
    if (nhi == 0 || nlo == 0 || hi / nhi - lo / nlo < options.min_contrast) return empty;

    BinaryMask wear(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (search(x, y) && crop.image(x, y) > level) wear.set(x, y);
    if (options.wear_closing_radius > 0) wear = morphology(wear, MorphOp::close, options.wear_closing_radius);
    wear = fill_holes(wear);
    const auto components = connected_components(wear);
    if (components.empty()) return empty;
    return components.front().to_mask(w, h);
}

Completeness classify_completeness(const BinaryMask& wear) {
    int xmin = wear.width(), ymin = wear.height(), xmax = -1, ymax = -1;
    for (int y = 0; y < wear.height(); ++y)
        for (int x = 0; x < wear.width(); ++x)
            if (wear(x, y)) {
                xmin = std::min(xmin, x);
                xmax = std::max(xmax, x);
                ymin = std::min(ymin, y);
                ymax = std::max(ymax, y);
            }
    if (xmax < 0) return Completeness::complete;
    return xmax - xmin >= ymax - ymin ? Completeness::complete : Completeness::incomplete;
}

std::vector<EdgeWear> process_insert(const GrayImage& image, const PreprocessOptions& options) {
    const auto insert = locate_insert(image, options.insert_threshold, options.diagonal_ratio);
    const auto crops = extract_cutting_edges(image, insert, options);
    std::vector<EdgeWear> out;
    for (const auto& crop : crops) {
        EdgeWear e;
        e.side = crop.side;
        e.rotation_applied = crop.rotation_applied;
        e.mask = segment_wear_region(crop, options);
        e.completeness = classify_completeness(e.mask);
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace wearclass
