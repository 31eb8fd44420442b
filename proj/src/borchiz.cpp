#include "wearclass/borchiz.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace wearclass {

std::vector<ZernikeIndex> zernike_indices(int max_order) {
    if (max_order < 0) throw std::invalid_argument("zernike_indices: max_order must be >= 0");
    std::vector<ZernikeIndex> out;
    for (int n = 0; n <= max_order; ++n)
        for (int m = n % 2; m <= n; m += 2) out.push_back({n, m});
    return out;
}

NormalizedShape normalize_shape(const BinaryMask& mask) {
    int xmin = mask.width(), ymin = mask.height(), xmax = -1, ymax = -1;
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            if (mask(x, y)) {
                xmin = std::min(xmin, x);
                xmax = std::max(xmax, x);
                ymin = std::min(ymin, y);
                ymax = std::max(ymax, y);
            }
    if (xmax < 0) throw DataError("empty shape");

    const int w = xmax - xmin + 1;
    const int h = ymax - ymin + 1;
    auto src = [&](int x, int y) {
        x = std::clamp(x, 0, w - 1);
        y = std::clamp(y, 0, h - 1);
        return mask(xmin + x, ymin + y) ? 255.0 : 0.0;
    };

    constexpr int N = NormalizedShape::kSize;
    const double sx = static_cast<double>(w) / N;
    const double sy = static_cast<double>(h) / N;
    NormalizedShape out;
    for (int y = 0; y < N; ++y) {
        const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(h - 1));
        const int y0 = static_cast<int>(std::floor(fy));
        const double ty = fy - y0;
        for (int x = 0; x < N; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(w - 1));
            const int x0 = static_cast<int>(std::floor(fx));
            const double tx = fx - x0;
            const double top = (1.0 - tx) * src(x0, y0) + tx * src(x0 + 1, y0);
            const double bottom = (1.0 - tx) * src(x0, y0 + 1) + tx * src(x0 + 1, y0 + 1);
            out(x, y) = std::clamp((1.0 - ty) * top + ty * bottom, 0.0, 255.0);
        }
    }
    return out;
}

BinaryMask resize_to_extent(const BinaryMask& mask, int extent) {
    if (extent < 1) throw std::invalid_argument("resize_to_extent: extent must be >= 1");
    int xmin = mask.width(), ymin = mask.height(), xmax = -1, ymax = -1;
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            if (mask(x, y)) {
                xmin = std::min(xmin, x);
                xmax = std::max(xmax, x);
                ymin = std::min(ymin, y);
                ymax = std::max(ymax, y);
            }
    if (xmax < 0) throw DataError("empty shape");

    const int w = xmax - xmin + 1;
    const int h = ymax - ymin + 1;
    const double scale = static_cast<double>(extent) / std::max(w, h);
    const int W = std::max(1, static_cast<int>(std::lround(w * scale)));
    const int H = std::max(1, static_cast<int>(std::lround(h * scale)));
    auto src = [&](int x, int y) {
        x = std::clamp(x, 0, w - 1);
        y = std::clamp(y, 0, h - 1);
        return mask(xmin + x, ymin + y) ? 1.0 : 0.0;
    };
    const double sx = static_cast<double>(w) / W;
    const double sy = static_cast<double>(h) / H;
    BinaryMask out(W, H);
    for (int y = 0; y < H; ++y) {
        const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(h - 1));
        const int y0 = static_cast<int>(std::floor(fy));
        const double ty = fy - y0;
        for (int x = 0; x < W; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(w - 1));
            const int x0 = static_cast<int>(std::floor(fx));
            const double tx = fx - x0;
            const double top = (1.0 - tx) * src(x0, y0) + tx * src(x0 + 1, y0);
            const double bottom = (1.0 - tx) * src(x0, y0 + 1) + tx * src(x0 + 1, y0 + 1);
            if ((1.0 - ty) * top + ty * bottom >= 0.5) out.set(x, y);
        }
    }
    return out;
}

namespace {

// Fills R[n * stride + m] for n, m <= max_order; stride = max_order + 1.
void radial_into(double rho, int max_order, std::vector<double>& R) {
    const auto stride = static_cast<std::size_t>(max_order) + 1;
    R.assign(stride * stride, 0.0);
    auto at = [&](int n, int m) -> double& { return R[static_cast<std::size_t>(n) * stride + m]; };

    if (rho == 0.0) {
        for (int n = 0; n <= max_order; n += 2) at(n, 0) = (n / 2) % 2 == 0 ? 1.0 : -1.0;
        return;
    }

    const double inv_rho2 = 1.0 / (rho * rho);
    double power = 1.0;
    for (int n = 0; n <= max_order; ++n) {
        at(n, n) = power;
        power *= rho;
        if (n >= 2) at(n, n - 2) = n * at(n, n) - (n - 1) * at(n - 2, n - 2);
        for (int q = n - 4; q >= 0; q -= 2) {
            const double H3 = -4.0 * (q + 2) * (q + 1) / (static_cast<double>(n + q + 2) * (n - q));
            const double H2 = H3 * (n + q + 4) * (n - q - 2) / (4.0 * (q + 3)) + (q + 2);
            const double H1 = (q + 4) * (q + 3) / 2.0 - (q + 4) * H2 + H3 * (n + q + 6) * (n - q - 4) / 8.0;
            at(n, q) = H1 * at(n, q + 4) + (H2 + H3 * inv_rho2) * at(n, q + 2);
        }
    }
}

}  // namespace

std::vector<std::vector<double>> zernike_radial_table(double rho, int max_order) {
    if (max_order < 0) throw std::invalid_argument("zernike_radial_table: max_order must be >= 0");
    std::vector<double> flat;
    radial_into(rho, max_order, flat);
    const auto stride = static_cast<std::size_t>(max_order) + 1;
    std::vector<std::vector<double>> R(stride);
    for (std::size_t n = 0; n < stride; ++n) R[n].assign(flat.begin() + n * stride, flat.begin() + n * stride + n + 1);
    return R;
}

namespace {

constexpr int kSubsamples = 8;

/// Per-pixel integrals of V*_nm over the part of the pixel inside the unit disc.
struct ZernikeBasis {
    std::vector<ZernikeIndex> indices;
    std::vector<std::size_t> pixels;                // flat pixel offsets touching the disc
    std::vector<std::complex<double>> weights;      // pixels.size() x indices.size()
};

std::shared_ptr<const ZernikeBasis> build_basis(int max_order) {
    constexpr int N = NormalizedShape::kSize;
    auto basis = std::make_shared<ZernikeBasis>();
    basis->indices = zernike_indices(max_order);
    const std::size_t count = basis->indices.size();

    const double step = 2.0 / (N * kSubsamples);
    const double dA = step * step;
    std::vector<std::complex<double>> acc(count);
    std::vector<std::complex<double>> phase(static_cast<std::size_t>(max_order) + 1);
    const auto stride = static_cast<std::size_t>(max_order) + 1;
    std::vector<double> R;

    for (int py = 0; py < N; ++py) {
        for (int px = 0; px < N; ++px) {
            std::fill(acc.begin(), acc.end(), std::complex<double>{});
            bool touched = false;
            for (int sy = 0; sy < kSubsamples; ++sy) {
                const double y = ((py * kSubsamples + sy) + 0.5) * step - 1.0;
                for (int sx = 0; sx < kSubsamples; ++sx) {
                    const double x = ((px * kSubsamples + sx) + 0.5) * step - 1.0;
                    const double rho = std::hypot(x, y);
                    if (rho > 1.0) continue;
                    touched = true;
                    radial_into(rho, max_order, R);
                    // e^{-i m theta} = ((x - i y) / rho)^m
                    const std::complex<double> unit = rho > 0.0 ? std::complex<double>(x, -y) / rho
                                                                : std::complex<double>(1.0, 0.0);
                    phase[0] = 1.0;
                    for (int m = 1; m <= max_order; ++m) phase[m] = phase[m - 1] * unit;
                    for (std::size_t j = 0; j < count; ++j) {
                        const auto& idx = basis->indices[j];
                        acc[j] += R[static_cast<std::size_t>(idx.n) * stride + idx.m] * phase[idx.m] * dA;
                    }
                }
            }
            if (!touched) continue;
            basis->pixels.push_back(static_cast<std::size_t>(py) * N + px);
            basis->weights.insert(basis->weights.end(), acc.begin(), acc.end());
        }
    }
    return basis;
}

std::shared_ptr<const ZernikeBasis> basis_for(int max_order) {
    static std::mutex mutex;
    static std::map<int, std::shared_ptr<const ZernikeBasis>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[max_order];
    if (!slot) slot = build_basis(max_order);
    return slot;
}

}  // namespace

std::vector<double> zernike_magnitudes(const NormalizedShape& image, int max_order) {
    if (max_order < 0) throw std::invalid_argument("zernike_magnitudes: max_order must be >= 0");
    const auto basis = basis_for(max_order);
    const std::size_t count = basis->indices.size();
    std::vector<std::complex<double>> moments(count);
    const auto& values = image.values();
    for (std::size_t k = 0; k < basis->pixels.size(); ++k) {
        const double f = values[basis->pixels[k]];
        if (f == 0.0) continue;
        const auto* w = &basis->weights[k * count];
        for (std::size_t j = 0; j < count; ++j) moments[j] += f * w[j];
    }
    std::vector<double> mags(count);
    for (std::size_t j = 0; j < count; ++j)
        mags[j] = (basis->indices[j].n + 1) / std::numbers::pi * std::abs(moments[j]);
    return mags;
}

namespace {

struct Vote {
    int lo = -1;  // -1 where the chord is degenerate
    int hi = 0;
    double w_lo = 0.0;
    double w_hi = 0.0;
};

struct DirectionChain {
    std::vector<Vote> votes;  // per contour point
    std::vector<double> counts;
    int shift = 0;            // canonical rotation: bin b maps to (b - shift) mod K
};

std::vector<Vec2> smooth_closed(const Contour& contour, double sigma) {
    const std::size_t n = contour.size();
    std::vector<Vec2> out(n);
    if (sigma <= 0.0 || n < 3) {
        for (std::size_t i = 0; i < n; ++i)
            out[i] = {static_cast<double>(contour.points[i].x), static_cast<double>(contour.points[i].y)};
        return out;
    }
    const int radius = std::min(static_cast<int>(std::ceil(3.0 * sigma)), static_cast<int>((n - 1) / 2));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double total = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        kernel[static_cast<std::size_t>(k + radius)] = std::exp(-0.5 * k * k / (sigma * sigma));
        total += kernel[static_cast<std::size_t>(k + radius)];
    }
    const auto N = static_cast<long>(n);
    for (long i = 0; i < N; ++i) {
        double x = 0.0, y = 0.0;
        for (int k = -radius; k <= radius; ++k) {
            const Point& p = contour.points[static_cast<std::size_t>(((i + k) % N + N) % N)];
            const double w = kernel[static_cast<std::size_t>(k + radius)] / total;
            x += w * p.x;
            y += w * p.y;
        }
        out[static_cast<std::size_t>(i)] = {x, y};
    }
    return out;
}

DirectionChain direction_chain(const Contour& contour, int bins, int stride, double sigma) {
    DirectionChain chain;
    chain.counts.assign(static_cast<std::size_t>(bins), 0.0);
    const std::size_t n = contour.size();
    if (n <= static_cast<std::size_t>(stride)) return chain;

    const auto pts = smooth_closed(contour, sigma);
    const double width = 2.0 * std::numbers::pi / bins;
    std::vector<double> pos(n, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = pts[i];
        const Vec2& b = pts[(i + static_cast<std::size_t>(stride)) % n];
        const double dx = b.x - a.x, dy = b.y - a.y;
        if (std::hypot(dx, dy) >= 1e-9) pos[i] = std::atan2(dy, dx) / width;
    }

    auto vote = [&](double p) {
        const double fl = std::floor(p);
        Vote v;
        v.lo = ((static_cast<int>(fl) % bins) + bins) % bins;
        v.hi = (v.lo + 1) % bins;
        v.w_hi = p - fl;
        v.w_lo = 1.0 - v.w_hi;
        return v;
    };
    auto histogram = [&](double ref) {
        std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
        for (double p : pos) {
            if (std::isnan(p)) continue;
            const Vote v = vote(p - ref);
            counts[static_cast<std::size_t>(v.lo)] += v.w_lo;
            counts[static_cast<std::size_t>(v.hi)] += v.w_hi;
        }
        return counts;
    };

    // Modal bin: ties go to the rotation whose shifted histogram is lexicographically largest.
    const auto raw = histogram(0.0);
    constexpr double tol = 1e-9;
    const double peak = *std::max_element(raw.begin(), raw.end());
    auto at = [&](int i) { return raw[static_cast<std::size_t>(((i % bins) + bins) % bins)]; };
    auto greater_from = [&](int x, int y) {
        for (int i = 0; i < bins; ++i) {
            if (at(x + i) > at(y + i) + tol) return true;
            if (at(x + i) < at(y + i) - tol) return false;
        }
        return false;
    };
    int mode = -1;
    for (int s = 0; s < bins; ++s) {
        if (at(s) < peak - tol) continue;
        if (mode < 0 || greater_from(s, mode)) mode = s;
    }
    if (mode < 0) return chain;

    // Refine the mode to a fractional bin by a parabola through its neighbours,
    // then re-bin every direction relative to it.
    const double l = at(mode - 1), c = at(mode), r = at(mode + 1);
    const double curvature = l - 2.0 * c + r;
    const double delta = curvature < -tol ? std::clamp(0.5 * (l - r) / curvature, -0.5, 0.5) : 0.0;
    const double ref = mode + delta;

    chain.votes.assign(n, Vote{});
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isnan(pos[i])) chain.votes[i] = vote(pos[i] - ref);
    chain.counts = histogram(ref);
    chain.shift = 0;
    return chain;
}

void check_bins(int bins) {
    if (bins < 4) throw std::invalid_argument("orientation bins must be >= 4");
}

}  // namespace

std::vector<double> boundary_orientation_chain(const Contour& contour, int bins, int stride, double smoothing) {
    check_bins(bins);
    if (contour.size() == 0) throw std::invalid_argument("boundary_orientation_chain: empty contour");
    const auto chain = direction_chain(contour, bins, stride, smoothing);
    std::vector<double> hist(static_cast<std::size_t>(bins), 0.0);
    double total = 0.0;
    for (double c : chain.counts) total += c;
    if (total <= 0.0) {
        hist[0] = 1.0;
        return hist;
    }
    for (int i = 0; i < bins; ++i)
        hist[static_cast<std::size_t>(i)] =
            chain.counts[static_cast<std::size_t>((i + chain.shift) % bins)] / total;
    return hist;
}

std::vector<double> gradient_cooccurrence(const Contour& contour, int bins, int offset, int stride, double smoothing) {
    check_bins(bins);
    const auto K = static_cast<std::size_t>(bins);
    std::vector<double> matrix(K * K, 0.0);
    const std::size_t n = contour.size();
    if (offset < 1 || n <= static_cast<std::size_t>(offset)) return matrix;

    const auto chain = direction_chain(contour, bins, stride, smoothing);
    if (chain.votes.empty()) return matrix;
    auto rel = [&](int b) { return static_cast<std::size_t>(((b - chain.shift) % bins + bins) % bins); };
    for (std::size_t i = 0; i < n; ++i) {
        const Vote& a = chain.votes[i];
        const Vote& b = chain.votes[(i + static_cast<std::size_t>(offset)) % n];
        if (a.lo < 0 || b.lo < 0) continue;
        matrix[rel(a.lo) * K + rel(b.lo)] += a.w_lo * b.w_lo;
        matrix[rel(a.lo) * K + rel(b.hi)] += a.w_lo * b.w_hi;
        matrix[rel(a.hi) * K + rel(b.lo)] += a.w_hi * b.w_lo;
        matrix[rel(a.hi) * K + rel(b.hi)] += a.w_hi * b.w_hi;
    }
    for (std::size_t r = 0; r < K; ++r) {
        double sum = 0.0;
        for (std::size_t c = 0; c < K; ++c) sum += matrix[r * K + c];
        if (sum > 0.0)
            for (std::size_t c = 0; c < K; ++c) matrix[r * K + c] /= sum;
    }
    return matrix;
}

namespace {

void l2_normalize(std::vector<double>& v) {
    double ss = 0.0;
    for (double x : v) ss += x * x;
    if (ss <= 0.0) return;
    const double inv = 1.0 / std::sqrt(ss);
    for (double& x : v) x *= inv;
}

}  // namespace

std::vector<double> BorchizVector::flatten() const {
    std::vector<double> out;
    out.reserve(zernike_mags.size() + boc_hist.size() + iegcm_flat.size());
    out.insert(out.end(), zernike_mags.begin(), zernike_mags.end());
    out.insert(out.end(), boc_hist.begin(), boc_hist.end());
    out.insert(out.end(), iegcm_flat.begin(), iegcm_flat.end());
    return out;
}

BorchizVector compute_borchiz(const BinaryMask& mask, const BorchizOptions& options) {
    BorchizVector v;
    v.zernike_mags = zernike_magnitudes(normalize_shape(mask), options.max_order);
    const Contour contour = trace_boundary(largest_region(resize_to_extent(mask, options.contour_extent)));
    v.boc_hist = boundary_orientation_chain(contour, options.bins, options.stride, options.smoothing);
    v.iegcm_flat = gradient_cooccurrence(contour, options.bins, options.offset, options.stride, options.smoothing);
    l2_normalize(v.zernike_mags);
    l2_normalize(v.boc_hist);
    l2_normalize(v.iegcm_flat);
    return v;
}

std::size_t borchiz_length(const BorchizOptions& options) {
    const auto K = static_cast<std::size_t>(options.bins);
    return zernike_indices(options.max_order).size() + K + K * K;
}

std::vector<std::string> borchiz_names(const BorchizOptions& options) {
    std::vector<std::string> names;
    for (const auto& idx : zernike_indices(options.max_order))
        names.push_back("zernike_" + std::to_string(idx.n) + "_" + std::to_string(idx.m));
    for (int i = 0; i < options.bins; ++i) names.push_back("boc_" + std::to_string(i));
    for (int r = 0; r < options.bins; ++r)
        for (int c = 0; c < options.bins; ++c)
            names.push_back("iegcm_" + std::to_string(r) + "_" + std::to_string(c));
    return names;
}

}  // namespace wearclass
