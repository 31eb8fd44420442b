#include "wearclass/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wearclass {

double PortableRng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double PortableRng::normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

BinaryMask render_blob(double radius, double harmonic_mix, double amplitude, double aspect, double tilt_deg) {
    if (!(radius > 0.0) || !(aspect > 0.0) || amplitude < 0.0 || amplitude >= 1.0)
        throw std::invalid_argument("render_blob: bad shape parameters");
    const double reach = radius * (1.0 + amplitude) * std::max(aspect, 1.0);
    const int half = static_cast<int>(std::ceil(reach)) + 3;
    const int size = 2 * half + 1;
    BinaryMask mask(size, size);
    const double t = tilt_deg * std::numbers::pi / 180.0;
    const double c = std::cos(t), s = std::sin(t);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            const double dx = x - half, dy = y - half;
            // Undo the tilt, then the horizontal stretch.
            const double u = (c * dx + s * dy) / aspect;
            const double v = -s * dx + c * dy;
            const double rho = std::hypot(u, v);
            const double phi = std::atan2(v, u);
            const double edge =
                radius * (1.0 + amplitude * ((1.0 - harmonic_mix) * std::cos(3.0 * phi) + harmonic_mix * std::cos(5.0 * phi)));
            if (rho <= edge) mask.set(x, y);
        }
    return mask;
}

std::vector<SynthSample> generate_synthetic(const SynthOptions& o) {
    const std::size_t k = o.classes.size();
    if (k == 0 || o.radius.size() != k || o.harmonic_mix.size() != k)
        throw std::invalid_argument("synth: classes, radius and harmonic_mix must have the same length");
    if (o.per_class < 1) throw std::invalid_argument("synth: per_class must be >= 1");
    if (o.amplitude_min < 0.0 || o.amplitude_max >= 1.0 || o.amplitude_min > o.amplitude_max)
        throw std::invalid_argument("synth: amplitude range must satisfy 0 <= min <= max < 1");
    if (!(o.aspect_min > 0.0) || o.aspect_min > o.aspect_max) throw std::invalid_argument("synth: bad aspect range");
    if (o.radius_log_sigma < 0.0 || o.harmonic_sigma < 0.0) throw std::invalid_argument("synth: negative spread");
    for (double r : o.radius)
        if (!(r >= 2.0)) throw std::invalid_argument("synth: radius must be >= 2");

    PortableRng rng(o.seed);
    std::vector<SynthSample> out;
    out.reserve(k * static_cast<std::size_t>(o.per_class));
    for (int i = 0; i < o.per_class; ++i)
        for (std::size_t c = 0; c < k; ++c) {
            SynthSample s;
            s.label = o.classes[c];
            s.radius = std::max(2.0, o.radius[c] * std::exp(o.radius_log_sigma * rng.normal()));
            s.harmonic_mix = std::clamp(o.harmonic_mix[c] + o.harmonic_sigma * rng.normal(), 0.0, 1.0);
            s.amplitude = rng.uniform(o.amplitude_min, o.amplitude_max);
            s.aspect = rng.uniform(o.aspect_min, o.aspect_max);
            s.tilt_deg = rng.uniform(-o.max_tilt_deg, o.max_tilt_deg);
            char id[32];
            std::snprintf(id, sizeof id, "s%04zu", out.size());
            s.id = id;
            s.mask = render_blob(s.radius, s.harmonic_mix, s.amplitude, s.aspect, s.tilt_deg);
            out.push_back(std::move(s));
        }
    return out;
}

}  // namespace wearclass
