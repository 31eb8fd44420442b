/**
 * @file synth.hpp
 * @brief Seeded synthetic wear-region masks with separate size and outline signals.
 */
#pragma once

#include "wearclass/image.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace wearclass {

/**
 * Each mask is a star-shaped blob
 *   rho(phi) <= R * (1 + A * ((1 - w) cos(3 phi) + w cos(5 phi)))
 * stretched horizontally by `aspect` and rotated by a small angle.
 * The class sets the median of R (size signal) and of w (outline signal); both are drawn
 * with independent noise, so size and outline each predict the class only partially.
 */
struct SynthOptions {
    int per_class = 50;
    std::uint64_t seed = 1;
    std::vector<std::string> classes{"L", "M", "H"};
    std::vector<double> radius{14.0, 22.0, 34.0};   ///< median R per class, pixels
    double radius_log_sigma = 0.3;                  ///< sd of log R
    std::vector<double> harmonic_mix{0.0, 0.5, 1.0};  ///< median w per class
    double harmonic_sigma = 0.2;                    ///< sd of w before clamping to [0, 1]
    double amplitude_min = 0.12;
    double amplitude_max = 0.22;
    double aspect_min = 1.3;
    double aspect_max = 2.0;
    double max_tilt_deg = 10.0;
};

struct SynthSample {
    std::string id;
    std::string label;
    BinaryMask mask;
    double radius = 0.0;
    double harmonic_mix = 0.0;
    double amplitude = 0.0;
    double aspect = 0.0;
    double tilt_deg = 0.0;
};

/// per_class samples of each class, interleaved by class. Throws std::invalid_argument on
/// inconsistent options.
std::vector<SynthSample> generate_synthetic(const SynthOptions& options);

/// Renders a single blob on a canvas just large enough to hold it.
BinaryMask render_blob(double radius, double harmonic_mix, double amplitude, double aspect, double tilt_deg);

/// Uniform and normal draws computed from raw mt19937_64 output, so the streams are the
/// same with every standard library.
class PortableRng {
public:
    explicit PortableRng(std::uint64_t seed) : engine_(seed) {}
    double uniform();  ///< [0, 1)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();   ///< Box-Muller, one value per call

private:
    std::mt19937_64 engine_;
};

}  // namespace wearclass
