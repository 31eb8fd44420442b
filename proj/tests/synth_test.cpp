#include "wearclass/shapefeat.hpp"
#include "wearclass/synth.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>

using namespace wearclass;

TEST(Synth, CountsAndLabels) {
    const auto data = generate_synthetic({});
    ASSERT_EQ(data.size(), 150u);
    std::map<std::string, int> n;
    for (const auto& s : data) {
        ++n[s.label];
        EXPECT_GT(s.mask.count(), 0u);
    }
    EXPECT_EQ(n, (std::map<std::string, int>{{"H", 50}, {"L", 50}, {"M", 50}}));
    EXPECT_EQ(data[0].id, "s0000");
    EXPECT_EQ(data[149].id, "s0149");
}

TEST(Synth, SameSeedSameMasks) {
    SynthOptions o;
    o.per_class = 5;
    o.seed = 9;
    const auto a = generate_synthetic(o);
    const auto b = generate_synthetic(o);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].mask, b[i].mask);
    o.seed = 10;
    EXPECT_NE(generate_synthetic(o)[0].mask, a[0].mask);
}

TEST(Synth, ParametersWithinRanges) {
    const SynthOptions o;
    for (const auto& s : generate_synthetic(o)) {
        EXPECT_GE(s.harmonic_mix, 0.0);
        EXPECT_LE(s.harmonic_mix, 1.0);
        EXPECT_GE(s.amplitude, o.amplitude_min);
        EXPECT_LT(s.amplitude, o.amplitude_max);
        EXPECT_GE(s.aspect, o.aspect_min);
        EXPECT_LT(s.aspect, o.aspect_max);
        EXPECT_LE(std::abs(s.tilt_deg), o.max_tilt_deg);
    }
}

TEST(Synth, LargeClassHasLargerFilledArea) {
    std::map<std::string, double> sum;
    for (const auto& s : generate_synthetic({})) sum[s.label] += compute_shapefeat(s.mask).filled_area;
    EXPECT_GT(sum["H"], sum["M"]);
    EXPECT_GT(sum["M"], sum["L"]);
}

TEST(RenderBlob, PlainDiscAndEllipseAreas) {
    const double r = 30.0;
    EXPECT_NEAR(static_cast<double>(render_blob(r, 0.0, 0.0, 1.0, 0.0).count()), std::numbers::pi * r * r,
                0.02 * std::numbers::pi * r * r);
    EXPECT_NEAR(static_cast<double>(render_blob(r, 0.0, 0.0, 2.0, 0.0).count()), 2.0 * std::numbers::pi * r * r,
                0.02 * 2.0 * std::numbers::pi * r * r);
    // The mean of cos(k phi) over a turn is zero, so lobes keep the area to first order.
    const double lobed = static_cast<double>(render_blob(r, 0.5, 0.2, 1.0, 0.0).count());
    EXPECT_NEAR(lobed, std::numbers::pi * r * r * (1.0 + 0.5 * (0.5 * 0.04 + 0.5 * 0.04)),
                0.02 * std::numbers::pi * r * r);
    EXPECT_THROW(render_blob(0.0, 0.0, 0.0, 1.0, 0.0), std::invalid_argument);
    EXPECT_THROW(render_blob(5.0, 0.0, 1.0, 1.0, 0.0), std::invalid_argument);
}

TEST(RenderBlob, ThreeFoldSymmetryWithoutStretch) {
    // w = 0, aspect 1: the mask equals itself turned by 120 degrees up to the lattice.
    const auto m = render_blob(40.0, 0.0, 0.2, 1.0, 0.0);
    const int h = m.width() / 2;
    int agree = 0, total = 0;
    const double c = std::cos(2.0 * std::numbers::pi / 3.0), s = std::sin(2.0 * std::numbers::pi / 3.0);
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x) {
            if (!m(x, y)) continue;
            ++total;
            const double dx = x - h, dy = y - h;
            agree += m.at(static_cast<int>(std::lround(h + c * dx - s * dy)), static_cast<int>(std::lround(h + s * dx + c * dy)));
        }
    EXPECT_GT(static_cast<double>(agree) / total, 0.99);
}

TEST(Synth, RejectsBadOptions) {
    SynthOptions o;
    o.radius = {10.0};
    EXPECT_THROW(generate_synthetic(o), std::invalid_argument);
    o = {};
    o.per_class = 0;
    EXPECT_THROW(generate_synthetic(o), std::invalid_argument);
    o = {};
    o.amplitude_max = 1.0;
    EXPECT_THROW(generate_synthetic(o), std::invalid_argument);
}

TEST(PortableRng, MomentsAndRange) {
    PortableRng rng(3);
    double s = 0.0, s2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        const double z = rng.normal();
        s += z;
        s2 += z * z;
    }
    EXPECT_NEAR(s / n, 0.0, 0.01);
    EXPECT_NEAR(s2 / n, 1.0, 0.02);
}
