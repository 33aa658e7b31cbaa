#include "distvar/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "distvar/rng.hpp"

namespace distvar {

namespace {

/// Sinusoid mixture plus a few solid rectangles, rescaled into [0.05, 0.95].
/// Deliberately rich in mid/high frequencies so resolution loss is visible.
ScalarField procedural_texture(Rng& rng, int width, int height) {
    ScalarField tex(width, height, 0.0);
    const int num_waves = 8;
    for (int w = 0; w < num_waves; ++w) {
        const double fx = rng.uniform(0.02, 0.45);
        const double fy = rng.uniform(0.02, 0.45);
        const double phase = rng.uniform(0.0, 6.28318530717958647692);
        // 1/f-weighted amplitudes: keeps the spectrum natural-image-like so
        // most energy sits below the downsampler's folding frequency.
        const double freq = std::sqrt(fx * fx + fy * fy);
        const double amp = rng.uniform(0.4, 1.0) / (1.0 + freq / 0.08);
        const double two_pi = 6.28318530717958647692;
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x)
                tex.at(x, y) += amp * std::sin(two_pi * (fx * x + fy * y) + phase);
    }
    const int num_rects = 4;
    for (int r = 0; r < num_rects; ++r) {
        const int rw = 2 + int(rng.next_double() * width / 3);
        const int rh = 2 + int(rng.next_double() * height / 3);
        const int rx = int(rng.next_double() * (width - rw));
        const int ry = int(rng.next_double() * (height - rh));
        const double level = rng.uniform(-1.5, 1.5);
        for (int y = ry; y < ry + rh; ++y)
            for (int x = rx; x < rx + rw; ++x) tex.at(x, y) += level;
    }
    double lo = tex[0], hi = tex[0];
    for (double v : tex.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = std::max(hi - lo, 1e-12);
    for (double& v : tex.data) v = 0.05 + 0.9 * (v - lo) / span;
    return tex;
}

}  // namespace

SyntheticScene make_two_plane_scene(std::uint64_t seed, int width, int height, double d_near,
                                    double d_far) {
    Rng rng(seed);
    SyntheticScene scene;
    scene.name = "two_plane_" + std::to_string(seed);
    scene.hr = procedural_texture(rng, width, height);
    scene.depth = ScalarField(width, height, d_near);
    const int split = width / 3 + int(rng.next_double() * width / 3);
    for (int y = 0; y < height; ++y)
        for (int x = split; x < width; ++x) scene.depth.at(x, y) = d_far;
    return scene;
}

SyntheticScene make_staircase_scene(std::uint64_t seed, int width, int height, int steps,
                                    double d_near, double d_far) {
    Rng rng(seed);
    SyntheticScene scene;
    scene.name = "staircase_" + std::to_string(seed);
    scene.hr = procedural_texture(rng, width, height);
    scene.depth = ScalarField(width, height, d_near);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const int step = std::min(steps - 1, x * steps / width);
            scene.depth.at(x, y) =
                d_near + (d_far - d_near) * double(step) / double(std::max(steps - 1, 1));
        }
    }
    return scene;
}

std::vector<SyntheticScene> make_scene_suite(std::uint64_t base_seed, int count, int width,
                                             int height) {
    std::vector<SyntheticScene> scenes;
    scenes.reserve(count);
    for (int i = 0; i < count; ++i) {
        const std::uint64_t seed = base_seed + 1000ULL * std::uint64_t(i + 1);
        scenes.push_back(i % 2 == 0 ? make_two_plane_scene(seed, width, height)
                                    : make_staircase_scene(seed, width, height));
    }
    return scenes;
}

}  // namespace distvar
