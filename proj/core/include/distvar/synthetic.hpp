#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "distvar/field.hpp"

namespace distvar {

struct SyntheticScene {
    ScalarField hr;     // procedural texture in [0,1]
    ScalarField depth;  // meters, > 0
    std::string name;
};

/// Two-plane scene: a near plane and a far plane split by a seeded vertical
/// boundary, textured with sinusoid mixtures and rectangles.
SyntheticScene make_two_plane_scene(std::uint64_t seed, int width, int height,
                                    double d_near = 5.0, double d_far = 60.0);

/// Staircase scene: depth increases in seeded steps from left to right.
SyntheticScene make_staircase_scene(std::uint64_t seed, int width, int height, int steps = 5,
                                    double d_near = 5.0, double d_far = 60.0);

/// The built-in benchmark suite: `count` scenes alternating two-plane and
/// staircase layouts, deterministically derived from base_seed.
std::vector<SyntheticScene> make_scene_suite(std::uint64_t base_seed, int count, int width,
                                             int height);

}  // namespace distvar
