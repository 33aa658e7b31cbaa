#pragma once

#include <string>
#include <vector>

#include "distvar/degrade.hpp"
#include "distvar/regularize.hpp"
#include "distvar/solver.hpp"
#include "distvar/spectral.hpp"

namespace distvar {

/// Everything a command needs, collected from a flat key = value config file
/// plus command-line overrides. Unknown keys are rejected at parse time and
/// every numeric constraint is re-validated with the offending key named.
struct RunConfig {
    // io.*
    std::string hr_image;
    std::string lr_image;
    std::string depth_map;
    std::string out_dir = ".";
    std::string dataset_dir;
    std::string kernel_bank_path;
    double depth_scale = 0.001;  // meters per raw depth unit
    double pixel_pitch = 1.0;    // meters per pixel on the HR grid

    AtmosphereParams atmosphere;

    // degrade.*
    int scale = 2;
    int num_bins = 8;
    int kernel_radius = 0;  // 0 selects the mass-based automatic radius

    // spectral.*; beta_eff and noise_floor are derived from the atmosphere
    // unless explicitly set.
    SpectralProfile spectral;
    bool spectral_beta_eff_set = false;
    bool spectral_noise_floor_set = false;

    RegularizerParams reg;
    SolverConfig solver;

    // bank.*
    int bank_anchors = 8;
    int bank_kernel_size = 5;
    double bank_lipschitz = 1.0;
    int bank_fit_iterations = 200;

    CalibrateOptions calibrate;

    // bench.*
    bool bench_synthetic = false;
    int bench_scene_size = 96;
    int bench_scene_count = 10;
    std::vector<int> bench_scales = {2, 4};
    std::vector<std::string> bench_variants = {"bilinear", "wiener", "full", "constant_g"};

    // metrics.*
    int shave = 0;

    /// Spectral profile with derived defaults resolved against the atmosphere.
    SpectralProfile resolved_spectral() const;
};

/// Applies one key = value pair; `location` (e.g. "config.txt:12") prefixes
/// error messages. Unknown keys throw.
void apply_config_key(RunConfig& cfg, const std::string& key, const std::string& value,
                      const std::string& location);

/// Parses a flat key = value file with '#' comments.
RunConfig parse_config_file(const std::string& path);
void load_config_file(RunConfig& cfg, const std::string& path);

/// Cross-field validation (after all keys and overrides are applied).
void validate(const RunConfig& cfg);

/// Serializes the degradation-relevant keys as a config-compatible manifest;
/// re-running degrade from it reproduces the output byte for byte.
std::string degrade_manifest(const RunConfig& cfg);

}  // namespace distvar
