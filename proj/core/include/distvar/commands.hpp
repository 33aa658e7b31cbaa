#pragma once

#include <string>
#include <vector>

#include "distvar/config.hpp"

namespace distvar {

/// Synthesizes the LR observation from io.hr_image and io.depth_map and
/// writes <out_dir>/lr.png plus a reproducibility manifest.
void cmd_degrade(const RunConfig& cfg);

/// Restores io.lr_image with io.depth_map and writes <out_dir>/sr.png plus
/// the solver trace CSV.
void cmd_restore(const RunConfig& cfg);

/// Writes the per-bin spectral diagnostics CSV and the cutoff-frequency map
/// for io.depth_map.
void cmd_analyze(const RunConfig& cfg);

/// Runs the benchmark harness over a dataset directory or the built-in
/// synthetic suite and writes <out_dir>/bench.csv. Returns the CSV text.
std::string cmd_bench(const RunConfig& cfg);

/// Calibrates regularizer coordinates on (HR, depth) pairs and writes the
/// fitted parameters plus the objective trace.
void cmd_calibrate(const RunConfig& cfg);

}  // namespace distvar
