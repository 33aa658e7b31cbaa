#pragma once

#include <string>
#include <vector>

#include "distvar/degrade.hpp"
#include "distvar/field.hpp"
#include "distvar/kernels.hpp"
#include "distvar/regularize.hpp"
#include "distvar/spectral.hpp"

namespace distvar {

enum class SolverMode { kAnalytic, kKernelBank };
enum class SolverInit { kBilinear, kWiener };

struct SolverConfig {
    int iterations = 32;
    double tau0 = 1.0;
    double backtrack_rho = 0.5;
    int max_halvings = 30;
    double stop_tol = 1e-7;
    SolverMode mode = SolverMode::kAnalytic;
    SolverInit init = SolverInit::kBilinear;
    /// Per-step regularization weights; empty means constant params.lambda.
    std::vector<double> lambda_schedule;
    /// Ablation switch: the regularizer sees a constant depth map (the
    /// midpoint of the true one's range) while the data term keeps the true
    /// physics.
    bool constant_reg_depth = false;
    /// Used only when init == kWiener.
    SpectralProfile wiener_profile;
};

void validate(const SolverConfig& config);

struct EnergyBreakdown {
    double total = 0.0;
    double data = 0.0;  // 1/2 ||K_D u - u0||^2
    double reg = 0.0;   // lambda * R_D[u]
};

/// E[u] = 1/2 ||K_D u - u0||^2 + lambda R_D[u], terms reported separately.
EnergyBreakdown energy(const ScalarField& u, const ScalarField& u0, const DegradationModel& model,
                       const ScalarField& depth_map, const RegularizerParams& params);

/// Exact gradient of the discrete energy:
/// K_D*(K_D u - u0) + lambda dR_D/du.
ScalarField energy_gradient(const ScalarField& u, const ScalarField& u0,
                            const DegradationModel& model, const ScalarField& depth_map,
                            const RegularizerParams& params);

struct TraceRow {
    int iteration = 0;
    double energy = 0.0;
    double data_term = 0.0;
    double reg_term = 0.0;
    double tau = 0.0;
    double el_residual = 0.0;
    double consistency_residual = 0.0;
};

struct SolverTrace {
    double initial_energy = 0.0;
    double initial_data = 0.0;
    double initial_reg = 0.0;
    bool backtrack_exhausted = false;
    std::vector<TraceRow> rows;

    /// Header plus one row per executed iteration; LF line endings.
    std::string to_csv() const;
};

struct SolverState {
    ScalarField u;
    double tau = 1.0;
    int step_index = 0;
    EnergyBreakdown current;
    /// Regularization weight current was evaluated with; flow_step refreshes
    /// the breakdown when a lambda schedule changes it between steps.
    double current_lambda = -1.0;
};

/// One explicit flow step u <- u - tau [K_D*(K_D u - u0) + lambda_k B(u, D)]
/// with B the analytic regularizer gradient or the kernel bank. The step is
/// accepted only under the sufficient-decrease rule
/// E(u') <= E(u) - 1e-4 tau ||direction||^2, halving tau otherwise; an
/// exhausted backtrack records a zero step and leaves the iterate unchanged.
void flow_step(SolverState& state, const ScalarField& u0, const DegradationModel& model,
               const ScalarField& depth_map, const ScalarField& reg_depth,
               const RegularizerParams& params, const SolverConfig& config,
               const KernelBank* bank, SolverTrace& trace);

struct RestoreResult {
    ScalarField image;
    SolverTrace trace;
};

/// Full restoration: initialize by interpolation (or Wiener), run the flow for
/// config.iterations steps with early stop on relative energy decrease below
/// stop_tol, clamp the final iterate to [0,1]. The depth map may be HR-sized
/// or LR-sized; LR-sized maps are bilinearly upsampled.
RestoreResult restore(const ScalarField& u0, const ScalarField& depth_map,
                      const DegradationModel& model, const RegularizerParams& params,
                      const SolverConfig& config, const KernelBank* bank = nullptr);

struct TrainingTriple {
    ScalarField hr;
    ScalarField lr;
    ScalarField depth;
};

struct CalibrateOptions {
    double alpha = 0.02;  // monotonicity penalty weight
    double beta = 0.01;   // smoothness penalty weight
    std::vector<std::string> coords = {"lambda"};
    int passes = 1;
    int golden_iters = 24;
    int depth_grid_points = 256;
};

struct CalibrationResult {
    RegularizerParams params;
    std::vector<double> objective_trace;  // initial value, then each accepted move
};

/// Names of the regularizer coordinates calibrate can search over.
const std::vector<std::string>& calibratable_coords();

/// Coordinate-descent calibration: golden-section search per coordinate on
/// sum ||restore(LR) - HR||^2 + alpha * monotonicity + beta * smoothness.
/// Moves are accepted only when the objective does not increase.
CalibrationResult calibrate(const RegularizerParams& init,
                            const std::vector<TrainingTriple>& data,
                            const AtmosphereParams& atm, int num_bins, int scale,
                            const SolverConfig& solver_config, const CalibrateOptions& opts);

}  // namespace distvar
