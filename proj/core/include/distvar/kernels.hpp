#pragma once

#include <string>
#include <vector>

#include "distvar/conv.hpp"
#include "distvar/field.hpp"
#include "distvar/regularize.hpp"

namespace distvar {

/// Fixed feature extractors the bank convolves against. They span the
/// differential terms of the analytic regularizer gradient.
enum class BankFeature { kIdentity = 0, kGradX = 1, kGradY = 2, kLaplacian = 3 };
constexpr int kNumBankFeatures = 4;

/// Depth-conditional kernel bank: per-anchor, per-feature k x k kernels with
/// piecewise-linear interpolation between anchors. Consecutive anchors obey
/// ||w_i(d_{m+1}) - w_i(d_m)||_2 <= L (d_{m+1} - d_m) for every feature, and
/// linear interpolation never exceeds the endpoint slope, so the bound holds
/// at every intermediate depth.
struct KernelBank {
    std::vector<double> anchors;               // strictly increasing depths, meters
    std::vector<std::vector<Kernel>> weights;  // [anchor][feature]
    double lipschitz_L = 1.0;

    int num_anchors() const { return int(anchors.size()); }
    int kernel_radius() const {
        return weights.empty() || weights[0].empty() ? 0 : weights[0][0].radius;
    }
};

void validate(const KernelBank& bank);

/// Bank of zero kernels on uniformly spaced anchors over [d_min, d_max].
KernelBank make_zero_bank(int num_anchors, double d_min, double d_max, int kernel_size,
                          double lipschitz_L);

/// Bank with small random kernels (already Lipschitz-projected).
KernelBank make_random_bank(int num_anchors, double d_min, double d_max, int kernel_size,
                            double lipschitz_L, std::uint64_t seed, double amplitude = 0.1);

/// Piecewise-linear blend of the anchor kernels at depth d. Depths outside
/// the anchor range clamp to the nearest anchor; `clamped` reports it.
std::vector<Kernel> interpolate_kernels(const KernelBank& bank, double d,
                                        bool* clamped = nullptr);

/// Enforces the anchor-resolution Lipschitz bound by sweeping anchors in
/// increasing order and rescaling violating consecutive differences to length
/// L * delta_d. Feasible banks are returned unchanged; the map is idempotent.
KernelBank project_lipschitz(const KernelBank& bank);

/// True when every consecutive anchor difference satisfies the bound with the
/// given slack.
bool satisfies_lipschitz(const KernelBank& bank, double slack = 1e-12);

/// B(u, D) = sum_i w_i(D) * F_i(u), evaluated by convolving each feature map
/// per anchor and blending the anchor responses with per-pixel hat weights.
/// By linearity this equals per-pixel kernel interpolation exactly.
ScalarField apply_bank(const KernelBank& bank, const ScalarField& u,
                       const ScalarField& depth_map);

/// One (field, depth) training sample for bank fitting.
struct BankSample {
    ScalarField u;
    ScalarField depth;
};

struct BankFitResult {
    KernelBank bank;
    double initial_residual = 0.0;
    double final_residual = 0.0;
    int iterations = 0;
};

/// Projected steepest descent on sum_j ||apply_bank(u_j) - target_j||^2.
/// step <= 0 selects the exact line-search step each iteration (the
/// objective is quadratic in the kernel entries); a positive value is used
/// as a fixed step. project_lipschitz runs after every step; steps that fail
/// to decrease the residual halve and retry, so the residual trace is
/// non-increasing across accepted steps.
BankFitResult fit_bank_to_targets(const KernelBank& bank, const std::vector<BankSample>& samples,
                                  const std::vector<ScalarField>& targets, int iterations,
                                  double step = 0.0);

/// fit_bank_to_targets against the analytic regularizer gradient of each
/// sample, so kernel-bank updates track the analytic gradient flow.
BankFitResult fit_bank_to_analytic(const KernelBank& bank, const std::vector<BankSample>& samples,
                                   const RegularizerParams& params, int iterations,
                                   double step = 0.0);

/// Flat binary serialization: magic "DKB1", then u32 M (anchors), u32 N
/// (features), u32 k (kernel size), f64 L, M anchor depths, then kernel
/// entries as f64 in anchor-major order (for each anchor, for each feature,
/// k*k taps row-major). Little-endian throughout.
void save_bank(const KernelBank& bank, const std::string& path);
KernelBank load_bank(const std::string& path);

}  // namespace distvar
