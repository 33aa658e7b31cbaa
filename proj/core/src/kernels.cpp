#include "distvar/kernels.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <fstream>
#include <stdexcept>

#include "distvar/binning.hpp"
#include "distvar/rng.hpp"

namespace distvar {

void validate(const KernelBank& bank) {
    if (bank.anchors.empty()) throw std::invalid_argument("kernel bank: no anchors");
    for (std::size_t m = 1; m < bank.anchors.size(); ++m)
        if (bank.anchors[m] <= bank.anchors[m - 1])
            throw std::invalid_argument("kernel bank: anchors must be strictly increasing");
    if (bank.weights.size() != bank.anchors.size())
        throw std::invalid_argument("kernel bank: one kernel set per anchor required");
    if (bank.lipschitz_L <= 0.0)
        throw std::invalid_argument("kernel bank: Lipschitz bound must be > 0");
    const int radius = bank.kernel_radius();
    for (const auto& set : bank.weights) {
        if (int(set.size()) != kNumBankFeatures)
            throw std::invalid_argument("kernel bank: expected one kernel per feature");
        for (const Kernel& k : set)
            if (k.radius != radius)
                throw std::invalid_argument("kernel bank: kernels must share one size");
    }
}

namespace {
std::vector<double> uniform_anchors(int num_anchors, double d_min, double d_max) {
    if (num_anchors < 1) throw std::invalid_argument("kernel bank: need at least one anchor");
    if (num_anchors > 1 && d_max <= d_min)
        throw std::invalid_argument("kernel bank: need d_max > d_min");
    std::vector<double> anchors(num_anchors);
    for (int m = 0; m < num_anchors; ++m)
        anchors[m] = num_anchors == 1
                         ? d_min
                         : d_min + (d_max - d_min) * double(m) / double(num_anchors - 1);
    return anchors;
}

int radius_from_size(int kernel_size) {
    if (kernel_size < 1 || kernel_size % 2 == 0)
        throw std::invalid_argument("kernel bank: kernel size must be odd and positive");
    return kernel_size / 2;
}
}  // namespace

KernelBank make_zero_bank(int num_anchors, double d_min, double d_max, int kernel_size,
                          double lipschitz_L) {
    KernelBank bank;
    bank.anchors = uniform_anchors(num_anchors, d_min, d_max);
    bank.lipschitz_L = lipschitz_L;
    const int r = radius_from_size(kernel_size);
    bank.weights.assign(bank.anchors.size(),
                        std::vector<Kernel>(kNumBankFeatures, Kernel(r)));
    validate(bank);
    return bank;
}

KernelBank make_random_bank(int num_anchors, double d_min, double d_max, int kernel_size,
                            double lipschitz_L, std::uint64_t seed, double amplitude) {
    KernelBank bank = make_zero_bank(num_anchors, d_min, d_max, kernel_size, lipschitz_L);
    Rng rng(seed);
    for (auto& set : bank.weights)
        for (Kernel& k : set)
            for (double& t : k.taps) t = amplitude * (2.0 * rng.next_double() - 1.0);
    return project_lipschitz(bank);
}

std::vector<Kernel> interpolate_kernels(const KernelBank& bank, double d, bool* clamped) {
    if (bank.anchors.empty()) throw std::invalid_argument("interpolate_kernels: empty bank");
    if (clamped) *clamped = d < bank.anchors.front() || d > bank.anchors.back();
    const HatWeight hw = hat_weight(bank.anchors, d);
    std::vector<Kernel> out = bank.weights[hw.lo];
    if (hw.lo + 1 < bank.num_anchors() && hw.w_lo != 1.0) {
        const double w_hi = 1.0 - hw.w_lo;
        for (int i = 0; i < kNumBankFeatures; ++i)
            for (std::size_t t = 0; t < out[i].taps.size(); ++t)
                out[i].taps[t] =
                    hw.w_lo * out[i].taps[t] + w_hi * bank.weights[hw.lo + 1][i].taps[t];
    }
    return out;
}

KernelBank project_lipschitz(const KernelBank& bank) {
    validate(bank);
    KernelBank out = bank;
    for (int m = 0; m + 1 < out.num_anchors(); ++m) {
        const double budget = out.lipschitz_L * (out.anchors[m + 1] - out.anchors[m]);
        for (int i = 0; i < kNumBankFeatures; ++i) {
            // Rescale until the recomputed difference lands at or under the
            // budget in floating point, so the projection is exactly
            // idempotent. The few-ulp over-shrink keeps the plain
            // budget/dist rescale from rounding back to a no-op that still
            // measures infeasible by one ulp.
            for (int guard = 0; guard < 8; ++guard) {
                const double dist = l2_distance(out.weights[m + 1][i], out.weights[m][i]);
                if (dist <= budget) break;
                const double shrink =
                    (budget / dist) * (1.0 - 8.0 * std::numeric_limits<double>::epsilon());
                Kernel& hi = out.weights[m + 1][i];
                const Kernel& lo = out.weights[m][i];
                for (std::size_t t = 0; t < hi.taps.size(); ++t)
                    hi.taps[t] = lo.taps[t] + shrink * (hi.taps[t] - lo.taps[t]);
            }
        }
    }
    return out;
}

bool satisfies_lipschitz(const KernelBank& bank, double slack) {
    for (int m = 0; m + 1 < bank.num_anchors(); ++m) {
        const double budget = bank.lipschitz_L * (bank.anchors[m + 1] - bank.anchors[m]);
        for (int i = 0; i < kNumBankFeatures; ++i)
            if (l2_distance(bank.weights[m + 1][i], bank.weights[m][i]) > budget + slack)
                return false;
    }
    return true;
}

namespace {
std::vector<ScalarField> feature_maps(const ScalarField& u) {
    const VectorField g = gradient(u);
    return {u, g.x, g.y, laplacian(u)};
}
}  // namespace

ScalarField apply_bank(const KernelBank& bank, const ScalarField& u,
                       const ScalarField& depth_map) {
    require_same_shape(u, depth_map, "apply_bank");
    validate(bank);
    const std::vector<ScalarField> features = feature_maps(u);

    // Per-anchor responses, then per-pixel linear blend. Identical to
    // per-pixel kernel interpolation because everything is linear.
    ScalarField out(u.width, u.height, 0.0, u.pixel_pitch);
    std::vector<ScalarField> responses;
    responses.reserve(bank.num_anchors());
    for (int m = 0; m < bank.num_anchors(); ++m) {
        ScalarField resp(u.width, u.height, 0.0, u.pixel_pitch);
        for (int i = 0; i < kNumBankFeatures; ++i) {
            const ScalarField conv = convolve_replicate(features[i], bank.weights[m][i]);
            for (std::size_t t = 0; t < resp.size(); ++t) resp[t] += conv[t];
        }
        responses.push_back(std::move(resp));
    }
    for (std::size_t t = 0; t < out.size(); ++t) {
        const HatWeight hw = hat_weight(bank.anchors, depth_map[t]);
        out[t] = hw.w_lo * responses[hw.lo][t];
        if (hw.lo + 1 < bank.num_anchors()) out[t] += (1.0 - hw.w_lo) * responses[hw.lo + 1][t];
    }
    return out;
}

namespace {

double fit_residual(const KernelBank& bank, const std::vector<BankSample>& samples,
                    const std::vector<ScalarField>& targets) {
    double acc = 0.0;
    for (std::size_t j = 0; j < samples.size(); ++j) {
        const ScalarField r = subtract(apply_bank(bank, samples[j].u, samples[j].depth),
                                       targets[j]);
        acc += inner_product(r, r);
    }
    return acc;
}

// Gradient of the squared residual with respect to every kernel tap. The map
// tap -> output is linear: out(x) += c_m(x) * F_i(clamp(x - t)), so the
// derivative is a clamped gather of c_m .* residual against the feature map.
void accumulate_fit_gradient(const KernelBank& bank, const BankSample& sample,
                             const ScalarField& target,
                             std::vector<std::vector<Kernel>>& grad) {
    const std::vector<ScalarField> features = feature_maps(sample.u);
    const ScalarField residual = subtract(apply_bank(bank, sample.u, sample.depth), target);
    const int w = sample.u.width, h = sample.u.height;
    const int r = bank.kernel_radius();

    std::vector<ScalarField> masked(bank.num_anchors(),
                                    ScalarField(w, h, 0.0, sample.u.pixel_pitch));
    for (std::size_t t = 0; t < residual.size(); ++t) {
        const HatWeight hw = hat_weight(bank.anchors, sample.depth[t]);
        masked[hw.lo][t] += hw.w_lo * residual[t];
        if (hw.lo + 1 < bank.num_anchors()) masked[hw.lo + 1][t] += (1.0 - hw.w_lo) * residual[t];
    }

    auto clampi = [](int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); };
    for (int m = 0; m < bank.num_anchors(); ++m) {
        for (int i = 0; i < kNumBankFeatures; ++i) {
            Kernel& gk = grad[m][i];
            for (int ty = -r; ty <= r; ++ty) {
                for (int tx = -r; tx <= r; ++tx) {
                    double acc = 0.0;
                    for (int y = 0; y < h; ++y) {
                        const int sy = clampi(y - ty, 0, h - 1);
                        for (int x = 0; x < w; ++x) {
                            const int sx = clampi(x - tx, 0, w - 1);
                            acc += masked[m].at(x, y) * features[i].at(sx, sy);
                        }
                    }
                    gk.tap(tx, ty) += 2.0 * acc;
                }
            }
        }
    }
}

}  // namespace

BankFitResult fit_bank_to_targets(const KernelBank& bank, const std::vector<BankSample>& samples,
                                  const std::vector<ScalarField>& targets, int iterations,
                                  double step) {
    if (samples.empty()) throw std::invalid_argument("fit_bank_to_targets: need >= 1 sample");
    if (samples.size() != targets.size())
        throw std::invalid_argument("fit_bank_to_targets: one target per sample required");
    validate(bank);

    BankFitResult result;
    result.bank = project_lipschitz(bank);
    result.initial_residual = fit_residual(result.bank, samples, targets);
    double residual = result.initial_residual;

    for (int it = 0; it < iterations; ++it) {
        std::vector<std::vector<Kernel>> grad(
            result.bank.num_anchors(),
            std::vector<Kernel>(kNumBankFeatures, Kernel(result.bank.kernel_radius())));
        for (std::size_t j = 0; j < samples.size(); ++j)
            accumulate_fit_gradient(result.bank, samples[j], targets[j], grad);

        double tau = step;
        if (step <= 0.0) {
            // Exact line search along -grad: the objective is quadratic in
            // the kernel entries, so the optimal step is
            // ||grad||^2 / (2 sum ||J grad||^2) with J the linear map from
            // kernels to output fields.
            double grad_norm2 = 0.0;
            for (const auto& set : grad)
                for (const Kernel& k : set)
                    for (double t : k.taps) grad_norm2 += t * t;
            if (grad_norm2 == 0.0) break;
            KernelBank dir = result.bank;
            for (int m = 0; m < dir.num_anchors(); ++m)
                for (int i = 0; i < kNumBankFeatures; ++i) dir.weights[m][i] = grad[m][i];
            double jdir_norm2 = 0.0;
            for (const BankSample& s : samples) {
                const ScalarField jd = apply_bank(dir, s.u, s.depth);
                jdir_norm2 += inner_product(jd, jd);
            }
            if (jdir_norm2 == 0.0) break;
            tau = grad_norm2 / (2.0 * jdir_norm2);
        }

        bool accepted = false;
        for (int halvings = 0; halvings < 30 && !accepted; ++halvings) {
            KernelBank candidate = result.bank;
            for (int m = 0; m < candidate.num_anchors(); ++m)
                for (int i = 0; i < kNumBankFeatures; ++i)
                    for (std::size_t t = 0; t < candidate.weights[m][i].taps.size(); ++t)
                        candidate.weights[m][i].taps[t] -= tau * grad[m][i].taps[t];
            candidate = project_lipschitz(candidate);
            const double cand_residual = fit_residual(candidate, samples, targets);
            if (cand_residual <= residual) {
                result.bank = std::move(candidate);
                residual = cand_residual;
                accepted = true;
            } else {
                tau *= 0.5;
            }
        }
        result.iterations = it + 1;
        if (!accepted) break;
        if (residual <= 1e-30) break;
    }
    result.final_residual = residual;
    return result;
}

BankFitResult fit_bank_to_analytic(const KernelBank& bank, const std::vector<BankSample>& samples,
                                   const RegularizerParams& params, int iterations, double step) {
    std::vector<ScalarField> targets;
    targets.reserve(samples.size());
    for (const BankSample& s : samples)
        targets.push_back(regularizer_gradient(s.u, s.depth, params));
    return fit_bank_to_targets(bank, samples, targets, iterations, step);
}

namespace {

template <typename T>
struct bits_of;
template <>
struct bits_of<std::uint32_t> {
    using type = std::uint32_t;
};
template <>
struct bits_of<double> {
    using type = std::uint64_t;
};

// Explicit little-endian byte images, independent of host byte order.
template <typename T>
void write_le(std::ofstream& out, T value) {
    typename bits_of<T>::type bits;
    std::memcpy(&bits, &value, sizeof(T));
    unsigned char bytes[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = (bits >> (8 * i)) & 0xff;
    out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T read_le(std::ifstream& in) {
    unsigned char bytes[sizeof(T)];
    in.read(reinterpret_cast<char*>(bytes), sizeof(T));
    typename bits_of<T>::type bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        bits |= typename bits_of<T>::type(bytes[i]) << (8 * i);
    T value;
    std::memcpy(&value, &bits, sizeof(T));
    return value;
}

}  // namespace

void save_bank(const KernelBank& bank, const std::string& path) {
    validate(bank);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_bank: cannot open " + path);
    out.write("DKB1", 4);
    write_le<std::uint32_t>(out, std::uint32_t(bank.num_anchors()));
    write_le<std::uint32_t>(out, std::uint32_t(kNumBankFeatures));
    write_le<std::uint32_t>(out, std::uint32_t(2 * bank.kernel_radius() + 1));
    write_le<double>(out, bank.lipschitz_L);
    for (double a : bank.anchors) write_le<double>(out, a);
    for (const auto& set : bank.weights)
        for (const Kernel& k : set)
            for (double t : k.taps) write_le<double>(out, t);
    if (!out) throw std::runtime_error("save_bank: write failed for " + path);
}

KernelBank load_bank(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_bank: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "DKB1", 4) != 0)
        throw std::runtime_error("load_bank: bad magic in " + path);
    const std::uint32_t m = read_le<std::uint32_t>(in);
    const std::uint32_t n = read_le<std::uint32_t>(in);
    const std::uint32_t k = read_le<std::uint32_t>(in);
    const double lip = read_le<double>(in);
    if (n != std::uint32_t(kNumBankFeatures))
        throw std::runtime_error("load_bank: unexpected feature count in " + path);
    if (k % 2 == 0 || k == 0) throw std::runtime_error("load_bank: even kernel size in " + path);
    KernelBank bank;
    bank.lipschitz_L = lip;
    bank.anchors.resize(m);
    for (auto& a : bank.anchors) a = read_le<double>(in);
    bank.weights.assign(m, std::vector<Kernel>(kNumBankFeatures, Kernel(int(k) / 2)));
    for (auto& set : bank.weights)
        for (Kernel& kernel : set)
            for (double& t : kernel.taps) t = read_le<double>(in);
    if (!in) throw std::runtime_error("load_bank: truncated file " + path);
    validate(bank);
    return bank;
}

}  // namespace distvar
