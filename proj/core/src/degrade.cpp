#include "distvar/degrade.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "distvar/fft.hpp"
#include "distvar/resample.hpp"
#include "distvar/rng.hpp"

namespace distvar {

HatWeight hat_weight(const std::vector<double>& centers, double d) {
    const int n = int(centers.size());
    if (n == 1 || d <= centers.front()) return {0, 1.0};
    if (d >= centers.back()) return {n - 2, 0.0};
    int lo = 0;
    while (lo + 1 < n - 1 && centers[lo + 1] <= d) ++lo;
    const double span = centers[lo + 1] - centers[lo];
    return {lo, (centers[lo + 1] - d) / span};
}

void validate(const AtmosphereParams& atm) {
    if (atm.r0 <= 0.0) throw std::invalid_argument("atmosphere: r0 must be > 0");
    if (atm.beta0 < 0.0) throw std::invalid_argument("atmosphere: beta0 must be >= 0");
    if (atm.wavelength <= 0.0) throw std::invalid_argument("atmosphere: wavelength must be > 0");
    if (atm.refractive_index <= 1.0)
        throw std::invalid_argument("atmosphere: refractive_index must be > 1");
    if (atm.particle_density < 0.0)
        throw std::invalid_argument("atmosphere: particle_density must be >= 0");
    if (atm.noise_sigma < 0.0) throw std::invalid_argument("atmosphere: noise_sigma must be >= 0");
}

double sigma0_magnitude(const AtmosphereParams& atm, double xi_mag) {
    const double a = xi_mag * atm.r0;
    return std::exp(-0.5 * a * a);
}

double attenuation_coefficient(const AtmosphereParams& atm, double xi_mag) {
    const double pi = 3.14159265358979323846;
    const double n2 = atm.refractive_index * atm.refractive_index;
    const double lorentz = (n2 - 1.0) / (n2 + 2.0);
    const double xi2 = xi_mag * xi_mag;
    const double lam2 = atm.wavelength * atm.wavelength;
    return atm.beta0 * (8.0 * pi * pi * pi / 3.0) * (xi2 * xi2) / (lam2 * lam2) *
           lorentz * lorentz * atm.particle_density;
}

double symbol_magnitude(double xi_mag, double depth, const AtmosphereParams& atm) {
    if (xi_mag < 0.0) throw std::invalid_argument("symbol_magnitude: |xi| must be >= 0");
    if (depth < 0.0) throw std::invalid_argument("symbol_magnitude: depth must be >= 0");
    return sigma0_magnitude(atm, xi_mag) * std::exp(-attenuation_coefficient(atm, xi_mag) * depth);
}

void validate(const DegradationModel& model) {
    validate(model.atmosphere);
    if (model.depth_bins.size() < 1)
        throw std::invalid_argument("model: at least one depth bin required");
    for (std::size_t b = 1; b < model.depth_bins.size(); ++b)
        if (model.depth_bins[b] <= model.depth_bins[b - 1])
            throw std::invalid_argument("model: depth bins must be strictly increasing");
    if (model.psf_bank.size() != model.depth_bins.size())
        throw std::invalid_argument("model: one PSF per depth bin required");
    if (!valid_scale(model.scale))
        throw std::invalid_argument("model: scale must be one of {1,2,4,8}");
    for (const Kernel& k : model.psf_bank) {
        const double dc = k.sum();
        if (std::fabs(dc - 1.0) > 1e-6)
            throw std::invalid_argument("model: PSF DC gain " + std::to_string(dc) +
                                        " deviates from unit transmission");
    }
}

namespace {

// Synthesis grid for turning the radial symbol into a spatial PSF. Large
// enough that truncation at radius 15 leaves no wraparound of consequence.
constexpr int kPsfGrid = 64;

Kernel psf_from_symbol(const AtmosphereParams& atm, double depth, double pixel_pitch,
                       int requested_radius) {
    const int g = std::max(kPsfGrid, 4 * std::max(requested_radius, 1));
    FrequencyGrid grid(g, g, pixel_pitch);
    ComplexField spectrum(g, g);
    for (int ky = 0; ky < g; ++ky)
        for (int kx = 0; kx < g; ++kx)
            spectrum.at(kx, ky) = symbol_magnitude(grid.radial(kx, ky), depth, atm);

    // Plain inverse DFT (1/N scaling) so the kernel's frequency response is
    // the sampled symbol; the unitary idft2 carries 1/sqrt(N).
    const ScalarField wrap = idft2_real(spectrum, pixel_pitch);
    const double norm = 1.0 / std::sqrt(double(g) * g);
    auto wrap_tap = [&](int tx, int ty) {
        const int sx = ((tx % g) + g) % g;
        const int sy = ((ty % g) + g) % g;
        return wrap.at(sx, sy) * norm;
    };

    const int max_radius = requested_radius > 0 ? std::min(requested_radius, g / 2 - 1)
                                                : std::min(15, g / 2 - 1);
    int radius = max_radius;
    if (requested_radius <= 0) {
        double total = 0.0;
        for (int ty = -g / 2 + 1; ty < g / 2; ++ty)
            for (int tx = -g / 2 + 1; tx < g / 2; ++tx) total += std::fabs(wrap_tap(tx, ty));
        for (int r = 0; r <= max_radius; ++r) {
            double mass = 0.0;
            for (int ty = -r; ty <= r; ++ty)
                for (int tx = -r; tx <= r; ++tx) mass += std::fabs(wrap_tap(tx, ty));
            if (mass >= 0.999 * total) {
                radius = r;
                break;
            }
        }
    }

    Kernel k(radius);
    for (int ty = -radius; ty <= radius; ++ty)
        for (int tx = -radius; tx <= radius; ++tx) k.tap(tx, ty) = wrap_tap(tx, ty);

    // Renormalize so the truncated kernel's DC gain equals the symbol at DC,
    // which is the depth transmission exp(-beta(0) d) == 1.
    const double dc = k.sum();
    const double target = symbol_magnitude(0.0, depth, atm);
    if (dc <= 0.0) throw std::runtime_error("psf_from_symbol: degenerate kernel mass");
    for (double& t : k.taps) t *= target / dc;
    return k;
}

std::vector<ScalarField> bin_weight_maps(const DegradationModel& model,
                                         const ScalarField& depth_map) {
    const int nb = model.num_bins();
    std::vector<ScalarField> maps(nb, ScalarField(depth_map.width, depth_map.height, 0.0,
                                                  depth_map.pixel_pitch));
    for (std::size_t i = 0; i < depth_map.size(); ++i) {
        const HatWeight hw = hat_weight(model.depth_bins, depth_map[i]);
        maps[hw.lo][i] += hw.w_lo;
        if (hw.lo + 1 < nb) maps[hw.lo + 1][i] += 1.0 - hw.w_lo;
    }
    return maps;
}

bool any_nonzero(const ScalarField& f) {
    for (double v : f.data)
        if (v != 0.0) return true;
    return false;
}

}  // namespace

DegradationModel build_model(const AtmosphereParams& atm, const ScalarField& depth_map,
                             int num_bins, int scale, int requested_radius) {
    validate(atm);
    if (num_bins < 2) throw std::invalid_argument("build_model: need at least 2 depth bins");
    if (!valid_scale(scale))
        throw std::invalid_argument("build_model: scale must be one of {1,2,4,8}");
    double dmin = depth_map[0], dmax = depth_map[0];
    for (double d : depth_map.data) {
        if (!(d > 0.0)) throw std::invalid_argument("build_model: depth map must be > 0 everywhere");
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
    }

    DegradationModel model;
    model.atmosphere = atm;
    model.scale = scale;
    model.depth_bins.resize(num_bins);
    if (dmax - dmin < 1e-12 * std::max(1.0, dmax)) {
        // Degenerate range: keep bins strictly increasing with a negligible
        // spread so all hat weight lands on the first bin.
        const double h = std::max(1e-9, 1e-9 * dmax);
        for (int b = 0; b < num_bins; ++b) model.depth_bins[b] = dmin + b * h;
    } else {
        for (int b = 0; b < num_bins; ++b)
            model.depth_bins[b] = dmin + (dmax - dmin) * double(b) / double(num_bins - 1);
    }

    // Shared radius across bins: the deepest bin has the widest PSF.
    int radius = requested_radius;
    if (radius <= 0) {
        radius = 0;
        for (double d : model.depth_bins)
            radius = std::max(radius,
                              psf_from_symbol(atm, d, depth_map.pixel_pitch, 0).radius);
    }
    model.kernel_radius = radius;
    model.psf_bank.reserve(num_bins);
    for (double d : model.depth_bins)
        model.psf_bank.push_back(psf_from_symbol(atm, d, depth_map.pixel_pitch, radius));

    validate(model);
    return model;
}

ScalarField apply(const DegradationModel& model, const ScalarField& u,
                  const ScalarField& depth_map) {
    require_same_shape(u, depth_map, "degrade::apply");
    if (u.width % model.scale != 0 || u.height % model.scale != 0)
        throw std::invalid_argument("degrade::apply: grid not divisible by model scale");
    const std::vector<ScalarField> weights = bin_weight_maps(model, depth_map);
    ScalarField blended(u.width, u.height, 0.0, u.pixel_pitch);
    for (int b = 0; b < model.num_bins(); ++b) {
        if (!any_nonzero(weights[b])) continue;
        const ScalarField blurred = convolve_replicate(u, model.psf_bank[b]);
        for (std::size_t i = 0; i < blended.size(); ++i) blended[i] += weights[b][i] * blurred[i];
    }
    return downsample(blended, model.scale);
}

ScalarField apply_adjoint(const DegradationModel& model, const ScalarField& v,
                          const ScalarField& depth_map) {
    if (v.width * model.scale != depth_map.width || v.height * model.scale != depth_map.height)
        throw std::invalid_argument(
            "degrade::apply_adjoint: input grid times scale must match depth grid");
    const std::vector<ScalarField> weights = bin_weight_maps(model, depth_map);
    const ScalarField up = upsample_adjoint(v, model.scale);
    ScalarField out(depth_map.width, depth_map.height, 0.0, depth_map.pixel_pitch);
    for (int b = 0; b < model.num_bins(); ++b) {
        if (!any_nonzero(weights[b])) continue;
        const ScalarField masked = multiply(weights[b], up);
        const ScalarField spread = convolve_replicate_adjoint(masked, model.psf_bank[b]);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += spread[i];
    }
    return out;
}

ScalarField add_noise(const ScalarField& u, double noise_sigma, std::uint64_t rng_seed) {
    if (noise_sigma < 0.0) throw std::invalid_argument("add_noise: noise_sigma must be >= 0");
    if (noise_sigma == 0.0) return u;
    ScalarField out = u;
    Rng rng(rng_seed);
    for (double& v : out.data) v += noise_sigma * rng.next_gaussian();
    return out;
}

}  // namespace distvar
