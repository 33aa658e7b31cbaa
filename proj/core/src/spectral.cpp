#include "distvar/spectral.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "distvar/resample.hpp"

namespace distvar {

double SignalPsd::operator()(double xi_mag) const {
    return amplitude / (std::pow(xi_mag, exponent) + offset);
}

void validate(const SpectralProfile& profile) {
    if (profile.epsilon <= 0.0) throw std::invalid_argument("spectral: epsilon must be > 0");
    if (profile.alpha <= 0.0 || profile.alpha >= 1.0)
        throw std::invalid_argument("spectral: alpha must lie in (0,1)");
    if (profile.signal_psd.amplitude <= 0.0 || profile.signal_psd.offset <= 0.0)
        throw std::invalid_argument("spectral: signal PSD must be positive");
    if (profile.noise_floor < 0.0)
        throw std::invalid_argument("spectral: noise floor must be >= 0");
    if (profile.beta_eff < 0.0) throw std::invalid_argument("spectral: beta_eff must be >= 0");
}

double effective_beta(const AtmosphereParams& atm) { return attenuation_coefficient(atm, 1.0); }

int numerical_rank(const AtmosphereParams& atm, double depth, double epsilon,
                   const FrequencyGrid& grid) {
    if (epsilon <= 0.0) throw std::invalid_argument("numerical_rank: epsilon must be > 0");
    int count = 0;
    for (int ky = 0; ky < grid.height; ++ky)
        for (int kx = 0; kx < grid.width; ++kx)
            if (symbol_magnitude(grid.radial(kx, ky), depth, atm) > epsilon) ++count;
    return count;
}

double cutoff_frequency(double depth, double sigma0_peak, double epsilon, double beta_eff) {
    if (depth <= 0.0) throw std::invalid_argument("cutoff_frequency: depth must be > 0");
    if (epsilon <= 0.0 || epsilon >= sigma0_peak)
        throw std::invalid_argument(
            "cutoff_frequency: epsilon must satisfy 0 < epsilon < sigma0 peak");
    if (beta_eff <= 0.0)
        throw std::invalid_argument("cutoff_frequency: attenuation coefficient must be > 0");
    return std::pow(3.0 * std::log(sigma0_peak / epsilon) / (beta_eff * depth), 0.75);
}

ScalarField cutoff_map(const ScalarField& depth_map, double sigma0_peak, double epsilon,
                       double beta_eff) {
    ScalarField out(depth_map.width, depth_map.height, 0.0, depth_map.pixel_pitch);
    for (std::size_t i = 0; i < depth_map.size(); ++i)
        out[i] = cutoff_frequency(depth_map[i], sigma0_peak, epsilon, beta_eff);
    return out;
}

ScalarField bandlimit_project(const ScalarField& u, double cutoff, double alpha) {
    if (cutoff < 0.0) throw std::invalid_argument("bandlimit_project: cutoff must be >= 0");
    const double limit = alpha * cutoff;
    FrequencyGrid grid(u.width, u.height, u.pixel_pitch);
    ComplexField spectrum = dft2(u);
    for (int ky = 0; ky < u.height; ++ky)
        for (int kx = 0; kx < u.width; ++kx)
            if (grid.radial(kx, ky) > limit) spectrum.at(kx, ky) = 0.0;
    return idft2_real(spectrum, u.pixel_pitch);
}

ComplexField wiener_kernel(const AtmosphereParams& atm, double depth,
                           const SpectralProfile& profile, const FrequencyGrid& grid) {
    double band = std::numeric_limits<double>::infinity();
    if (profile.beta_eff > 0.0)
        band = profile.alpha *
               cutoff_frequency(depth, sigma0_magnitude(atm, 0.0), profile.epsilon,
                                profile.beta_eff);
    ComplexField gain(grid.width, grid.height);
    for (int ky = 0; ky < grid.height; ++ky) {
        for (int kx = 0; kx < grid.width; ++kx) {
            const double xi = grid.radial(kx, ky);
            if (xi > band) continue;
            const double sym = symbol_magnitude(xi, depth, atm);
            const double su = profile.signal_psd(xi);
            const double denom = sym * sym * su + profile.noise_floor;
            gain.at(kx, ky) = denom > 0.0 ? sym * su / denom : 0.0;
        }
    }
    return gain;
}

ScalarField wiener_bin_component(const ScalarField& u_hr, const DegradationModel& model, int bin,
                                 const SpectralProfile& profile) {
    if (bin < 0 || bin >= model.num_bins())
        throw std::invalid_argument("wiener_bin_component: bin out of range");
    FrequencyGrid grid(u_hr.width, u_hr.height, u_hr.pixel_pitch);
    const ComplexField gain =
        wiener_kernel(model.atmosphere, model.depth_bins[bin], profile, grid);
    ComplexField spectrum = dft2(u_hr);
    for (std::size_t i = 0; i < spectrum.size(); ++i) spectrum.data[i] *= gain.data[i];
    return idft2_real(spectrum, u_hr.pixel_pitch);
}

ScalarField wiener_restore(const ScalarField& u0, const DegradationModel& model,
                           const ScalarField& depth_map, const SpectralProfile& profile) {
    const ScalarField up = upsample_bilinear(u0, model.scale);
    require_same_shape(up, depth_map, "wiener_restore");
    ScalarField out(up.width, up.height, 0.0, up.pixel_pitch);
    for (int b = 0; b < model.num_bins(); ++b) {
        // Skip bins that receive no hat weight anywhere.
        bool used = false;
        for (std::size_t i = 0; i < depth_map.size() && !used; ++i) {
            const HatWeight hw = hat_weight(model.depth_bins, depth_map[i]);
            used = (hw.lo == b && hw.w_lo != 0.0) || (hw.lo + 1 == b && hw.w_lo != 1.0);
        }
        if (!used) continue;
        const ScalarField comp = wiener_bin_component(up, model, b, profile);
        for (std::size_t i = 0; i < out.size(); ++i) {
            const HatWeight hw = hat_weight(model.depth_bins, depth_map[i]);
            double w = 0.0;
            if (hw.lo == b) w = hw.w_lo;
            else if (hw.lo + 1 == b) w = 1.0 - hw.w_lo;
            out[i] += w * comp[i];
        }
    }
    return out;
}

void analyze_bins(SpectralProfile& profile, const DegradationModel& model,
                  const FrequencyGrid& grid) {
    validate(profile);
    profile.bin_depths = model.depth_bins;
    profile.bin_ranks.clear();
    profile.bin_cutoffs.clear();
    const double peak = sigma0_magnitude(model.atmosphere, 0.0);
    for (double d : model.depth_bins) {
        profile.bin_ranks.push_back(numerical_rank(model.atmosphere, d, profile.epsilon, grid));
        profile.bin_cutoffs.push_back(
            profile.beta_eff > 0.0
                ? cutoff_frequency(d, peak, profile.epsilon, profile.beta_eff)
                : std::numeric_limits<double>::infinity());
    }
}

}  // namespace distvar
