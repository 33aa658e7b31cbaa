#pragma once

#include <vector>

#include "distvar/degrade.hpp"
#include "distvar/fft.hpp"
#include "distvar/field.hpp"

namespace distvar {

/// Parametric power-law signal spectrum S_u(|xi|) = amplitude / (|xi|^exponent + offset).
struct SignalPsd {
    double amplitude = 1.0;
    double exponent = 2.0;
    double offset = 1e-3;

    double operator()(double xi_mag) const;
};

/// Spectral reconstruction settings: noise threshold epsilon, bandwidth
/// safety factor alpha in (0,1), signal/noise power spectra, and the scalar
/// attenuation coefficient used by the closed-form cutoff. beta_eff == 0
/// means attenuation-free (unbounded cutoff).
struct SpectralProfile {
    double epsilon = 0.01;
    double alpha = 0.8;
    SignalPsd signal_psd;
    double noise_floor = 1e-4;  // flat S_eta; noise_sigma^2 under the unitary DFT
    double beta_eff = 0.0;

    // Filled by analyze_bins: one entry per model depth bin.
    std::vector<double> bin_depths;
    std::vector<int> bin_ranks;
    std::vector<double> bin_cutoffs;
};

void validate(const SpectralProfile& profile);

/// Scalar attenuation coefficient for the closed-form cutoff: the scattering
/// attenuation evaluated at the reference frequency 1 cycle/meter.
double effective_beta(const AtmosphereParams& atm);

/// Number of frequency bins whose symbol magnitude exceeds epsilon at depth d.
int numerical_rank(const AtmosphereParams& atm, double depth, double epsilon,
                   const FrequencyGrid& grid);

/// Closed-form cutoff frequency (3 ln(sigma0/epsilon) / (beta d))^(3/4),
/// cycles per meter. Requires d > 0, 0 < epsilon < sigma0, beta > 0.
double cutoff_frequency(double depth, double sigma0_peak, double epsilon, double beta_eff);

/// Pixelwise cutoff_frequency over a depth map.
ScalarField cutoff_map(const ScalarField& depth_map, double sigma0_peak, double epsilon,
                       double beta_eff);

/// Zeroes all DFT bins with |xi| > alpha * cutoff. Orthogonal projection:
/// idempotent, self-adjoint, preserves DC.
ScalarField bandlimit_project(const ScalarField& u, double cutoff, double alpha);

/// Constrained Wiener gain on the given grid:
///   G(xi) = sigma* S_u / (|sigma|^2 S_u + S_eta)  for |xi| <= alpha xi_c(d),
///   0 otherwise.
ComplexField wiener_kernel(const AtmosphereParams& atm, double depth,
                           const SpectralProfile& profile, const FrequencyGrid& grid);

/// One depth bin of the Wiener restoration: the bin's gain applied spectrally
/// to the (already upsampled) image. Exposed so the band-limit guarantee can
/// be checked bin by bin.
ScalarField wiener_bin_component(const ScalarField& u_hr, const DegradationModel& model, int bin,
                                 const SpectralProfile& profile);

/// Non-iterative baseline and solver initialization: bilinearly upsample u0,
/// apply each bin's constrained Wiener gain spectrally, and blend the bin
/// components with the per-pixel hat weights.
ScalarField wiener_restore(const ScalarField& u0, const DegradationModel& model,
                           const ScalarField& depth_map, const SpectralProfile& profile);

/// Computes per-bin rank and cutoff tables for the model on the given grid.
void analyze_bins(SpectralProfile& profile, const DegradationModel& model,
                  const FrequencyGrid& grid);

}  // namespace distvar
