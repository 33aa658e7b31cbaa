#pragma once

#include <cstdint>
#include <vector>

#include "distvar/binning.hpp"
#include "distvar/conv.hpp"
#include "distvar/field.hpp"

namespace distvar {

/// Physical parameters of the degradation: a Gaussian optical-transfer
/// baseline with aperture scale r0 and a homogeneous scattering atmosphere
/// (constant refractive index and particle density along the path).
struct AtmosphereParams {
    double r0 = 4.0;                // aperture scale, meters
    double beta0 = 0.15;            // scattering strength, per meter
    double wavelength = 1.0;        // meters
    double refractive_index = 1.5;  // dimensionless, > 1
    double particle_density = 1.0;  // per cubic meter
    double noise_sigma = 0.0075;    // additive noise stddev, sample units
    std::uint64_t rng_seed = 1234;
};

void validate(const AtmosphereParams& atm);

/// Baseline sensor response: Gaussian OTF magnitude exp(-(|xi| r0)^2 / 2).
double sigma0_magnitude(const AtmosphereParams& atm, double xi_mag);

/// Scattering attenuation per meter at spatial frequency |xi| (cycles/meter):
/// beta0 * (8 pi^3 / 3) * (|xi|^4 / lambda^4) * ((n^2-1)/(n^2+2))^2 * N.
/// Vanishes at xi = 0, so DC is never attenuated.
double attenuation_coefficient(const AtmosphereParams& atm, double xi_mag);

/// Symbol magnitude sigma0(|xi|) * exp(-beta(|xi|) * d): the frequency
/// response of the degradation for a scene point at depth d.
double symbol_magnitude(double xi_mag, double depth, const AtmosphereParams& atm);

/// Discretized degradation operator: a depth-binned PSF bank followed by
/// block-average downsampling. Each pixel blends the two PSFs bracketing its
/// depth with hat weights, which keeps the operator linear and exactly
/// adjointable.
struct DegradationModel {
    AtmosphereParams atmosphere;
    std::vector<double> depth_bins;  // bin-center depths, strictly increasing
    std::vector<Kernel> psf_bank;    // one PSF per bin, unit DC gain
    int scale = 2;
    int kernel_radius = 0;

    int num_bins() const { return int(depth_bins.size()); }
};

void validate(const DegradationModel& model);

/// Builds the depth-binned model for a given depth map. Bin centers span
/// [min depth, max depth] uniformly; each PSF is the inverse transform of the
/// radially sampled symbol at its bin depth, truncated to the smallest radius
/// holding >= 99.9% of its mass (capped at 15, or at requested_radius when
/// positive) and renormalized to unit DC gain.
DegradationModel build_model(const AtmosphereParams& atm, const ScalarField& depth_map,
                             int num_bins, int scale, int requested_radius = 0);

/// K_D u: downsample( sum_b m_b .* (k_b * u) ) with hat weights m_b taken
/// from the depth map. Noise is not added here; see add_noise.
ScalarField apply(const DegradationModel& model, const ScalarField& u,
                  const ScalarField& depth_map);

/// Exact adjoint K_D*: <apply(u), v> == <u, apply_adjoint(v)> to roundoff.
ScalarField apply_adjoint(const DegradationModel& model, const ScalarField& v,
                          const ScalarField& depth_map);

/// Adds i.i.d. Gaussian noise, deterministic for a fixed seed. Samples are
/// not clipped so the degradation stays affine.
ScalarField add_noise(const ScalarField& u, double noise_sigma, std::uint64_t rng_seed);

}  // namespace distvar
