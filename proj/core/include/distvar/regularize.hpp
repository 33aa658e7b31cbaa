#pragma once

#include <vector>

#include "distvar/field.hpp"

namespace distvar {

/// Parameters of the depth-adaptive regularizer
///   R_D[u] = sum g(D,|grad u|) |grad u|^2 + mu * sum h(D) (lap u)^2
/// with g(d,s) = exp(-d/d0) psi(s; sigma(d)) + gamma(d),
///      psi(s; sigma) = s^2 / (s^2 + sigma^2),
///      gamma(d) = gamma0 + gamma1 (1 - exp(-d/d1))   (non-decreasing),
///      sigma(d) = sigma_r0 (1 + d/d_sigma),
///      h(d) = logistic((d - h_mid)/h_width) in (0,1), non-decreasing.
struct RegularizerParams {
    double lambda = 0.03;  // first-order weight, > 0
    double mu = 0.15;      // second-order weight, >= 0
    double d0 = 2.0;       // near-field decay scale, meters
    double gamma0 = 0.02;  // baseline regularization offset
    double gamma1 = 0.1;   // baseline growth amplitude
    double d1 = 10.0;      // baseline saturation scale, meters
    double sigma_r0 = 0.3;   // edge scale at d = 0
    double d_sigma = 30.0;   // edge-scale growth length, meters
    double h_mid = 20.0;     // logistic midpoint depth, meters
    double h_width = 5.0;    // logistic width, meters
};

void validate(const RegularizerParams& p);

/// gamma(d): distance-dependent baseline regularization, non-decreasing.
double gamma_baseline(const RegularizerParams& p, double d);
/// sigma(d): distance-dependent edge scale, > 0.
double sigma_edge(const RegularizerParams& p, double d);
/// h(d): second-order weight in (0,1), non-decreasing.
double h_weight(const RegularizerParams& p, double d);

/// Robust edge stop psi(s) = s^2/(s^2 + sigma^2), in [0, 1).
double psi(double s, double sigma_d);

/// First-order weight g(d, s) = exp(-d/d0) psi(s; sigma(d)) + gamma(d).
double g_weight(const RegularizerParams& p, double d, double s);

/// Discrete R_D[u] over all pixels (does not include the lambda factor).
double regularizer_value(const ScalarField& u, const ScalarField& depth_map,
                         const RegularizerParams& p);

/// Exact gradient of regularizer_value with respect to u under the discrete
/// operators, including the chain rule through psi(|grad u|):
///   dR/du = -div( Phi_s(d,|grad u|)/|grad u| * grad u ) + 2 mu lap(h lap u)
/// with Phi(d,s) = g(d,s) s^2. The quotient regularizes |grad u| as
/// sqrt(|grad u|^2 + 1e-16) to stay defined at flat pixels.
ScalarField regularizer_gradient(const ScalarField& u, const ScalarField& depth_map,
                                 const RegularizerParams& p);

/// Trapezoidal integral of max(0, -gamma'(d))^2 over the grid, from interval
/// finite differences of the provided samples.
double monotonicity_penalty_samples(const std::vector<double>& gamma_values,
                                    const std::vector<double>& depth_grid);
double monotonicity_penalty(const RegularizerParams& p, const std::vector<double>& depth_grid);

/// Trapezoidal integral of gamma''(d)^2 via interior second differences;
/// requires a uniform grid with at least 3 points.
double smoothness_penalty_samples(const std::vector<double>& gamma_values,
                                  const std::vector<double>& depth_grid);
double smoothness_penalty(const RegularizerParams& p, const std::vector<double>& depth_grid);

/// Uniform depth grid [0, d_max] with n points, the default domain for the
/// calibration penalties.
std::vector<double> uniform_depth_grid(double d_max, int n = 256);

}  // namespace distvar
