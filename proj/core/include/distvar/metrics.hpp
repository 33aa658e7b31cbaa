#pragma once

#include "distvar/field.hpp"

namespace distvar {

struct MetricReport {
    double psnr = 0.0;  // decibels; +inf sentinel for identical inputs
    double ssim = 0.0;
    double mse = 0.0;
};

double mse(const ScalarField& a, const ScalarField& b);

/// 10 log10(peak^2 / MSE); returns +inf when MSE == 0.
double psnr(const ScalarField& a, const ScalarField& b, double peak = 1.0);

/// Mean local SSIM with the reference constants: 11x11 Gaussian window with
/// sigma 1.5, K1 = 0.01, K2 = 0.03, dynamic range 1.0. The window is applied
/// in valid mode, so inputs must be at least 11x11.
double ssim(const ScalarField& a, const ScalarField& b);

/// Removes an n-pixel border before comparing (the --shave option).
ScalarField shave_border(const ScalarField& u, int n);

MetricReport compare(const ScalarField& a, const ScalarField& b, int shave = 0);

}  // namespace distvar
