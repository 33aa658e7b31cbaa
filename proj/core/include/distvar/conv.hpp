#pragma once

#include <vector>

#include "distvar/field.hpp"

namespace distvar {

/// Small odd-sized convolution kernel with taps on [-radius, radius]^2,
/// stored row-major. Used both for PSFs and for the regularization bank.
struct Kernel {
    int radius = 0;
    std::vector<double> taps;

    Kernel() : taps(1, 0.0) {}
    explicit Kernel(int r, double fill = 0.0)
        : radius(r), taps(std::size_t(2 * r + 1) * (2 * r + 1), fill) {}

    int size() const { return 2 * radius + 1; }
    double& tap(int tx, int ty) {
        return taps[std::size_t(ty + radius) * size() + (tx + radius)];
    }
    double tap(int tx, int ty) const {
        return taps[std::size_t(ty + radius) * size() + (tx + radius)];
    }
    double sum() const;
    Kernel rotated180() const;

    static Kernel delta(int r = 0);
};

double l2_norm(const Kernel& k);
double l2_distance(const Kernel& a, const Kernel& b);

/// out(x) = sum_t k(t) * u(clamp(x - t)); replicate (Neumann) boundary.
ScalarField convolve_replicate(const ScalarField& u, const Kernel& k);

/// Exact adjoint of convolve_replicate: scatters v(x)*k(t) back into
/// clamp(x - t). In the interior this equals convolution with the
/// 180-degree-rotated kernel; at the boundary the clamped taps fold back.
ScalarField convolve_replicate_adjoint(const ScalarField& v, const Kernel& k);

}  // namespace distvar
