#include "distvar/conv.hpp"

#include <algorithm>
#include <cmath>

#include "distvar/parallel.hpp"

namespace distvar {

double Kernel::sum() const {
    double s = 0.0;
    for (double t : taps) s += t;
    return s;
}

Kernel Kernel::rotated180() const {
    Kernel out(radius);
    for (int ty = -radius; ty <= radius; ++ty)
        for (int tx = -radius; tx <= radius; ++tx) out.tap(tx, ty) = tap(-tx, -ty);
    return out;
}

Kernel Kernel::delta(int r) {
    Kernel out(r);
    out.tap(0, 0) = 1.0;
    return out;
}

double l2_norm(const Kernel& k) {
    double s = 0.0;
    for (double t : k.taps) s += t * t;
    return std::sqrt(s);
}

double l2_distance(const Kernel& a, const Kernel& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.taps.size(); ++i) {
        const double d = a.taps[i] - b.taps[i];
        s += d * d;
    }
    return std::sqrt(s);
}

namespace {
inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }
}  // namespace

ScalarField convolve_replicate(const ScalarField& u, const Kernel& k) {
    const int w = u.width, h = u.height, r = k.radius;
    ScalarField out(w, h, 0.0, u.pixel_pitch);
    parallel_for(0, h, [&](int y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int ty = -r; ty <= r; ++ty) {
                const int sy = clampi(y - ty, 0, h - 1);
                for (int tx = -r; tx <= r; ++tx) {
                    const int sx = clampi(x - tx, 0, w - 1);
                    acc += k.tap(tx, ty) * u.at(sx, sy);
                }
            }
            out.at(x, y) = acc;
        }
    });
    return out;
}

ScalarField convolve_replicate_adjoint(const ScalarField& v, const Kernel& k) {
    const int w = v.width, h = v.height, r = k.radius;
    ScalarField out(w, h, 0.0, v.pixel_pitch);
    // Scatter form; kept sequential so accumulation order is fixed.
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double vv = v.at(x, y);
            if (vv == 0.0) continue;
            for (int ty = -r; ty <= r; ++ty) {
                const int sy = clampi(y - ty, 0, h - 1);
                for (int tx = -r; tx <= r; ++tx) {
                    const int sx = clampi(x - tx, 0, w - 1);
                    out.at(sx, sy) += k.tap(tx, ty) * vv;
                }
            }
        }
    }
    return out;
}

}  // namespace distvar
