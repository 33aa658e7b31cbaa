#include "distvar/resample.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace distvar {

bool valid_scale(int s) { return s == 1 || s == 2 || s == 4 || s == 8; }

namespace {
void check_scale(const ScalarField& u, int s, const char* where) {
    if (!valid_scale(s))
        throw std::invalid_argument(std::string(where) + ": scale must be one of {1,2,4,8}, got " +
                                    std::to_string(s));
    if (u.width % s != 0 || u.height % s != 0)
        throw std::invalid_argument(std::string(where) + ": dimensions " +
                                    std::to_string(u.width) + "x" + std::to_string(u.height) +
                                    " must be divisible by scale " + std::to_string(s));
}
}  // namespace

ScalarField downsample(const ScalarField& u, int s) {
    check_scale(u, s, "downsample");
    if (s == 1) return u;
    const int w = u.width / s, h = u.height / s;
    ScalarField out(w, h, 0.0, u.pixel_pitch * s);
    const double inv = 1.0 / (double(s) * s);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int dy = 0; dy < s; ++dy)
                for (int dx = 0; dx < s; ++dx) acc += u.at(x * s + dx, y * s + dy);
            out.at(x, y) = acc * inv;
        }
    }
    return out;
}

ScalarField upsample_adjoint(const ScalarField& v, int s) {
    if (!valid_scale(s))
        throw std::invalid_argument("upsample_adjoint: scale must be one of {1,2,4,8}, got " +
                                    std::to_string(s));
    if (s == 1) return v;
    const int w = v.width * s, h = v.height * s;
    ScalarField out(w, h, 0.0, v.pixel_pitch / s);
    const double inv = 1.0 / (double(s) * s);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out.at(x, y) = v.at(x / s, y / s) * inv;
    return out;
}

ScalarField upsample_bilinear(const ScalarField& v, int s) {
    if (!valid_scale(s))
        throw std::invalid_argument("upsample_bilinear: scale must be one of {1,2,4,8}, got " +
                                    std::to_string(s));
    if (s == 1) return v;
    const int w = v.width * s, h = v.height * s;
    ScalarField out(w, h, 0.0, v.pixel_pitch / s);
    for (int y = 0; y < h; ++y) {
        const double sy = (y + 0.5) / s - 0.5;
        const int y0 = std::clamp(int(std::floor(sy)), 0, v.height - 1);
        const int y1 = std::min(y0 + 1, v.height - 1);
        const double fy = std::clamp(sy - std::floor(sy), 0.0, 1.0);
        const double wy = sy < 0.0 ? 0.0 : (sy > v.height - 1 ? 1.0 : fy);
        for (int x = 0; x < w; ++x) {
            const double sx = (x + 0.5) / s - 0.5;
            const int x0 = std::clamp(int(std::floor(sx)), 0, v.width - 1);
            const int x1 = std::min(x0 + 1, v.width - 1);
            const double fx = std::clamp(sx - std::floor(sx), 0.0, 1.0);
            const double wx = sx < 0.0 ? 0.0 : (sx > v.width - 1 ? 1.0 : fx);
            const double top = v.at(x0, y0) * (1.0 - wx) + v.at(x1, y0) * wx;
            const double bot = v.at(x0, y1) * (1.0 - wx) + v.at(x1, y1) * wx;
            out.at(x, y) = top * (1.0 - wy) + bot * wy;
        }
    }
    return out;
}

}  // namespace distvar
