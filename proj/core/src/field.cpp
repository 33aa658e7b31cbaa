#include "distvar/field.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace distvar {

ScalarField::ScalarField(int w, int h, double fill, double pitch)
    : width(w), height(h), pixel_pitch(pitch), data(std::size_t(w) * h, fill) {
    if (w <= 0 || h <= 0)
        throw std::invalid_argument("ScalarField: dimensions must be positive");
    if (pitch <= 0.0)
        throw std::invalid_argument("ScalarField: pixel_pitch must be positive");
}

bool ScalarField::all_finite() const {
    for (double v : data)
        if (!std::isfinite(v)) return false;
    return true;
}

VectorField::VectorField(const ScalarField& fx, const ScalarField& fy) : x(fx), y(fy) {
    if (!fx.same_shape(fy))
        throw std::invalid_argument("VectorField: component dimensions must match");
}

void require_same_shape(const ScalarField& a, const ScalarField& b, const char* where) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(where) + ": dimension mismatch (" +
                                    std::to_string(a.width) + "x" + std::to_string(a.height) +
                                    " vs " + std::to_string(b.width) + "x" +
                                    std::to_string(b.height) + ")");
}

VectorField gradient(const ScalarField& u) {
    ScalarField gx(u.width, u.height, 0.0, u.pixel_pitch);
    ScalarField gy(u.width, u.height, 0.0, u.pixel_pitch);
    for (int y = 0; y < u.height; ++y) {
        for (int x = 0; x < u.width; ++x) {
            if (x < u.width - 1) gx.at(x, y) = u.at(x + 1, y) - u.at(x, y);
            if (y < u.height - 1) gy.at(x, y) = u.at(x, y + 1) - u.at(x, y);
        }
    }
    return VectorField(gx, gy);
}

ScalarField divergence(const VectorField& v) {
    if (!v.x.same_shape(v.y))
        throw std::invalid_argument("divergence: component dimensions must match");
    const int w = v.width(), h = v.height();
    ScalarField out(w, h, 0.0, v.x.pixel_pitch);
    // Backward differences matched to the forward-difference gradient, so the
    // pair is an exact (negative) adjoint including the boundary rows.
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double dx;
            if (x == 0)
                dx = v.x.at(0, y);
            else if (x == w - 1)
                dx = -v.x.at(w - 2, y);
            else
                dx = v.x.at(x, y) - v.x.at(x - 1, y);
            double dy;
            if (y == 0)
                dy = v.y.at(x, 0);
            else if (y == h - 1)
                dy = -v.y.at(x, h - 2);
            else
                dy = v.y.at(x, y) - v.y.at(x, y - 1);
            out.at(x, y) = dx + dy;
        }
    }
    return out;
}

ScalarField laplacian(const ScalarField& u) { return divergence(gradient(u)); }

ScalarField magnitude(const VectorField& v) {
    ScalarField out(v.width(), v.height(), 0.0, v.x.pixel_pitch);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = std::sqrt(v.x[i] * v.x[i] + v.y[i] * v.y[i]);
    return out;
}

double inner_product(const ScalarField& a, const ScalarField& b) {
    require_same_shape(a, b, "inner_product");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double inner_product(const VectorField& a, const VectorField& b) {
    return inner_product(a.x, b.x) + inner_product(a.y, b.y);
}

double norm_l2(const ScalarField& u) { return std::sqrt(inner_product(u, u)); }

double max_abs(const ScalarField& u) {
    double m = 0.0;
    for (double v : u.data) m = std::max(m, std::fabs(v));
    return m;
}

ScalarField add(const ScalarField& a, const ScalarField& b) {
    require_same_shape(a, b, "add");
    ScalarField out = a;
    for (std::size_t i = 0; i < a.size(); ++i) out[i] += b[i];
    return out;
}

ScalarField subtract(const ScalarField& a, const ScalarField& b) {
    require_same_shape(a, b, "subtract");
    ScalarField out = a;
    for (std::size_t i = 0; i < a.size(); ++i) out[i] -= b[i];
    return out;
}

ScalarField scale(const ScalarField& a, double s) {
    ScalarField out = a;
    for (double& v : out.data) v *= s;
    return out;
}

ScalarField axpy(const ScalarField& a, double s, const ScalarField& b) {
    require_same_shape(a, b, "axpy");
    ScalarField out = a;
    for (std::size_t i = 0; i < a.size(); ++i) out[i] += s * b[i];
    return out;
}

ScalarField multiply(const ScalarField& a, const ScalarField& b) {
    require_same_shape(a, b, "multiply");
    ScalarField out = a;
    for (std::size_t i = 0; i < a.size(); ++i) out[i] *= b[i];
    return out;
}

ScalarField clamp01(const ScalarField& a) {
    ScalarField out = a;
    for (double& v : out.data) v = std::min(1.0, std::max(0.0, v));
    return out;
}

}  // namespace distvar
