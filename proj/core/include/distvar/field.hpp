#pragma once

#include <cstddef>
#include <vector>

namespace distvar {

/// 2-D grid of real samples in row-major order. pixel_pitch is the physical
/// sample spacing in meters and only matters when spectral quantities are
/// converted to physical frequencies; plain image math ignores it.
struct ScalarField {
    int width = 0;
    int height = 0;
    double pixel_pitch = 1.0;
    std::vector<double> data;

    ScalarField() = default;
    ScalarField(int w, int h, double fill = 0.0, double pitch = 1.0);

    std::size_t size() const { return data.size(); }
    double& at(int x, int y) { return data[std::size_t(y) * width + x]; }
    double at(int x, int y) const { return data[std::size_t(y) * width + x]; }
    double& operator[](std::size_t i) { return data[i]; }
    double operator[](std::size_t i) const { return data[i]; }

    bool same_shape(const ScalarField& other) const {
        return width == other.width && height == other.height;
    }
    bool all_finite() const;
};

/// Pair of ScalarFields holding the x and y components of a vector field.
struct VectorField {
    ScalarField x;
    ScalarField y;

    VectorField() = default;
    VectorField(const ScalarField& fx, const ScalarField& fy);

    int width() const { return x.width; }
    int height() const { return x.height; }
};

/// Forward differences with replicate boundary: the gradient in each
/// direction is zero on the last row/column.
VectorField gradient(const ScalarField& u);

/// Negative adjoint of gradient under the discrete inner product, so that
/// <grad u, v> = -<u, div v> holds to roundoff for all u, v.
ScalarField divergence(const VectorField& v);

/// divergence(gradient(u)); self-adjoint and negative semidefinite.
ScalarField laplacian(const ScalarField& u);

/// Per-pixel Euclidean norm of the components.
ScalarField magnitude(const VectorField& v);

double inner_product(const ScalarField& a, const ScalarField& b);
double inner_product(const VectorField& a, const VectorField& b);
double norm_l2(const ScalarField& u);
double max_abs(const ScalarField& u);

ScalarField add(const ScalarField& a, const ScalarField& b);
ScalarField subtract(const ScalarField& a, const ScalarField& b);
ScalarField scale(const ScalarField& a, double s);
/// a + s*b, the workhorse of the solver update.
ScalarField axpy(const ScalarField& a, double s, const ScalarField& b);
ScalarField multiply(const ScalarField& a, const ScalarField& b);
ScalarField clamp01(const ScalarField& a);

void require_same_shape(const ScalarField& a, const ScalarField& b, const char* where);

}  // namespace distvar
