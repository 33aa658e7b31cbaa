#pragma once

#include <complex>
#include <vector>

#include "distvar/field.hpp"

namespace distvar {

/// 2-D grid of complex samples in row-major order, standard DFT bin layout.
struct ComplexField {
    int width = 0;
    int height = 0;
    std::vector<std::complex<double>> data;

    ComplexField() = default;
    ComplexField(int w, int h)
        : width(w), height(h), data(std::size_t(w) * h, std::complex<double>(0.0, 0.0)) {}

    std::complex<double>& at(int x, int y) { return data[std::size_t(y) * width + x]; }
    std::complex<double> at(int x, int y) const { return data[std::size_t(y) * width + x]; }
    std::size_t size() const { return data.size(); }
};

/// Radial frequency lookup for a DFT grid. Bin (0,0) is DC; negative
/// frequencies occupy the upper halves per standard DFT ordering. Values are
/// in cycles per meter, derived from pixel_pitch.
struct FrequencyGrid {
    int width = 0;
    int height = 0;
    double pixel_pitch = 1.0;

    FrequencyGrid() = default;
    FrequencyGrid(int w, int h, double pitch);

    /// Signed frequency of column bin kx (cycles/meter).
    double freq_x(int kx) const;
    /// Signed frequency of row bin ky (cycles/meter).
    double freq_y(int ky) const;
    /// Radial frequency magnitude |xi| at bin (kx, ky).
    double radial(int kx, int ky) const;
};

/// Unitary DFT pair (1/sqrt(N) scaling both ways), so Parseval's identity
/// holds: ||dft2(u)||_2 == ||u||_2 and idft2(dft2(u)) == u to roundoff.
ComplexField dft2(const ScalarField& u);
ComplexField dft2(const ComplexField& u);
ComplexField idft2(const ComplexField& f);

/// Inverse transform returning the real part; callers ensure the spectrum is
/// conjugate-symmetric (true for everything this library produces).
ScalarField idft2_real(const ComplexField& f, double pixel_pitch = 1.0);

}  // namespace distvar
