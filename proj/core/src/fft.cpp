#include "distvar/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace distvar {

FrequencyGrid::FrequencyGrid(int w, int h, double pitch)
    : width(w), height(h), pixel_pitch(pitch) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("FrequencyGrid: dimensions must be positive");
    if (pitch <= 0.0) throw std::invalid_argument("FrequencyGrid: pixel_pitch must be positive");
}

double FrequencyGrid::freq_x(int kx) const {
    const int k = kx <= width / 2 ? kx : kx - width;
    return double(k) / (double(width) * pixel_pitch);
}

double FrequencyGrid::freq_y(int ky) const {
    const int k = ky <= height / 2 ? ky : ky - height;
    return double(k) / (double(height) * pixel_pitch);
}

double FrequencyGrid::radial(int kx, int ky) const {
    const double fx = freq_x(kx), fy = freq_y(ky);
    return std::sqrt(fx * fx + fy * fy);
}

namespace {

// FFTW planning is not thread-safe and plans are executed on shared buffers,
// so the whole transform is serialized. Transforms sit outside the solver's
// inner loop; this is not a bottleneck at the sizes this library targets.
std::mutex& fft_mutex() {
    static std::mutex m;
    return m;
}

ComplexField transform(const ComplexField& in, int sign) {
    ComplexField out(in.width, in.height);
    const std::size_t n = in.size();
    std::lock_guard<std::mutex> lock(fft_mutex());
    fftw_complex* buf_in = fftw_alloc_complex(n);
    fftw_complex* buf_out = fftw_alloc_complex(n);
    for (std::size_t i = 0; i < n; ++i) {
        buf_in[i][0] = in.data[i].real();
        buf_in[i][1] = in.data[i].imag();
    }
    // Row-major (height, width) matches the field layout.
    fftw_plan plan =
        fftw_plan_dft_2d(in.height, in.width, buf_in, buf_out, sign, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    const double scale = 1.0 / std::sqrt(double(n));
    for (std::size_t i = 0; i < n; ++i)
        out.data[i] = std::complex<double>(buf_out[i][0] * scale, buf_out[i][1] * scale);
    fftw_free(buf_in);
    fftw_free(buf_out);
    return out;
}

}  // namespace

ComplexField dft2(const ScalarField& u) {
    ComplexField c(u.width, u.height);
    for (std::size_t i = 0; i < u.size(); ++i) c.data[i] = std::complex<double>(u[i], 0.0);
    return transform(c, FFTW_FORWARD);
}

ComplexField dft2(const ComplexField& u) { return transform(u, FFTW_FORWARD); }

ComplexField idft2(const ComplexField& f) { return transform(f, FFTW_BACKWARD); }

ScalarField idft2_real(const ComplexField& f, double pixel_pitch) {
    const ComplexField c = idft2(f);
    ScalarField out(f.width, f.height, 0.0, pixel_pitch);
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = c.data[i].real();
    return out;
}

}  // namespace distvar
