#include "distvar/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace distvar {

double mse(const ScalarField& a, const ScalarField& b) {
    require_same_shape(a, b, "mse");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc / double(a.size());
}

double psnr(const ScalarField& a, const ScalarField& b, double peak) {
    if (peak <= 0.0) throw std::invalid_argument("psnr: peak must be > 0");
    const double m = mse(a, b);
    if (m == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / m);
}

namespace {

constexpr int kWindow = 11;
constexpr double kWindowSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;  // (K1 * L)^2, L = 1
constexpr double kC2 = 0.03 * 0.03;  // (K2 * L)^2

const std::vector<double>& gaussian_window() {
    static const std::vector<double> w = [] {
        std::vector<double> win(kWindow * kWindow);
        const int r = kWindow / 2;
        double total = 0.0;
        for (int y = -r; y <= r; ++y)
            for (int x = -r; x <= r; ++x) {
                const double v = std::exp(-(x * x + y * y) / (2.0 * kWindowSigma * kWindowSigma));
                win[(y + r) * kWindow + (x + r)] = v;
                total += v;
            }
        for (double& v : win) v /= total;
        return win;
    }();
    return w;
}

}  // namespace

double ssim(const ScalarField& a, const ScalarField& b) {
    require_same_shape(a, b, "ssim");
    if (a.width < kWindow || a.height < kWindow)
        throw std::invalid_argument("ssim: inputs must be at least 11x11");
    const std::vector<double>& win = gaussian_window();
    const int r = kWindow / 2;
    double acc = 0.0;
    int count = 0;
    for (int y = r; y < a.height - r; ++y) {
        for (int x = r; x < a.width - r; ++x) {
            double mu_a = 0.0, mu_b = 0.0, aa = 0.0, bb = 0.0, ab = 0.0;
            for (int wy = -r; wy <= r; ++wy) {
                for (int wx = -r; wx <= r; ++wx) {
                    const double wgt = win[(wy + r) * kWindow + (wx + r)];
                    const double va = a.at(x + wx, y + wy);
                    const double vb = b.at(x + wx, y + wy);
                    mu_a += wgt * va;
                    mu_b += wgt * vb;
                    aa += wgt * va * va;
                    bb += wgt * vb * vb;
                    ab += wgt * va * vb;
                }
            }
            const double var_a = aa - mu_a * mu_a;
            const double var_b = bb - mu_b * mu_b;
            const double cov = ab - mu_a * mu_b;
            const double num = (2.0 * mu_a * mu_b + kC1) * (2.0 * cov + kC2);
            const double den = (mu_a * mu_a + mu_b * mu_b + kC1) * (var_a + var_b + kC2);
            acc += num / den;
            ++count;
        }
    }
    return acc / double(count);
}

ScalarField shave_border(const ScalarField& u, int n) {
    if (n < 0) throw std::invalid_argument("shave_border: n must be >= 0");
    if (n == 0) return u;
    if (u.width <= 2 * n || u.height <= 2 * n)
        throw std::invalid_argument("shave_border: border exceeds image size");
    ScalarField out(u.width - 2 * n, u.height - 2 * n, 0.0, u.pixel_pitch);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x) out.at(x, y) = u.at(x + n, y + n);
    return out;
}

MetricReport compare(const ScalarField& a, const ScalarField& b, int shave) {
    const ScalarField sa = shave_border(a, shave);
    const ScalarField sb = shave_border(b, shave);
    MetricReport report;
    report.mse = mse(sa, sb);
    report.psnr = psnr(sa, sb);
    report.ssim = ssim(sa, sb);
    return report;
}

}  // namespace distvar
