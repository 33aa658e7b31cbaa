#include "distvar/regularize.hpp"

#include <cmath>
#include <stdexcept>

namespace distvar {

void validate(const RegularizerParams& p) {
    if (p.lambda <= 0.0) throw std::invalid_argument("regularizer: lambda must be > 0");
    if (p.mu < 0.0) throw std::invalid_argument("regularizer: mu must be >= 0");
    if (p.d0 <= 0.0) throw std::invalid_argument("regularizer: d0 must be > 0");
    if (p.gamma0 < 0.0 || p.gamma1 < 0.0)
        throw std::invalid_argument("regularizer: gamma0/gamma1 must be >= 0");
    if (p.d1 <= 0.0) throw std::invalid_argument("regularizer: d1 must be > 0");
    if (p.sigma_r0 <= 0.0) throw std::invalid_argument("regularizer: sigma_r0 must be > 0");
    if (p.d_sigma <= 0.0) throw std::invalid_argument("regularizer: d_sigma must be > 0");
    if (p.h_width <= 0.0) throw std::invalid_argument("regularizer: h_width must be > 0");
}

double gamma_baseline(const RegularizerParams& p, double d) {
    return p.gamma0 + p.gamma1 * (1.0 - std::exp(-d / p.d1));
}

double sigma_edge(const RegularizerParams& p, double d) {
    return p.sigma_r0 * (1.0 + d / p.d_sigma);
}

double h_weight(const RegularizerParams& p, double d) {
    return 1.0 / (1.0 + std::exp(-(d - p.h_mid) / p.h_width));
}

double psi(double s, double sigma_d) {
    if (s < 0.0) throw std::invalid_argument("psi: gradient magnitude must be >= 0");
    if (sigma_d <= 0.0) throw std::invalid_argument("psi: scale must be > 0");
    const double s2 = s * s;
    return s2 / (s2 + sigma_d * sigma_d);
}

double g_weight(const RegularizerParams& p, double d, double s) {
    return std::exp(-d / p.d0) * psi(s, sigma_edge(p, d)) + gamma_baseline(p, d);
}

double regularizer_value(const ScalarField& u, const ScalarField& depth_map,
                         const RegularizerParams& p) {
    require_same_shape(u, depth_map, "regularizer_value");
    const VectorField g = gradient(u);
    const ScalarField lap = laplacian(u);
    double first = 0.0, second = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double s2 = g.x[i] * g.x[i] + g.y[i] * g.y[i];
        const double s = std::sqrt(s2);
        first += g_weight(p, depth_map[i], s) * s2;
        second += h_weight(p, depth_map[i]) * lap[i] * lap[i];
    }
    return first + p.mu * second;
}

ScalarField regularizer_gradient(const ScalarField& u, const ScalarField& depth_map,
                                 const RegularizerParams& p) {
    require_same_shape(u, depth_map, "regularizer_gradient");
    const VectorField g = gradient(u);

    // Diffusivity w = Phi_s(d, s) / sqrt(s^2 + eps^2) with
    // Phi_s = s [ exp(-d/d0)(psi'(s) s + 2 psi(s)) + 2 gamma(d) ].
    constexpr double eps_grad = 1e-8;
    ScalarField wx(u.width, u.height, 0.0, u.pixel_pitch);
    ScalarField wy(u.width, u.height, 0.0, u.pixel_pitch);
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double d = depth_map[i];
        const double s2 = g.x[i] * g.x[i] + g.y[i] * g.y[i];
        const double s = std::sqrt(s2);
        const double sig = sigma_edge(p, d);
        const double sig2 = sig * sig;
        const double denom = s2 + sig2;
        const double psi_v = s2 / denom;
        const double psi_prime_s = 2.0 * s2 * sig2 / (denom * denom);  // psi'(s) * s
        const double bracket =
            std::exp(-d / p.d0) * (psi_prime_s + 2.0 * psi_v) + 2.0 * gamma_baseline(p, d);
        const double w = s / std::sqrt(s2 + eps_grad * eps_grad) * bracket;
        wx[i] = w * g.x[i];
        wy[i] = w * g.y[i];
    }
    const ScalarField div_term = divergence(VectorField(wx, wy));

    ScalarField out(u.width, u.height, 0.0, u.pixel_pitch);
    if (p.mu != 0.0) {
        ScalarField h_lap = laplacian(u);
        for (std::size_t i = 0; i < u.size(); ++i) h_lap[i] *= h_weight(p, depth_map[i]);
        const ScalarField fourth = laplacian(h_lap);
        for (std::size_t i = 0; i < u.size(); ++i) out[i] = -div_term[i] + 2.0 * p.mu * fourth[i];
    } else {
        for (std::size_t i = 0; i < u.size(); ++i) out[i] = -div_term[i];
    }
    return out;
}

double monotonicity_penalty_samples(const std::vector<double>& gamma_values,
                                    const std::vector<double>& depth_grid) {
    if (depth_grid.size() < 2)
        throw std::invalid_argument("monotonicity_penalty: grid needs at least 2 points");
    if (gamma_values.size() != depth_grid.size())
        throw std::invalid_argument("monotonicity_penalty: sample/grid size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < depth_grid.size(); ++i) {
        const double dd = depth_grid[i + 1] - depth_grid[i];
        if (dd <= 0.0)
            throw std::invalid_argument("monotonicity_penalty: grid must be strictly increasing");
        const double slope = (gamma_values[i + 1] - gamma_values[i]) / dd;
        const double viol = std::max(0.0, -slope);
        acc += viol * viol * dd;
    }
    return acc;
}

double monotonicity_penalty(const RegularizerParams& p, const std::vector<double>& depth_grid) {
    std::vector<double> samples(depth_grid.size());
    for (std::size_t i = 0; i < depth_grid.size(); ++i)
        samples[i] = gamma_baseline(p, depth_grid[i]);
    return monotonicity_penalty_samples(samples, depth_grid);
}

double smoothness_penalty_samples(const std::vector<double>& gamma_values,
                                  const std::vector<double>& depth_grid) {
    const std::size_t n = depth_grid.size();
    if (n < 3) throw std::invalid_argument("smoothness_penalty: grid needs at least 3 points");
    if (gamma_values.size() != n)
        throw std::invalid_argument("smoothness_penalty: sample/grid size mismatch");
    const double h = depth_grid[1] - depth_grid[0];
    if (h <= 0.0) throw std::invalid_argument("smoothness_penalty: grid must be increasing");
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hi = depth_grid[i + 1] - depth_grid[i];
        if (std::fabs(hi - h) > 1e-9 * std::max(1.0, h))
            throw std::invalid_argument("smoothness_penalty: grid must be uniform");
    }
    double acc = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double second =
            (gamma_values[i + 1] - 2.0 * gamma_values[i] + gamma_values[i - 1]) / (h * h);
        acc += second * second * h;
    }
    return acc;
}

double smoothness_penalty(const RegularizerParams& p, const std::vector<double>& depth_grid) {
    std::vector<double> samples(depth_grid.size());
    for (std::size_t i = 0; i < depth_grid.size(); ++i)
        samples[i] = gamma_baseline(p, depth_grid[i]);
    return smoothness_penalty_samples(samples, depth_grid);
}

std::vector<double> uniform_depth_grid(double d_max, int n) {
    if (d_max <= 0.0 || n < 2)
        throw std::invalid_argument("uniform_depth_grid: need d_max > 0 and n >= 2");
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i) grid[i] = d_max * double(i) / double(n - 1);
    return grid;
}

}  // namespace distvar
