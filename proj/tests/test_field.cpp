#include <doctest.h>

#include <cmath>
#include <complex>

#include "distvar/conv.hpp"
#include "distvar/fft.hpp"
#include "distvar/field.hpp"
#include "distvar/resample.hpp"
#include "distvar/rng.hpp"
#include "oracles.hpp"

using namespace distvar;

TEST_CASE("gradient of a constant field is zero") {
    const ScalarField u(7, 5, 3.25);
    const VectorField g = gradient(u);
    CHECK(max_abs(g.x) == 0.0);
    CHECK(max_abs(g.y) == 0.0);
}

TEST_CASE("gradient of a linear ramp") {
    ScalarField u(6, 4);
    for (int y = 0; y < u.height; ++y)
        for (int x = 0; x < u.width; ++x) u.at(x, y) = double(x);
    const VectorField g = gradient(u);
    for (int y = 0; y < u.height; ++y)
        for (int x = 0; x < u.width; ++x) {
            CHECK(g.x.at(x, y) == (x < u.width - 1 ? 1.0 : 0.0));
            CHECK(g.y.at(x, y) == 0.0);
        }
}

TEST_CASE("gradient matches the index-by-index difference oracle") {
    Rng rng(42);
    const ScalarField u = oracle::random_field(rng, 5, 5);
    const VectorField g = gradient(u);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 5; ++x) {
            const double gx = x < 4 ? u.at(x + 1, y) - u.at(x, y) : 0.0;
            const double gy = y < 4 ? u.at(x, y + 1) - u.at(x, y) : 0.0;
            CHECK(g.x.at(x, y) == gx);
            CHECK(g.y.at(x, y) == gy);
        }
}

TEST_CASE("divergence is the exact negative adjoint of gradient") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const ScalarField u = oracle::random_field(rng, 6, 7);
        const VectorField v(oracle::random_field(rng, 6, 7), oracle::random_field(rng, 6, 7));
        const double lhs = inner_product(gradient(u), v);
        const double rhs = inner_product(u, divergence(v));
        CHECK(std::fabs(lhs + rhs) <= 1e-10 * norm_l2(u) *
                                          std::sqrt(inner_product(v, v)));
    }
}

TEST_CASE("divergence of a constant vector field vanishes in the interior") {
    ScalarField ramp(6, 6);
    for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 6; ++x) ramp.at(x, y) = double(x);
    const ScalarField div = divergence(gradient(ramp));
    for (int y = 1; y < 5; ++y)
        for (int x = 1; x < 5; ++x) CHECK(div.at(x, y) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("divergence rejects mismatched components") {
    VectorField v;
    v.x = ScalarField(4, 4);
    v.y = ScalarField(5, 4);
    CHECK_THROWS_AS(divergence(v), std::invalid_argument);
}

TEST_CASE("laplacian of a constant field is zero and is self-adjoint") {
    CHECK(max_abs(laplacian(ScalarField(5, 5, 2.0))) == 0.0);

    Rng rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const ScalarField u = oracle::random_field(rng, 6, 5);
        const ScalarField v = oracle::random_field(rng, 6, 5);
        const double a = inner_product(laplacian(u), v);
        const double b = inner_product(u, laplacian(v));
        CHECK(a == doctest::Approx(b).epsilon(1e-10));
        CHECK(inner_product(laplacian(u), u) <= 1e-12);
    }
}

TEST_CASE("laplacian of an interior impulse is the 5-point stencil") {
    ScalarField u(5, 5, 0.0);
    u.at(2, 2) = 1.0;
    const ScalarField lap = laplacian(u);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 5; ++x) {
            double expected = 0.0;
            if (x == 2 && y == 2) expected = -4.0;
            if ((std::abs(x - 2) == 1 && y == 2) || (std::abs(y - 2) == 1 && x == 2))
                expected = 1.0;
            CHECK(lap.at(x, y) == doctest::Approx(expected).epsilon(1e-14));
        }
}

TEST_CASE("dft2/idft2 round trip and DC placement") {
    Rng rng(5);
    const ScalarField u = oracle::random_field(rng, 16, 16);
    const ScalarField back = idft2_real(dft2(u), u.pixel_pitch);
    double max_err = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        max_err = std::max(max_err, std::fabs(back[i] - u[i]));
    CHECK(max_err <= 1e-12 * max_abs(u));

    const ComplexField f = dft2(ScalarField(8, 8, 0.5));
    CHECK(std::abs(f.at(0, 0)) == doctest::Approx(0.5 * 8.0).epsilon(1e-12));
    for (int ky = 0; ky < 8; ++ky)
        for (int kx = 0; kx < 8; ++kx)
            if (kx != 0 || ky != 0) CHECK(std::abs(f.at(kx, ky)) <= 1e-12);
}

TEST_CASE("Parseval's identity under the unitary pair") {
    Rng rng(6);
    const ScalarField u = oracle::random_field(rng, 12, 10);
    double space = 0.0;
    for (double v : u.data) space += v * v;  // direct sum oracle
    const ComplexField f = dft2(u);
    double freq = 0.0;
    for (const std::complex<double>& c : f.data) freq += std::norm(c);
    CHECK(freq == doctest::Approx(space).epsilon(1e-10));
}

TEST_CASE("frequency grid ordering") {
    const FrequencyGrid grid(8, 6, 0.5);
    CHECK(grid.radial(0, 0) == 0.0);
    CHECK(grid.freq_x(1) == doctest::Approx(1.0 / (8 * 0.5)));
    CHECK(grid.freq_x(7) == doctest::Approx(-1.0 / (8 * 0.5)));  // negative side
    CHECK(grid.freq_y(5) == doctest::Approx(-1.0 / (6 * 0.5)));
}

TEST_CASE("downsample block average and divisibility error") {
    ScalarField u(2, 2);
    u.at(0, 0) = 0.0;
    u.at(1, 0) = 2.0;
    u.at(0, 1) = 4.0;
    u.at(1, 1) = 6.0;
    const ScalarField d = downsample(u, 2);
    CHECK(d.width == 1);
    CHECK(d[0] == 3.0);

    CHECK(max_abs(subtract(downsample(ScalarField(8, 8, 0.7), 4), ScalarField(2, 2, 0.7))) <=
          1e-15);

    CHECK_THROWS_WITH_AS(downsample(ScalarField(6, 6), 4),
                         doctest::Contains("divisible"), std::invalid_argument);
}

TEST_CASE("downsample/upsample_adjoint is an exact adjoint pair (dense oracle)") {
    Rng rng(9);
    const int s = 2;
    const oracle::DenseMatrix m = oracle::materialize(
        8, 8, 16, [&](const ScalarField& e) { return downsample(e, s); });
    const ScalarField u = oracle::random_field(rng, 8, 8);
    const ScalarField v = oracle::random_field(rng, 4, 4);

    const std::vector<double> du = m.mul(u.data);
    const ScalarField lib_down = downsample(u, s);
    for (int i = 0; i < 16; ++i) CHECK(lib_down[i] == doctest::Approx(du[i]).epsilon(1e-12));

    const std::vector<double> utv = m.mul_transpose(v.data);
    const ScalarField lib_up = upsample_adjoint(v, s);
    for (int i = 0; i < 64; ++i) CHECK(lib_up[i] == doctest::Approx(utv[i]).epsilon(1e-12));

    CHECK(inner_product(downsample(u, s), v) ==
          doctest::Approx(inner_product(u, upsample_adjoint(v, s))).epsilon(1e-12));
}

TEST_CASE("downsample keeps constants; upsample_adjoint preserves total mass") {
    const ScalarField c(8, 8, 0.42);
    CHECK(max_abs(subtract(downsample(c, 2), ScalarField(4, 4, 0.42))) <= 1e-15);

    Rng rng(10);
    const ScalarField v = oracle::random_field(rng, 4, 4);
    const ScalarField up = upsample_adjoint(v, 2);
    double mass_v = 0.0, mass_up = 0.0;
    for (double x : v.data) mass_v += x;
    for (double x : up.data) mass_up += x;
    CHECK(mass_up == doctest::Approx(mass_v).epsilon(1e-12));
}

TEST_CASE("upsample_bilinear keeps constants and stays in range") {
    const ScalarField up = upsample_bilinear(ScalarField(4, 4, 0.37), 2);
    CHECK(up.width == 8);
    CHECK(max_abs(subtract(up, ScalarField(8, 8, 0.37))) <= 1e-15);

    Rng rng(12);
    const ScalarField v = oracle::random_field(rng, 5, 5, 0.0, 1.0);
    const ScalarField b = upsample_bilinear(v, 4);
    for (double x : b.data) {
        CHECK(x >= 0.0);
        CHECK(x <= 1.0);
    }
}

TEST_CASE("replicate convolution matches the clamped-index loop and its adjoint is exact") {
    Rng rng(13);
    Kernel k(2);
    for (double& t : k.taps) t = rng.uniform(-0.5, 0.5);

    const ScalarField u = oracle::random_field(rng, 7, 6);
    const ScalarField out = convolve_replicate(u, k);
    for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 7; ++x) {
            double acc = 0.0;
            for (int ty = -2; ty <= 2; ++ty)
                for (int tx = -2; tx <= 2; ++tx) {
                    const int sx = std::min(6, std::max(0, x - tx));
                    const int sy = std::min(5, std::max(0, y - ty));
                    acc += k.tap(tx, ty) * u.at(sx, sy);
                }
            CHECK(out.at(x, y) == doctest::Approx(acc).epsilon(1e-13));
        }

    const ScalarField v = oracle::random_field(rng, 7, 6);
    CHECK(inner_product(convolve_replicate(u, k), v) ==
          doctest::Approx(inner_product(u, convolve_replicate_adjoint(v, k))).epsilon(1e-12));
}
