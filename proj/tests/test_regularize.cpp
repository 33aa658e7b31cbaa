#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "distvar/regularize.hpp"
#include "distvar/rng.hpp"
#include "oracles.hpp"

using namespace distvar;

namespace {

RegularizerParams test_params() {
    RegularizerParams p;
    p.lambda = 0.05;
    p.mu = 0.01;
    p.d0 = 10.0;
    p.gamma0 = 0.1;
    p.gamma1 = 0.3;
    p.d1 = 20.0;
    p.sigma_r0 = 0.2;
    p.d_sigma = 30.0;
    p.h_mid = 25.0;
    p.h_width = 8.0;
    return p;
}

}  // namespace

TEST_CASE("psi fixed points") {
    CHECK(psi(0.0, 0.5) == 0.0);
    CHECK(psi(0.5, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(psi(1.5, 0.5) == doctest::Approx(0.9).epsilon(1e-15));  // 9/(9+1)
    for (double s : {0.0, 0.1, 1.0, 100.0, 1e6}) {
        CHECK(psi(s, 0.3) >= 0.0);
        CHECK(psi(s, 0.3) < 1.0);
    }
    CHECK_THROWS_AS(psi(-1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(psi(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("g weight arithmetic") {
    RegularizerParams p = test_params();
    p.gamma0 = 0.1;

    SUBCASE("near-field edge at the psi midpoint") {
        const double s = sigma_edge(p, 0.0);
        CHECK(g_weight(p, 0.0, s) == doctest::Approx(0.6).epsilon(1e-12));
    }
    SUBCASE("flat gradient leaves only the baseline") {
        for (double d : {0.0, 5.0, 37.0})
            CHECK(g_weight(p, d, 0.0) == doctest::Approx(gamma_baseline(p, d)).epsilon(1e-15));
    }
    SUBCASE("far field saturates at gamma0 + gamma1") {
        const double d = 50.0 * std::max(p.d0, p.d1);
        CHECK(g_weight(p, d, 1.0) == doctest::Approx(p.gamma0 + p.gamma1).epsilon(1e-6));
    }
}

TEST_CASE("gamma and h stay monotone on a dense grid") {
    const RegularizerParams p = test_params();
    double prev_g = gamma_baseline(p, 0.0);
    double prev_h = h_weight(p, 0.0);
    for (int i = 1; i < 1000; ++i) {
        const double d = 100.0 * double(i) / 999.0;
        const double g = gamma_baseline(p, d);
        const double h = h_weight(p, d);
        CHECK(g >= prev_g);
        CHECK(h >= prev_h);
        CHECK(h > 0.0);
        CHECK(h < 1.0);
        prev_g = g;
        prev_h = h;
    }
}

TEST_CASE("regularizer value") {
    const RegularizerParams p = test_params();

    SUBCASE("constant field has zero energy") {
        CHECK(regularizer_value(ScalarField(6, 6, 0.8), ScalarField(6, 6, 10.0), p) == 0.0);
    }
    SUBCASE("non-constant fields have strictly positive energy") {
        Rng rng(49);
        for (int trial = 0; trial < 10; ++trial) {
            const ScalarField u = oracle::random_field(rng, 6, 6);
            CHECK(regularizer_value(u, ScalarField(6, 6, 10.0), p) > 0.0);
        }
    }
    SUBCASE("degenerates to the Dirichlet energy") {
        RegularizerParams q = test_params();
        q.mu = 0.0;
        q.gamma0 = 1.0;
        q.gamma1 = 0.0;
        q.d0 = 1e-9;      // exp(-d/d0) underflows to zero: psi term gone
        q.sigma_r0 = 1e6;
        Rng rng(50);
        const ScalarField u = oracle::random_field(rng, 6, 6);
        const VectorField g = gradient(u);
        double dirichlet = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i)
            dirichlet += g.x[i] * g.x[i] + g.y[i] * g.y[i];
        CHECK(regularizer_value(u, ScalarField(6, 6, 10.0), q) ==
              doctest::Approx(dirichlet).epsilon(1e-12));
    }
    SUBCASE("matches an independent double-loop evaluation") {
        Rng rng(51);
        const ScalarField u = oracle::random_field(rng, 6, 6);
        ScalarField depth(6, 6);
        for (double& v : depth.data) v = rng.uniform(1.0, 50.0);

        // Index-by-index oracle with its own forward differences and its own
        // five-point composition for the Laplacian.
        auto gx = [&](int x, int y) { return x < 5 ? u.at(x + 1, y) - u.at(x, y) : 0.0; };
        auto gy = [&](int x, int y) { return y < 5 ? u.at(x, y + 1) - u.at(x, y) : 0.0; };
        auto div_at = [&](int x, int y) {
            const double vx = x == 0 ? gx(0, y) : (x == 5 ? -gx(4, y) : gx(x, y) - gx(x - 1, y));
            const double vy = y == 0 ? gy(x, 0) : (y == 5 ? -gy(x, 4) : gy(x, y) - gy(x, y - 1));
            return vx + vy;
        };
        double expected = 0.0;
        for (int y = 0; y < 6; ++y)
            for (int x = 0; x < 6; ++x) {
                const double s2 = gx(x, y) * gx(x, y) + gy(x, y) * gy(x, y);
                const double d = depth.at(x, y);
                expected += g_weight(p, d, std::sqrt(s2)) * s2;
                expected += p.mu * h_weight(p, d) * div_at(x, y) * div_at(x, y);
            }
        CHECK(regularizer_value(u, depth, p) == doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("quadratic scaling for constant g, mu = 0") {
        RegularizerParams q = test_params();
        q.mu = 0.0;
        q.gamma0 = 0.7;
        q.gamma1 = 0.0;
        q.d0 = 1e-9;
        q.sigma_r0 = 1e6;
        Rng rng(52);
        const ScalarField u = oracle::random_field(rng, 5, 5);
        const ScalarField depth(5, 5, 10.0);
        const double base = regularizer_value(u, depth, q);
        const double scaled = regularizer_value(scale(u, 3.0), depth, q);
        CHECK(scaled == doctest::Approx(9.0 * base).epsilon(1e-12));
    }
    SUBCASE("dimension mismatch rejected") {
        CHECK_THROWS_AS(regularizer_value(ScalarField(4, 4), ScalarField(5, 4), p),
                        std::invalid_argument);
    }
}

TEST_CASE("regularizer gradient") {
    const RegularizerParams p = test_params();

    SUBCASE("constant field is a stationary point") {
        CHECK(max_abs(regularizer_gradient(ScalarField(6, 6, 0.3), ScalarField(6, 6, 9.0), p)) ==
              0.0);
    }
    SUBCASE("matches central finite differences of the value") {
        Rng rng(53);
        const ScalarField u = oracle::random_field(rng, 5, 5);
        ScalarField depth(5, 5);
        for (double& v : depth.data) v = rng.uniform(1.0, 50.0);
        const ScalarField grad = regularizer_gradient(u, depth, p);
        auto value = [&](const ScalarField& w) { return regularizer_value(w, depth, p); };
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double fd = oracle::central_difference(value, u, i, 1e-6);
            CHECK(grad[i] == doctest::Approx(fd).epsilon(1e-5));
        }
    }
    SUBCASE("mu-only case equals the composed field operators") {
        RegularizerParams q = test_params();
        q.gamma0 = 0.0;
        q.gamma1 = 0.0;
        q.d0 = 1e-9;      // kills the psi term entirely
        q.sigma_r0 = 1e6;
        q.mu = 0.03;
        Rng rng(54);
        const ScalarField u = oracle::random_field(rng, 6, 6);
        ScalarField depth(6, 6);
        for (double& v : depth.data) v = rng.uniform(1.0, 50.0);

        ScalarField h_lap = laplacian(u);
        for (std::size_t i = 0; i < u.size(); ++i) h_lap[i] *= h_weight(q, depth[i]);
        const ScalarField expected = scale(laplacian(h_lap), 2.0 * q.mu);
        CHECK(max_abs(subtract(regularizer_gradient(u, depth, q), expected)) <= 1e-12);
    }
}

TEST_CASE("monotonicity penalty") {
    const std::vector<double> grid = {0.0, 1.0, 2.0};
    SUBCASE("gamma built from params is monotone, penalty zero") {
        CHECK(monotonicity_penalty(test_params(), uniform_depth_grid(60.0)) == 0.0);
    }
    SUBCASE("hand trapezoid for gamma(d) = -d") {
        CHECK(monotonicity_penalty_samples({0.0, -1.0, -2.0}, grid) ==
              doctest::Approx(2.0).epsilon(1e-15));
    }
    SUBCASE("constant gamma has zero penalty") {
        CHECK(monotonicity_penalty_samples({0.4, 0.4, 0.4}, grid) == 0.0);
    }
    SUBCASE("grid too short rejected") {
        CHECK_THROWS_AS(monotonicity_penalty_samples({1.0}, {0.0}), std::invalid_argument);
    }
}

TEST_CASE("smoothness penalty") {
    const std::vector<double> grid = {0.0, 1.0, 2.0};
    SUBCASE("linear gamma has zero curvature") {
        CHECK(smoothness_penalty_samples({0.0, 0.5, 1.0}, grid) == 0.0);
    }
    SUBCASE("hand computation for samples {0,0,1}") {
        CHECK(smoothness_penalty_samples({0.0, 0.0, 1.0}, grid) ==
              doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("constant gamma has zero penalty") {
        CHECK(smoothness_penalty_samples({0.4, 0.4, 0.4}, grid) == 0.0);
    }
    SUBCASE("non-uniform grid rejected") {
        CHECK_THROWS_AS(smoothness_penalty_samples({0.0, 0.0, 1.0}, {0.0, 1.0, 3.0}),
                        std::invalid_argument);
        CHECK_THROWS_AS(smoothness_penalty_samples({0.0, 1.0}, {0.0, 1.0}),
                        std::invalid_argument);
    }
}
