#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "stefan/green.hpp"
#include "stefan/noise.hpp"
#include "stefan/obstacle.hpp"
#include "stefan/picard.hpp"
#include "stefan/spde.hpp"

using namespace stefan;

namespace {

FieldPath path_from(const GridSpec& grid, double (*f)(double, double)) {
    FieldPath u(grid.ny, grid.nt);
    for (int k = 0; k <= grid.nt; ++k) {
        auto row = u.row(k);
        for (int i = 1; i <= grid.ny; ++i) row[i - 1] = f(i * grid.dy, k * grid.dt);
    }
    return u;
}

}  // namespace

TEST_CASE("obstacle stays inactive while u is non-negative") {
    const GridSpec grid = GridSpec::make(32, 50, 1.0, 0.5);
    const FieldPath u = path_from(grid, [](double y, double t) {
        return -std::sin(M_PI * y) * std::min(t, 1.0) * 0.5 + 0.6 * std::sin(M_PI * y);
    });
    const ObstacleSolution sol = solve_obstacle(u, 1.0, grid);
    for (double v : sol.obstacle.data) CHECK(v == 0.0);
    for (double e : sol.eta_rate) CHECK(e == 0.0);
}

TEST_CASE("negative initial data violates the precondition") {
    const GridSpec grid = GridSpec::make(16, 4, 1.0, 0.1);
    const FieldPath u = path_from(grid, [](double y, double) { return -std::sin(M_PI * y); });
    CHECK_THROWS_AS(solve_obstacle(u, 1.0, grid), std::invalid_argument);
}

TEST_CASE("sign-changing obstacle activates the constraint") {
    const GridSpec grid = GridSpec::make(63, 300, 1.0, 0.3);
    const FieldPath u =
        path_from(grid, [](double y, double t) { return (0.1 - t) * std::sin(M_PI * y); });
    const ObstacleSolution sol = solve_obstacle(u, 1.0, grid);

    // once u turns negative the solution must sit on the obstacle somewhere
    double max_obstacle = 0.0, max_eta = 0.0;
    for (double v : sol.obstacle.data) max_obstacle = std::max(max_obstacle, v);
    for (double e : sol.eta_rate) max_eta = std::max(max_eta, e);
    CHECK(max_obstacle > 0.0);
    CHECK(max_eta > 0.0);

    // invariants: zero initial data, v = u + O non-negative, exact cell-wise
    // complementarity
    for (double v : sol.obstacle.row(0)) CHECK(v == 0.0);
    double dot = 0.0;
    for (int k = 1; k <= grid.nt; ++k) {
        auto uk = u.row(k);
        auto ok = sol.obstacle.row(k);
        const double* eta = &sol.eta_rate[static_cast<std::size_t>(k - 1) * grid.ny];
        for (int i = 0; i < grid.ny; ++i) {
            CHECK(uk[i] + ok[i] >= 0.0);
            dot += (uk[i] + ok[i]) * eta[i] * grid.dy * grid.dt;
        }
    }
    CHECK(std::abs(dot) < 1e-10);

    // projected explicit scheme on a 16x finer time step as the oracle
    const int refine = 16;
    const GridSpec fine = GridSpec::make(grid.ny, grid.nt * refine, 1.0, 0.3);
    REQUIRE(fine.dt <= fine.dy * fine.dy / 2.0);  // explicit stability
    const FieldPath u_fine =
        path_from(fine, [](double y, double t) { return (0.1 - t) * std::sin(M_PI * y); });
    std::vector<double> O(grid.ny, 0.0), next(grid.ny);
    const double r = fine.dt / (fine.dy * fine.dy);
    double gap = 0.0;
    for (int k = 1; k <= fine.nt; ++k) {
        auto uk = u_fine.row(k);
        for (int i = 0; i < grid.ny; ++i) {
            const double left = i > 0 ? O[i - 1] : 0.0;
            const double right = i + 1 < grid.ny ? O[i + 1] : 0.0;
            next[i] = std::max(O[i] + r * (left - 2.0 * O[i] + right), -uk[i]);
        }
        O = next;
        if (k % refine == 0) {
            auto coarse_row = sol.obstacle.row(k / refine);
            for (int i = 0; i < grid.ny; ++i) {
                gap = std::max(gap, std::abs(coarse_row[i] - O[i]));
            }
        }
    }
    CHECK(gap < 2e-3);
}

TEST_CASE("picard iterate of the zero problem stays zero") {
    const GridSpec grid = GridSpec::make(24, 10, 1.0, 0.05);
    const SineBasis basis(grid, 1.0);
    PicardSetup setup;
    setup.alpha = 1.0;
    setup.lambda = 1.0;
    setup.trunc_M = 1.0;
    setup.v0.assign(grid.ny, 0.0);
    setup.sigma_values.assign(grid.ny, 0.0);
    const std::vector<double> noise(static_cast<std::size_t>(grid.nt) * grid.ny, 0.0);
    FieldPath prev(grid.ny, grid.nt);
    const FieldPath out = picard_iterate(prev, noise, setup, grid, basis);
    for (double v : out.data) CHECK(v == 0.0);
}

TEST_CASE("picard iterate matches a pointwise lagged Riemann oracle") {
    const double lambda = 1.0, alpha = 1.0, T = 0.1;
    const GridSpec grid = GridSpec::make(24, 20, lambda, T);
    const SineBasis basis(grid, lambda);
    const GreenSeries gs = GreenSeries::make(alpha, lambda, grid.dt);

    PicardSetup setup;
    setup.alpha = alpha;
    setup.lambda = lambda;
    setup.trunc_M = 2.0;
    setup.v0.resize(grid.ny);
    setup.sigma_values.assign(grid.ny, 0.0);
    for (int i = 1; i <= grid.ny; ++i) setup.v0[i - 1] = 0.1 * std::sin(M_PI * i * grid.dy);

    FieldPath prev(grid.ny, grid.nt);
    for (int k = 0; k <= grid.nt; ++k) {
        auto row = prev.row(k);
        for (int i = 0; i < grid.ny; ++i) row[i] = setup.v0[i];
    }
    const std::vector<double> noise(static_cast<std::size_t>(grid.nt) * grid.ny, 0.0);
    const FieldPath out = picard_iterate(prev, noise, setup, grid, basis);

    // initial data is preserved exactly
    for (int i = 0; i < grid.ny; ++i) CHECK(out.row(0)[i] == setup.v0[i]);

    // oracle: semigroup term plus the drift double sum evaluated through the
    // pointwise kernel, same left-endpoint rule, same capped inputs
    const std::vector<double> capped = cap_slope(setup.v0, grid.dy, setup.trunc_M);
    const double gamma = boundary_gradient(capped, grid.dy);
    double worst = 0.0;
    for (int k : {5, 20}) {
        const double t = k * grid.dt;
        const auto heat = heat_convolve(gs, basis, setup.v0, t);
        for (int probe : {6, 12, 18}) {
            const double y = probe * grid.dy;
            double drift = 0.0;
            for (int j = 0; j < k; ++j) {
                const double lag = t - j * grid.dt;
                double inner = 0.0;
                for (int i = 1; i <= grid.ny; ++i) {
                    inner += grad_green_eval(gs, lag, i * grid.dy, y) * capped[i - 1] *
                             grid.dy;
                }
                drift += grid.dt * gamma * inner;
            }
            const double expected = heat[probe - 1] + drift;
            worst = std::max(worst, std::abs(out.row(k)[probe - 1] - expected));
        }
    }
    CHECK(worst < 1e-9);

    // the drift correction on top of pure decay stays small but non-zero
    const auto heat_T = heat_convolve(gs, basis, setup.v0, T);
    double dev = 0.0;
    for (int i = 0; i < grid.ny; ++i) {
        dev = std::max(dev, std::abs(out.row(grid.nt)[i] - heat_T[i]));
    }
    CHECK(dev > 0.0);
    CHECK(dev < 0.05 * 0.1);
}

TEST_CASE("run_picard on the zero problem converges immediately") {
    const GridSpec grid = GridSpec::make(16, 8, 1.0, 0.04);
    const SineBasis basis(grid, 1.0);
    PicardSetup setup;
    setup.alpha = 1.0;
    setup.lambda = 1.0;
    setup.trunc_M = 1.0;
    setup.v0.assign(grid.ny, 0.0);
    setup.sigma_values.assign(grid.ny, 0.0);
    const std::vector<double> noise(static_cast<std::size_t>(grid.nt) * grid.ny, 0.0);
    const PicardResult result = run_picard(noise, setup, grid, basis);
    CHECK(result.report.converged);
    CHECK(result.report.iterations == 1);
    CHECK(result.report.distances[0] == 0.0);
    CHECK(result.report.residual == 0.0);
}

TEST_CASE("run_picard contracts and its fixed point is self-consistent") {
    const GridSpec grid = GridSpec::make(48, 60, 1.0, 0.05);
    const SineBasis basis(grid, 1.0);
    PicardSetup setup;
    setup.alpha = 1.0;
    setup.lambda = 1.0;
    setup.trunc_M = 2.0;
    setup.v0.resize(grid.ny);
    setup.sigma_values.resize(grid.ny);
    for (int i = 1; i <= grid.ny; ++i) {
        setup.v0[i - 1] = 0.1 * std::sin(M_PI * i * grid.dy);
        setup.sigma_values[i - 1] = 0.1 * std::sin(M_PI * i * grid.dy);
    }

    for (std::uint64_t seed : {4u, 5u}) {
        const std::vector<double> noise = sample_noise_path(NoiseStream(seed, 0, 0), grid);
        const PicardResult result = run_picard(noise, setup, grid, basis);
        CHECK(result.report.converged);
        const auto& d = result.report.distances;
        for (std::size_t n = 1; n < d.size(); ++n) CHECK(d[n] < d[n - 1]);
        CHECK(result.report.residual < 2e-6);

        // v(.,0) = v0 and the iterate's reflection satisfies complementarity
        for (int i = 0; i < grid.ny; ++i) {
            CHECK(result.fixed_point.row(0)[i] == setup.v0[i]);
        }
        double dot = 0.0;
        for (int k = 1; k <= grid.nt; ++k) {
            auto vk = result.fixed_point.row(k);
            const double* eta =
                &result.eta_rate[static_cast<std::size_t>(k - 1) * grid.ny];
            for (int i = 0; i < grid.ny; ++i) {
                CHECK(vk[i] >= 0.0);
                dot += vk[i] * eta[i] * grid.dy * grid.dt;
            }
        }
        CHECK(std::abs(dot) < 1e-10);
    }
}

TEST_CASE("a non-finite noise path surfaces as a divergence error") {
    const GridSpec grid = GridSpec::make(16, 8, 1.0, 0.04);
    const SineBasis basis(grid, 1.0);
    PicardSetup setup;
    setup.alpha = 1.0;
    setup.lambda = 1.0;
    setup.trunc_M = 1.0;
    setup.v0.assign(grid.ny, 0.0);
    setup.sigma_values.assign(grid.ny, 1e308);
    std::vector<double> noise(static_cast<std::size_t>(grid.nt) * grid.ny, 1e308);
    CHECK_THROWS_AS(run_picard(noise, setup, grid, basis), std::runtime_error);
}
