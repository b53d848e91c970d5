#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "stefan/meanfield.hpp"

using namespace stefan;

TEST_CASE("zero initial value and zero noise stay at rest") {
    MeanFieldParams params;
    params.alpha = 1.0;
    params.lambda = 2.0;
    params.w0 = 0.0;
    params.spread0 = 0.7;
    params.horizon = 1.0;
    params.dt = 1e-3;
    params.zero_noise = true;
    const MeanFieldPath path = simulate_meanfield(params);
    for (double w : path.w_inf) CHECK(w == 0.0);
    for (double s : path.spread) CHECK(s == 0.7);
}

TEST_CASE("deterministic growth converges to exp(a t) at first order") {
    MeanFieldParams params;
    params.alpha = 1.0;
    params.lambda = 2.0;  // a = 1/2
    params.w0 = 1.0;
    params.spread0 = 0.0;
    params.horizon = 1.0;
    params.zero_noise = true;

    params.dt = 1e-2;
    const double coarse = std::abs(simulate_meanfield(params).w_inf.back() - std::exp(0.5));
    params.dt = 1e-3;
    const double fine = std::abs(simulate_meanfield(params).w_inf.back() - std::exp(0.5));
    CHECK(fine < 5e-4);
    CHECK(coarse / fine > 5.0);  // first-order error, 10x smaller dt
}

TEST_CASE("constant profile empties the spread linearly") {
    // alpha = 0 freezes w at w0 = 1; spread drains at rate 2/lambda = 1
    MeanFieldParams params;
    params.alpha = 0.0;
    params.lambda = 2.0;
    params.w0 = 1.0;
    params.spread0 = 1.0;
    params.horizon = 1.0;
    params.dt = 1e-3;
    params.zero_noise = true;
    const MeanFieldPath path = simulate_meanfield(params);
    CHECK(path.w_inf.back() == 1.0);
    CHECK(std::abs(path.spread.back()) < 1e-12);
}

TEST_CASE("closed-form moments") {
    const Moments at_zero = meanfield_moments(1.0, 2.0, 0.7, 0.0);
    CHECK(at_zero.mean == doctest::Approx(0.7));
    CHECK(at_zero.variance == doctest::Approx(0.0));

    const Moments at_one = meanfield_moments(1.0, 2.0, 1.0, 1.0);
    CHECK(at_one.mean == doctest::Approx(std::exp(0.5)).epsilon(1e-12));
    CHECK(at_one.variance == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));

    // vanishing rate: pure Brownian accumulation
    const Moments flat = meanfield_moments(0.0, 2.0, 1.0, 0.8);
    CHECK(flat.variance == doctest::Approx(0.8));

    CHECK_THROWS_AS(meanfield_moments(1.0, 2.0, 1.0, -0.1), std::invalid_argument);
}

TEST_CASE("sampled moments match the closed form at two horizons") {
    const int n_paths = 10000;
    MeanFieldParams params;
    params.alpha = 1.0;
    params.lambda = 2.0;
    params.w0 = 1.0;
    params.spread0 = 0.0;
    params.horizon = 1.0;
    params.dt = 1e-3;
    params.seed = 123;

    std::vector<double> at_half(n_paths), at_one(n_paths);
    for (int p = 0; p < n_paths; ++p) {
        params.path_index = static_cast<std::uint64_t>(p);
        const MeanFieldPath path = simulate_meanfield(params);
        at_half[p] = path.w_inf[500];
        at_one[p] = path.w_inf[1000];
    }
    for (const auto& [samples, t] : {std::pair{&at_half, 0.5}, std::pair{&at_one, 1.0}}) {
        double mean = 0.0;
        for (double w : *samples) mean += w;
        mean /= n_paths;
        double var = 0.0;
        for (double w : *samples) var += (w - mean) * (w - mean);
        var /= (n_paths - 1);
        const Moments exact = meanfield_moments(1.0, 2.0, 1.0, t);
        CHECK(std::abs(mean - exact.mean) < 3.0 * std::sqrt(var / n_paths));
        CHECK(std::abs(var - exact.variance) < 3.0 * var * std::sqrt(2.0 / (n_paths - 1)));
    }
}

TEST_CASE("spread equals its defining cumulative sum step by step") {
    MeanFieldParams params;
    params.alpha = 1.0;
    params.lambda = 2.0;
    params.w0 = 1.0;
    params.spread0 = 0.4;
    params.horizon = 0.5;
    params.dt = 1e-3;
    params.seed = 17;
    const MeanFieldPath path = simulate_meanfield(params);

    double replay = params.spread0;
    for (std::size_t k = 0; k + 1 < path.spread.size(); ++k) {
        replay -= params.dt * path.spread_rate_coef * path.w_inf[k];
        CHECK(path.spread[k + 1] == replay);
    }
}

TEST_CASE("beta reformulation holds to rounding along sampled paths") {
    MeanFieldParams params;
    params.alpha = 1.0;
    params.lambda = 2.0;
    params.w0 = 0.6;
    params.spread0 = 0.0;
    params.horizon = 1.0;
    params.dt = 1e-3;

    params.zero_noise = true;
    const MeanFieldPath quiet = simulate_meanfield(params);
    CHECK(beta_equivalence_check(quiet, quiet.brownian) < 1e-3 * params.dt);
    CHECK(quiet.w_inf.front() - quiet.brownian.front() == doctest::Approx(0.6));

    params.zero_noise = false;
    params.seed = 4;
    const MeanFieldPath noisy = simulate_meanfield(params);
    double max_w = 0.0;
    for (double w : noisy.w_inf) max_w = std::max(max_w, std::abs(w));
    CHECK(beta_equivalence_check(noisy, noisy.brownian) <
          10.0 * params.dt * (1.0 + max_w) * noisy.a_coef);

    std::vector<double> wrong_length(noisy.brownian.begin(), noisy.brownian.end() - 1);
    CHECK_THROWS_AS(beta_equivalence_check(noisy, wrong_length), std::invalid_argument);
}

TEST_CASE("explicit scheme guard rejects oversized steps") {
    MeanFieldParams params;
    params.alpha = 10.0;
    params.lambda = 1.0;  // a = 20
    params.dt = 0.05;     // a*dt = 1
    CHECK_THROWS_AS(simulate_meanfield(params), std::invalid_argument);
}
