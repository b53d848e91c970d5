#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace stefan {

/// Far-field system for large liquidity: a scalar linear SDE for the
/// far-field density level and the spread as its running integral,
///   dw = (2*alpha/lambda^2) * w dt + dW,   d(spread) = -(2/lambda) * w dt.
struct MeanFieldParams {
    double alpha = 1.0;
    double lambda = 1.0;
    double w0 = 0.0;
    double spread0 = 0.0;
    double horizon = 1.0;
    double dt = 1e-3;
    std::uint64_t seed = 0;
    std::uint64_t path_index = 0;
    bool zero_noise = false;  // substitute dW = 0 for deterministic checks
};

struct MeanFieldPath {
    std::vector<double> times;
    std::vector<double> w_inf;
    std::vector<double> spread;
    std::vector<double> brownian;  // W(t_k), W(0) = 0
    double a_coef = 0.0;           // 2*alpha/lambda^2
    double spread_rate_coef = 0.0; // 2/lambda
};

/// Euler-Maruyama path of the system. Requires dt * 2*alpha/lambda^2 < 0.5.
MeanFieldPath simulate_meanfield(const MeanFieldParams& params);

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

/// Closed-form moments of w(t): mean = exp(a*t)*w0,
/// variance = (exp(2*a*t) - 1) / (2*a), with the a -> 0 limit variance = t.
Moments meanfield_moments(double alpha, double lambda, double w0, double t);

/// Reconstruct beta = w - W from the path and verify the increment identity
/// beta_{k+1} - beta_k = dt * a * (beta_k + W_k); returns the largest defect.
/// Throws std::invalid_argument on a length mismatch.
double beta_equivalence_check(const MeanFieldPath& path, std::span<const double> brownian);

}  // namespace stefan
