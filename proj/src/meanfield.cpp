#include "stefan/meanfield.hpp"

#include <cmath>
#include <stdexcept>

#include "stefan/noise.hpp"

namespace stefan {

MeanFieldPath simulate_meanfield(const MeanFieldParams& params) {
    const double a = 2.0 * params.alpha / (params.lambda * params.lambda);
    if (params.dt * a >= 0.5) {
        throw std::invalid_argument("simulate_meanfield: dt * 2*alpha/lambda^2 must be below 1/2");
    }
    const int n = static_cast<int>(std::llround(params.horizon / params.dt));
    const double sqrt_dt = std::sqrt(params.dt);
    NoiseStream stream(params.seed, params.path_index, 0);

    MeanFieldPath path;
    path.a_coef = a;
    path.spread_rate_coef = 2.0 / params.lambda;
    path.times.resize(n + 1);
    path.w_inf.resize(n + 1);
    path.spread.resize(n + 1);
    path.brownian.resize(n + 1);

    double w = params.w0;
    double spread = params.spread0;
    double brownian = 0.0;
    path.times[0] = 0.0;
    path.w_inf[0] = w;
    path.spread[0] = spread;
    path.brownian[0] = 0.0;
    for (int k = 0; k < n; ++k) {
        const double dW = params.zero_noise ? 0.0 : sqrt_dt * stream.gaussian(k, 0);
        spread -= params.dt * path.spread_rate_coef * w;
        w += params.dt * a * w + dW;
        brownian += dW;
        path.times[k + 1] = (k + 1) * params.dt;
        path.w_inf[k + 1] = w;
        path.spread[k + 1] = spread;
        path.brownian[k + 1] = brownian;
    }
    return path;
}

Moments meanfield_moments(double alpha, double lambda, double w0, double t) {
    if (t < 0.0) throw std::invalid_argument("meanfield_moments: t must be non-negative");
    const double a = 2.0 * alpha / (lambda * lambda);
    Moments m;
    m.mean = std::exp(a * t) * w0;
    m.variance = a > 1e-12 ? std::expm1(2.0 * a * t) / (2.0 * a) : t;
    return m;
}

double beta_equivalence_check(const MeanFieldPath& path, std::span<const double> brownian) {
    if (brownian.size() != path.w_inf.size()) {
        throw std::invalid_argument("beta_equivalence_check: path length mismatch");
    }
    const std::size_t n = path.w_inf.size();
    if (n < 2) return 0.0;
    const double dt = path.times[1] - path.times[0];
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double beta_k = path.w_inf[k] - brownian[k];
        const double beta_next = path.w_inf[k + 1] - brownian[k + 1];
        const double defect = beta_next - beta_k - dt * path.a_coef * (beta_k + brownian[k]);
        worst = std::max(worst, std::abs(defect));
    }
    return worst;
}

}  // namespace stefan
