#include "stefan/spde.hpp"

#include <algorithm>
#include <cmath>

namespace stefan {

FieldState FieldState::from_profile(const InitialProfile& profile, const GridSpec& grid,
                                    double lambda) {
    FieldState state;
    state.v.resize(grid.ny);
    state.eta_cum.assign(grid.ny, 0.0);
    for (int i = 1; i <= grid.ny; ++i) {
        state.v[i - 1] = profile_at(profile, i * grid.dy, lambda);
    }
    state.far_value = profile_at(profile, lambda, lambda);
    state.g0 = boundary_gradient(state.v, grid.dy);
    return state;
}

double boundary_gradient(std::span<const double> v, double dy) {
    return (4.0 * v[0] - v[1]) / (2.0 * dy);
}

std::vector<double> cap_slope(std::span<const double> v, double dy, double M) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double cap = M * (static_cast<double>(i + 1) * dy);
        out[i] = std::clamp(v[i], -cap, cap);
    }
    return out;
}

double slope_norm(std::span<const double> v, double dy) {
    double worst = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        worst = std::max(worst, std::abs(v[i]) / (static_cast<double>(i + 1) * dy));
    }
    return worst;
}

double capped_boundary_gradient(std::span<const double> v, double dy, double M) {
    const double c1 = std::clamp(v[0], -M * dy, M * dy);
    const double c2 = std::clamp(v[1], -2.0 * M * dy, 2.0 * M * dy);
    return (4.0 * c1 - c2) / (2.0 * dy);
}

void solve_heat_implicit(std::span<const double> rhs, double r, double left_ghost,
                         double right_ghost, std::span<double> x) {
    const std::size_t n = rhs.size();
    static thread_local std::vector<double> c_prime;
    c_prime.resize(n);

    const double b = 1.0 + 2.0 * r;
    double beta = b;
    x[0] = (rhs[0] + r * left_ghost) / beta;
    for (std::size_t i = 1; i < n; ++i) {
        c_prime[i - 1] = -r / beta;
        beta = b + r * c_prime[i - 1];
        const double extra = (i + 1 == n) ? r * right_ghost : 0.0;
        x[i] = (rhs[i] + extra + r * x[i - 1]) / beta;
    }
    for (std::size_t i = n - 1; i > 0; --i) {
        x[i - 1] -= c_prime[i - 1] * x[i];
    }
}

std::vector<double> step(FieldState& state, const StepParams& params, double drift_gradient,
                         std::span<const double> dW, std::span<const double> sigma_values) {
    const int ny = static_cast<int>(state.v.size());
    const double dy = params.dy;
    const double dt = params.dt;

    // advected field: v itself, or its slope-capped version for truncated runs
    std::vector<double> adv;
    std::span<const double> advected = state.v;
    double adv_far = state.far_value;
    if (params.truncation) {
        adv = cap_slope(state.v, dy, *params.truncation);
        advected = adv;
        const double cap = *params.truncation * (ny + 1) * dy;
        adv_far = std::clamp(state.far_value, -cap, cap);
    }

    const double c = params.drift_sign * drift_gradient;
    std::vector<double> rhs(ny);
    for (int i = 0; i < ny; ++i) {
        double grad;
        if (c > 0.0) {
            const double right = (i + 1 < ny) ? advected[i + 1] : adv_far;
            grad = (right - advected[i]) / dy;
        } else {
            const double left = (i > 0) ? advected[i - 1] : 0.0;
            grad = (advected[i] - left) / dy;
        }
        rhs[i] = state.v[i] + dt * c * grad +
                 params.noise_sign * sigma_values[i] * dW[i] / dy;
    }

    const double r = params.alpha * dt / (dy * dy);
    std::vector<double> next(ny);
    solve_heat_implicit(rhs, r, 0.0, state.far_value, next);

    std::vector<double> eta_increment(ny, 0.0);
    for (int i = 0; i < ny; ++i) {
        if (!std::isfinite(next[i])) throw SolverBlowUp(state.t + dt);
        if (params.reflect && next[i] < 0.0) {
            eta_increment[i] = -next[i];
            next[i] = 0.0;
            state.eta_cum[i] += eta_increment[i];
        }
    }

    state.v = std::move(next);
    state.t += dt;
    state.g0 = boundary_gradient(state.v, dy);
    return eta_increment;
}

}  // namespace stefan
