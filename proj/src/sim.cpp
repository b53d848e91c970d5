#include "stefan/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stefan/noise.hpp"

namespace stefan {

CaseSigns case_signs(CaseId id) {
    switch (id) {
        case CaseId::Case1Signed:
            return {-1, +1, +1, -1, true};
        case CaseId::Case2Reflected:
            return {-1, -1, +1, +1, true};
        case CaseId::Case3Unreflected:
            return {-1, -1, +1, +1, false};
    }
    throw std::invalid_argument("case_signs: unknown case");
}

std::pair<double, double> integrate_stefan(CaseId id, double s_plus, double s_minus,
                                           double g1, double g2, double dt) {
    const double new_plus = s_plus - g1 * dt;
    const double new_minus = id == CaseId::Case1Signed ? s_minus - g2 * dt
                                                       : s_minus + g2 * dt;
    return {new_plus, new_minus};
}

std::optional<StopEvent> check_stopping(CaseId id, const StopCheckInputs& in,
                                        const ModelConfig& cfg) {
    if (in.grad_functional_sup >= cfg.grad_bound_M) {
        return StopEvent{StopKind::GradientBound, in.step_index, in.time,
                         in.grad_functional_sup};
    }
    const double spread = in.s_plus - in.s_minus;
    if (spread < 0.0) {
        return StopEvent{StopKind::SpreadNonNegativity, in.step_index, in.time, spread};
    }
    if (id != CaseId::Case2Reflected && in.s_minus <= cfg.a) {
        return StopEvent{StopKind::SpreadAreaLeft, in.step_index, in.time, in.s_minus};
    }
    if (id == CaseId::Case3Unreflected && in.s_plus >= cfg.b) {
        return StopEvent{StopKind::SpreadAreaRight, in.step_index, in.time, in.s_plus};
    }
    return std::nullopt;
}

namespace {

double eta_mass(const FieldState& state, double dy) {
    double total = 0.0;
    for (double e : state.eta_cum) total += e;
    return total * dy;
}

double linear_interp(std::span<const double> v, double far, double dy, int ny, double y) {
    // node j holds v at y = j*dy, with ghosts v(0) = 0 and v((ny+1)*dy) = far;
    // positions within rounding of a node snap to it so grid-aligned queries
    // reproduce node values exactly
    const double pos = y / dy;
    const double nearest = std::round(pos);
    if (std::abs(pos - nearest) < 1e-9 && nearest >= 0.0 && nearest <= ny + 1) {
        const int j = static_cast<int>(nearest);
        if (j == 0) return 0.0;
        return j == ny + 1 ? far : v[j - 1];
    }
    int j = static_cast<int>(std::floor(pos));
    j = std::clamp(j, 0, ny);
    const double frac = pos - j;
    const double left = j == 0 ? 0.0 : v[j - 1];
    const double right = j == ny ? far : v[j];
    return left + frac * (right - left);
}

}  // namespace

StefanTrajectory simulate(const ModelConfig& cfg, const SimOptions& options) {
    {
        const auto errors = validate_config(cfg);
        if (!errors.empty()) {
            throw std::invalid_argument("simulate: invalid config: " + errors.front());
        }
    }

    const GridSpec& grid = cfg.grid;
    const CaseSigns signs = case_signs(cfg.case_id);
    const bool forced = options.forced_gradients.has_value();

    StepParams params1{cfg.alpha, grid.dt, grid.dy, signs.drift_sign_v1, signs.noise_sign_v1,
                       signs.reflect, std::nullopt};
    StepParams params2{cfg.alpha, grid.dt, grid.dy, signs.drift_sign_v2, signs.noise_sign_v2,
                       signs.reflect, std::nullopt};

    FieldState v1 = FieldState::from_profile(cfg.initial_profile, grid, cfg.lambda);
    FieldState v2 = FieldState::from_profile(cfg.initial_profile, grid, cfg.lambda);

    std::vector<double> sigma_values(grid.ny);
    for (int i = 1; i <= grid.ny; ++i) {
        sigma_values[i - 1] = sigma_at(cfg.sigma_profile, i * grid.dy, cfg.lambda);
    }

    const std::uint64_t stream1 = options.swap_streams ? 1 : 0;
    const std::uint64_t stream2 = cfg.shared_noise ? stream1 : (options.swap_streams ? 0 : 1);
    NoiseStream noise1(cfg.seed, options.path_index, stream1);
    NoiseStream noise2(cfg.seed, options.path_index, stream2);

    // snapshot requests, rounded to the nearest step
    std::vector<int> snapshot_steps;
    for (double t : options.snapshot_times) {
        const int k = static_cast<int>(std::llround(t / grid.dt));
        if (k >= 0 && k <= grid.nt) snapshot_steps.push_back(k);
    }
    std::sort(snapshot_steps.begin(), snapshot_steps.end());
    snapshot_steps.erase(std::unique(snapshot_steps.begin(), snapshot_steps.end()),
                         snapshot_steps.end());

    StefanTrajectory traj;
    traj.case_id = cfg.case_id;
    traj.lambda = cfg.lambda;
    traj.grid = grid;

    double s_plus = cfg.s_plus_0;
    double s_minus = cfg.s_minus_0;
    double grad_sup = 0.0;

    auto coupler_gradient = [&](const FieldState& state) {
        const double raw = boundary_gradient(state.v, grid.dy);
        return signs.reflect ? std::max(0.0, raw) : raw;
    };
    auto record = [&](int k, double g1, double g2) {
        traj.times.push_back(k * grid.dt);
        traj.s_plus.push_back(s_plus);
        traj.s_minus.push_back(s_minus);
        traj.spread.push_back(s_plus - s_minus);
        traj.g1.push_back(g1);
        traj.g2.push_back(g2);
        traj.grad_functional_sup.push_back(grad_sup);
        traj.eta1_total.push_back(eta_mass(v1, grid.dy));
        traj.eta2_total.push_back(eta_mass(v2, grid.dy));
    };
    auto snapshot = [&](int k) {
        if (!std::binary_search(snapshot_steps.begin(), snapshot_steps.end(), k)) return;
        StefanTrajectory::Snapshot snap;
        snap.step = k;
        snap.time = k * grid.dt;
        snap.v1 = v1.v;
        snap.v2 = v2.v;
        snap.v1_far = v1.far_value;
        snap.v2_far = v2.far_value;
        snap.s_plus = s_plus;
        snap.s_minus = s_minus;
        traj.snapshots.push_back(std::move(snap));
    };

    {
        const double g1 = forced ? options.forced_gradients->first : coupler_gradient(v1);
        const double g2 = forced ? options.forced_gradients->second : coupler_gradient(v2);
        record(0, g1, g2);
        snapshot(0);
    }

    for (int k = 1; k <= grid.nt; ++k) {
        const double g1 = forced ? options.forced_gradients->first : coupler_gradient(v1);
        const double g2 = forced ? options.forced_gradients->second : coupler_gradient(v2);

        const double functional = cfg.case_id == CaseId::Case3Unreflected
                                      ? std::abs(g1) + std::abs(g2)
                                      : g1 + g2;
        grad_sup = std::max(grad_sup, functional);

        if (!forced) {
            NoiseSlice slice1 = sample_slice(noise1, grid, k - 1);
            NoiseSlice slice2 = cfg.shared_noise ? slice1 : sample_slice(noise2, grid, k - 1);
            if (cfg.sigma_profile.time_only) {
                // one Brownian increment shared by all cells, variance dt;
                // scaled by dy so the stepper's sigma*dW/dy coupling emits it as-is
                const double dw1 = sample_time_increment(noise1, grid, k - 1) * grid.dy;
                const double dw2 = cfg.shared_noise
                                       ? dw1
                                       : sample_time_increment(noise2, grid, k - 1) * grid.dy;
                std::fill(slice1.dW.begin(), slice1.dW.end(), dw1);
                std::fill(slice2.dW.begin(), slice2.dW.end(), dw2);
            }
            step(v1, params1, g1, slice1.dW, sigma_values);
            step(v2, params2, g2, slice2.dW, sigma_values);
        }

        std::tie(s_plus, s_minus) = integrate_stefan(cfg.case_id, s_plus, s_minus, g1, g2,
                                                     grid.dt);

        const double g1_next = forced ? g1 : coupler_gradient(v1);
        const double g2_next = forced ? g2 : coupler_gradient(v2);
        record(k, g1_next, g2_next);
        snapshot(k);

        StopCheckInputs in{grad_sup, s_plus, s_minus, k, k * grid.dt};
        if (auto event = check_stopping(cfg.case_id, in, cfg)) {
            traj.stop = event;
            break;
        }
    }

    return traj;
}

std::vector<double> reconstruct_density(const StefanTrajectory& traj, double t,
                                        std::span<const double> x_points) {
    if (traj.stop && t >= traj.stop->time) {
        throw std::domain_error("reconstruct_density: t at or beyond the stop time");
    }
    const StefanTrajectory::Snapshot* snap = nullptr;
    for (const auto& s : traj.snapshots) {
        if (std::abs(s.time - t) <= 0.5 * traj.grid.dt + 1e-15) {
            snap = &s;
            break;
        }
    }
    if (!snap) {
        throw std::domain_error("reconstruct_density: no snapshot recorded near t");
    }

    const int ny = traj.grid.ny;
    const double dy = traj.grid.dy;
    std::vector<double> w(x_points.size());
    for (std::size_t j = 0; j < x_points.size(); ++j) {
        const double x = x_points[j];
        if (x >= snap->s_plus) {
            const double y = std::min(x - snap->s_plus, traj.lambda);
            w[j] = linear_interp(snap->v1, snap->v1_far, dy, ny, y);
        } else if (x <= snap->s_minus) {
            const double y = std::min(snap->s_minus - x, traj.lambda);
            const double value = linear_interp(snap->v2, snap->v2_far, dy, ny, y);
            w[j] = traj.case_id == CaseId::Case1Signed ? -value : value;
        } else {
            w[j] = 0.0;
        }
    }
    return w;
}

StoppingFunctionals stopping_functionals(const StefanTrajectory& traj, const ModelConfig& cfg) {
    StoppingFunctionals out;
    const std::size_t n = traj.times.size();
    out.spread_sup.resize(n, 0.0);
    out.left_exit_sup.resize(n, 0.0);
    out.right_exit_sup.resize(n, 0.0);

    const double spread_budget = cfg.initial_spread();
    const double left_budget = cfg.s_minus_0 - cfg.a;
    const double right_budget = cfg.b - cfg.s_plus_0;

    double spread_sup = 0.0, left_sup = 0.0, right_sup = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        const double g1 = traj.g1[k - 1];
        const double g2 = traj.g2[k - 1];
        switch (cfg.case_id) {
            case CaseId::Case1Signed:
                spread_sup = std::max(spread_sup, std::abs(g1 - g2));
                left_sup = std::max(left_sup, g2);
                break;
            case CaseId::Case2Reflected:
                spread_sup = std::max(spread_sup, g1 + g2);
                break;
            case CaseId::Case3Unreflected:
                spread_sup = std::max(spread_sup, std::abs(g1 + g2));
                left_sup = std::max(left_sup, std::abs(g2));
                right_sup = std::max(right_sup, std::abs(g1));
                break;
        }
        out.spread_sup[k] = spread_sup;
        out.left_exit_sup[k] = left_sup;
        out.right_exit_sup[k] = right_sup;

        const double t = traj.times[k];
        if (!out.spread_fire_step && spread_sup * t >= spread_budget) {
            out.spread_fire_step = static_cast<int>(k);
        }
        if (!out.left_fire_step && cfg.case_id != CaseId::Case2Reflected &&
            left_sup * t >= left_budget) {
            out.left_fire_step = static_cast<int>(k);
        }
        if (!out.right_fire_step && cfg.case_id == CaseId::Case3Unreflected &&
            right_sup * t >= right_budget) {
            out.right_fire_step = static_cast<int>(k);
        }
    }
    return out;
}

}  // namespace stefan
