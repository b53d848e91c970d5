#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "stefan/config.hpp"
#include "stefan/spde.hpp"

namespace stefan {

/// Sign structure of the two transformed equations per model case.
struct CaseSigns {
    int drift_sign_v1;
    int drift_sign_v2;
    int noise_sign_v1;
    int noise_sign_v2;
    bool reflect;
};

CaseSigns case_signs(CaseId id);

/// Forward Euler update of the boundaries from the current boundary
/// gradients. Case 1 moves both boundaries left; cases 2 and 3 move them
/// toward each other (s_plus down, s_minus up).
std::pair<double, double> integrate_stefan(CaseId id, double s_plus, double s_minus,
                                           double g1, double g2, double dt);

struct StopCheckInputs {
    double grad_functional_sup = 0.0;  // running sup of the case's gradient functional
    double s_plus = 0.0;
    double s_minus = 0.0;
    int step_index = 0;
    double time = 0.0;
};

/// First applicable constraint violation, checked in priority order:
/// gradient bound, spread non-negativity, then domain exits (left for
/// cases 1 and 3, right for case 3 only).
std::optional<StopEvent> check_stopping(CaseId id, const StopCheckInputs& in,
                                        const ModelConfig& cfg);

struct StefanTrajectory {
    CaseId case_id = CaseId::Case2Reflected;
    double lambda = 0.0;
    GridSpec grid;
    std::vector<double> times;
    std::vector<double> s_plus;
    std::vector<double> s_minus;
    std::vector<double> spread;
    std::vector<double> g1;  // coupler gradient of v1 at each recorded time
    std::vector<double> g2;
    std::vector<double> grad_functional_sup;  // running sup backing the M check
    std::vector<double> eta1_total;  // accumulated reflection mass, integrated in y
    std::vector<double> eta2_total;
    struct Snapshot {
        int step = 0;
        double time = 0.0;
        std::vector<double> v1, v2;
        double v1_far = 0.0, v2_far = 0.0;
        double s_plus = 0.0, s_minus = 0.0;
    };
    std::vector<Snapshot> snapshots;
    std::optional<StopEvent> stop;

    int last_index() const { return static_cast<int>(times.size()) - 1; }
};

struct SimOptions {
    std::uint64_t path_index = 0;
    std::vector<double> snapshot_times;
    /// Replace the coupler gradients with constants and skip field stepping;
    /// drives the boundary/stopping logic through synthetic scenarios.
    std::optional<std::pair<double, double>> forced_gradients;
    /// Exchange the two noise stream keys (used by exchangeability checks).
    bool swap_streams = false;
};

/// Run one trajectory: step both fields with their case signs, clamp the
/// coupler gradients at zero in the reflected cases (the continuum gradient
/// of a non-negative field vanishing at 0 is non-negative; the discrete
/// stencil may dip below on projected states), integrate the boundaries,
/// and halt at the first stopping event or at the horizon.
StefanTrajectory simulate(const ModelConfig& cfg, const SimOptions& options = {});

/// Physical density at the snapshot closest to time t: v1 right of the ask,
/// (-v2 for case 1, +v2 otherwise) left of the bid, 0 inside the spread.
/// Grid-aligned offsets reproduce node values exactly; other points are
/// linearly interpolated. Throws std::domain_error if t is at or beyond the
/// stop time or no snapshot was recorded near t.
std::vector<double> reconstruct_density(const StefanTrajectory& traj, double t,
                                        std::span<const double> x_points);

/// Literal threshold form of the stopping rules, evaluated post-hoc from the
/// recorded gradient paths: each rule fires at the first index where
/// (running sup of its functional) * t_k reaches its budget.
struct StoppingFunctionals {
    std::vector<double> spread_sup;      // per-index running sup, spread rule
    std::vector<double> left_exit_sup;   // cases 1 and 3
    std::vector<double> right_exit_sup;  // case 3
    std::optional<int> spread_fire_step;
    std::optional<int> left_fire_step;
    std::optional<int> right_fire_step;
};

StoppingFunctionals stopping_functionals(const StefanTrajectory& traj, const ModelConfig& cfg);

}  // namespace stefan
