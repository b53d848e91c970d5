#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "stefan/config.hpp"

namespace stefan {

/// One density on the fixed grid, together with its accumulated reflection
/// mass and the most recent boundary gradient. Dirichlet ghost values are
/// implicit: v(0) = 0 and v(lambda) = far_value (0 except for ramp initial
/// data, whose plateau the right ghost holds).
struct FieldState {
    std::vector<double> v;
    std::vector<double> eta_cum;
    double g0 = 0.0;
    double t = 0.0;
    double far_value = 0.0;

    static FieldState from_profile(const InitialProfile& profile, const GridSpec& grid,
                                   double lambda);
};

/// Per-step coefficients of the generic fixed-domain equation:
/// v_t = alpha*Lap(v) + drift_sign*g*grad(v) + noise_sign*sigma*dW/dy (+ reflection).
struct StepParams {
    double alpha = 1.0;
    double dt = 0.0;
    double dy = 0.0;
    int drift_sign = -1;
    int noise_sign = +1;
    bool reflect = true;
    /// When set, the drift advects the slope-capped field instead of v,
    /// matching the truncated dynamics the fixed-point scheme solves.
    std::optional<double> truncation;
};

struct SolverBlowUp : std::runtime_error {
    explicit SolverBlowUp(double when)
        : std::runtime_error("solver produced a non-finite value"), time(when) {}
    double time;
};

/// Second-order one-sided estimate of grad v at 0+ using v(0) = 0:
/// (4*v_1 - v_2) / (2*dy). Exact on linear data.
double boundary_gradient(std::span<const double> v, double dy);

/// Cap the secant slope v(y)/y at +-M: out_i = y_i * clamp(v_i/y_i, -M, M).
/// Idempotent; identity whenever slope_norm(v) <= M.
std::vector<double> cap_slope(std::span<const double> v, double dy, double M);

/// Weighted sup norm sup_y |v(y)/y| on the grid.
double slope_norm(std::span<const double> v, double dy);

/// boundary_gradient of the slope-capped field.
double capped_boundary_gradient(std::span<const double> v, double dy, double M);

/// Solve (1 + 2r)x_i - r*x_{i-1} - r*x_{i+1} = rhs_i with the given ghost
/// values folded into the first and last equations (Thomas algorithm).
void solve_heat_implicit(std::span<const double> rhs, double r, double left_ghost,
                         double right_ghost, std::span<double> x);

/// Advance one semi-implicit step: explicit upwinded drift with coefficient
/// drift_gradient, explicit noise, implicit diffusion, then (reflected mode)
/// projection onto non-negative values. Returns the per-cell reflection
/// increments, identically zero in unreflected mode. Throws SolverBlowUp on
/// non-finite values.
std::vector<double> step(FieldState& state, const StepParams& params, double drift_gradient,
                         std::span<const double> dW, std::span<const double> sigma_values);

}  // namespace stefan
