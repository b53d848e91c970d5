#pragma once

#include <span>
#include <vector>

#include "stefan/config.hpp"
#include "stefan/green.hpp"
#include "stefan/obstacle.hpp"

namespace stefan {

/// Fixed ingredients of one Picard run: the equation coefficients, the
/// slope-truncation level, and one frozen noise realization. The iteration
/// is pathwise; the same increments drive every iterate.
struct PicardSetup {
    double alpha = 1.0;
    double lambda = 1.0;
    double trunc_M = 1.0;
    std::vector<double> v0;             // initial data at interior nodes
    std::vector<double> sigma_values;   // noise diffusion at interior nodes
    ConvolutionPolicy policy = ConvolutionPolicy::ExactVariance;
};

/// One sweep of the integral map: from the previous iterate, build
///   u(t) = heat term + drift convolution + stochastic convolution,
/// where the drift coefficient and the advected field both come from the
/// slope-capped previous iterate, then split v = u + O through the obstacle
/// problem. Returns the new iterate; eta_out (optional) receives the
/// iterate's reflection rates.
FieldPath picard_iterate(const FieldPath& v_prev, std::span<const double> noise_path,
                         const PicardSetup& setup, const GridSpec& grid,
                         const SineBasis& basis,
                         std::vector<double>* eta_out = nullptr);

struct PicardReport {
    int iterations = 0;
    std::vector<double> distances;  // d_n = sup_t of the slope norm of v_n - v_{n-1}
    bool converged = false;
    double residual = 0.0;          // defect of the final iterate under one more sweep
};

struct PicardResult {
    PicardReport report;
    FieldPath fixed_point;
    std::vector<double> eta_rate;   // reflection rates of the final iterate
};

/// Iterate from the time-constant path v_0(y,t) = v0(y) until the sup-slope
/// distance between consecutive iterates drops below tol or n_max sweeps are
/// spent. Throws std::runtime_error if an iterate goes non-finite (horizon
/// too long for the truncation level).
PicardResult run_picard(std::span<const double> noise_path, const PicardSetup& setup,
                        const GridSpec& grid, const SineBasis& basis, int n_max = 30,
                        double tol = 1e-6);

/// sup over time levels of slope_norm(a.row(k) - b.row(k)).
double path_distance(const FieldPath& a, const FieldPath& b, double dy);

}  // namespace stefan
