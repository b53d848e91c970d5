#include "stefan/picard.hpp"

#include <cmath>
#include <stdexcept>

#include "stefan/spde.hpp"

namespace stefan {

FieldPath picard_iterate(const FieldPath& v_prev, std::span<const double> noise_path,
                         const PicardSetup& setup, const GridSpec& grid,
                         const SineBasis& basis, std::vector<double>* eta_out) {
    const int ny = grid.ny;
    const int nt = grid.nt;
    const GreenSeries gs = GreenSeries::make(setup.alpha, setup.lambda,
                                             std::min(grid.dt, 1e-3));

    // heat term: damp the initial data mode-by-mode, one decay per step
    std::vector<double> heat_state(ny);
    basis.forward(setup.v0, heat_state);
    std::vector<double> decay(ny);
    for (int n = 1; n <= ny; ++n) {
        const double x = setup.alpha * eigenvalue(n, setup.lambda) * grid.dt;
        decay[n - 1] = x > 700.0 ? 0.0 : std::exp(-x);
    }

    ConvolutionAccumulator drift_acc(gs, ny, grid.dt, ConvolutionPolicy::EndpointLag, grid.dt);
    ConvolutionAccumulator noise_acc(gs, ny, grid.dt, setup.policy, 1.0);

    FieldPath u(ny, nt);
    for (int i = 0; i < ny; ++i) u.row(0)[i] = setup.v0[i];

    std::vector<double> capped, drift_source(ny), noise_cell(ny), noise_source(ny);
    std::vector<double> mode_sum(ny), values(ny);
    for (int k = 1; k <= nt; ++k) {
        // sources live at t_{k-1}: coefficient and advected field from the
        // slope-capped previous iterate, noise from the frozen realization
        auto prev = v_prev.row(k - 1);
        capped = cap_slope(prev, grid.dy, setup.trunc_M);
        const double gamma = boundary_gradient(capped, grid.dy);
        // Duhamel source of the transport term: integrating -g*grad(v) against
        // the kernel by parts leaves +g times the cosine moments of v
        basis.forward_grad(capped, drift_source);
        for (int n = 0; n < ny; ++n) drift_source[n] *= gamma;

        const double* dW = &noise_path[static_cast<std::size_t>(k - 1) * ny];
        for (int i = 0; i < ny; ++i) {
            noise_cell[i] = setup.sigma_values[i] * dW[i] / grid.dy;
        }
        basis.forward(noise_cell, noise_source);

        drift_acc.step(drift_source);
        noise_acc.step(noise_source);
        for (int n = 0; n < ny; ++n) {
            heat_state[n] *= decay[n];
            mode_sum[n] = heat_state[n] + drift_acc.coeffs()[n] + noise_acc.coeffs()[n];
        }
        basis.inverse(mode_sum, values);
        auto out = u.row(k);
        for (int i = 0; i < ny; ++i) out[i] = values[i];
    }

    ObstacleSolution obs = solve_obstacle(u, setup.alpha, grid);
    FieldPath v(ny, nt);
    for (int k = 0; k <= nt; ++k) {
        auto uk = u.row(k);
        auto ok = obs.obstacle.row(k);
        auto vk = v.row(k);
        for (int i = 0; i < ny; ++i) vk[i] = uk[i] + ok[i];
    }
    if (eta_out) *eta_out = std::move(obs.eta_rate);
    return v;
}

double path_distance(const FieldPath& a, const FieldPath& b, double dy) {
    std::vector<double> diff(a.ny);
    double worst = 0.0;
    for (int k = 0; k <= a.nt; ++k) {
        auto ra = a.row(k);
        auto rb = b.row(k);
        for (int i = 0; i < a.ny; ++i) diff[i] = ra[i] - rb[i];
        worst = std::max(worst, slope_norm(diff, dy));
    }
    return worst;
}

PicardResult run_picard(std::span<const double> noise_path, const PicardSetup& setup,
                        const GridSpec& grid, const SineBasis& basis, int n_max,
                        double tol) {
    if (!std::isfinite(slope_norm(setup.v0, grid.dy))) {
        throw std::invalid_argument("run_picard: v0 has non-finite slope norm");
    }

    FieldPath current(grid.ny, grid.nt);
    for (int k = 0; k <= grid.nt; ++k) {
        auto row = current.row(k);
        for (int i = 0; i < grid.ny; ++i) row[i] = setup.v0[i];
    }

    PicardResult result;
    std::vector<double> eta;
    for (int n = 1; n <= n_max; ++n) {
        FieldPath next = picard_iterate(current, noise_path, setup, grid, basis, &eta);
        bool finite = true;
        for (double v : next.data) finite = finite && std::isfinite(v);
        const double d = path_distance(next, current, grid.dy);
        if (!finite || !std::isfinite(d)) {
            throw std::runtime_error(
                "run_picard: iterate diverged; reduce the horizon or the truncation level");
        }
        result.report.distances.push_back(d);
        result.report.iterations = n;
        current = std::move(next);
        if (d < tol) {
            result.report.converged = true;
            break;
        }
    }

    FieldPath probe = picard_iterate(current, noise_path, setup, grid, basis, nullptr);
    result.report.residual = path_distance(probe, current, grid.dy);
    result.fixed_point = std::move(current);
    result.eta_rate = std::move(eta);
    return result;
}

}  // namespace stefan
