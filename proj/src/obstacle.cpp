#include "stefan/obstacle.hpp"

#include <stdexcept>

#include "stefan/spde.hpp"

namespace stefan {

ObstacleSolution solve_obstacle(const FieldPath& u, double alpha, const GridSpec& grid) {
    if (u.ny != grid.ny || u.nt != grid.nt) {
        throw std::invalid_argument("solve_obstacle: path shape does not match the grid");
    }
    for (double value : u.row(0)) {
        if (value < 0.0) {
            throw std::invalid_argument("solve_obstacle: u(.,0) must be non-negative");
        }
    }

    ObstacleSolution sol;
    sol.obstacle = FieldPath(grid.ny, grid.nt);
    sol.eta_rate.assign(static_cast<std::size_t>(grid.nt) * grid.ny, 0.0);

    const double r = alpha * grid.dt / (grid.dy * grid.dy);
    std::vector<double> trial(grid.ny);
    for (int k = 1; k <= grid.nt; ++k) {
        solve_heat_implicit(sol.obstacle.row(k - 1), r, 0.0, 0.0, trial);
        auto out = sol.obstacle.row(k);
        auto obstacle_floor = u.row(k);
        double* eta = &sol.eta_rate[static_cast<std::size_t>(k - 1) * grid.ny];
        for (int i = 0; i < grid.ny; ++i) {
            const double floor = -obstacle_floor[i];
            if (trial[i] < floor) {
                eta[i] = (floor - trial[i]) / grid.dt;
                out[i] = floor;
            } else {
                out[i] = trial[i];
            }
        }
    }
    return sol;
}

}  // namespace stefan
