#pragma once

#include <span>
#include <vector>

#include "stefan/config.hpp"

namespace stefan {

/// A grid field sampled at every time level: (nt+1) x ny, row k = time k*dt.
struct FieldPath {
    int ny = 0;
    int nt = 0;
    std::vector<double> data;

    FieldPath() = default;
    FieldPath(int ny_, int nt_) : ny(ny_), nt(nt_), data(static_cast<std::size_t>(nt_ + 1) * ny_, 0.0) {}

    std::span<double> row(int k) { return {data.data() + static_cast<std::size_t>(k) * ny, static_cast<std::size_t>(ny)}; }
    std::span<const double> row(int k) const { return {data.data() + static_cast<std::size_t>(k) * ny, static_cast<std::size_t>(ny)}; }
};

/// Solution of the constrained heat flow O_t = alpha*Lap(O) + eta with
/// O >= -u: the obstacle component of the splitting v = u + O, plus the
/// per-cell reflection mass rate realizing the constraint.
struct ObstacleSolution {
    FieldPath obstacle;             // O, zero initial data, zero boundary
    std::vector<double> eta_rate;   // nt x ny, mass per cell per unit time
};

/// Time-step the obstacle problem against the moving obstacle -u by implicit
/// heat steps followed by projection onto {O >= -u}. The projection makes
/// (u + O) * eta vanish cell-wise exactly. Requires u(.,0) >= 0 (so that the
/// constraint holds at t = 0 with O = 0); throws std::invalid_argument
/// otherwise.
ObstacleSolution solve_obstacle(const FieldPath& u, double alpha, const GridSpec& grid);

}  // namespace stefan
