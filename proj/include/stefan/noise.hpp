#pragma once

#include <cstdint>
#include <vector>

#include "stefan/config.hpp"

namespace stefan {

/// Counter-based Gaussian stream. Every draw is a pure function of
/// (seed, path, stream, step, index), so ensembles reproduce bit-exactly
/// regardless of scheduling and the two fields of one trajectory can use
/// disjoint streams without coordination.
class NoiseStream {
public:
    NoiseStream(std::uint64_t seed, std::uint64_t path, std::uint64_t stream)
        : seed_(seed), path_(path), stream_(stream) {}

    /// Standard normal draw for (step, index), Box-Muller over two hashed
    /// 64-bit counters.
    double gaussian(std::uint64_t step, std::uint64_t index) const;

    std::uint64_t seed() const { return seed_; }
    std::uint64_t path() const { return path_; }
    std::uint64_t stream() const { return stream_; }

private:
    std::uint64_t seed_;
    std::uint64_t path_;
    std::uint64_t stream_;
};

/// One time step of discrete space-time white noise: ny independent
/// increments, each N(0, dt*dy).
struct NoiseSlice {
    std::vector<double> dW;
    int step_index = 0;
};

/// Sample the slice for a given step. Deterministic in (stream, step).
NoiseSlice sample_slice(const NoiseStream& stream, const GridSpec& grid, int step);

/// Time-only mode: a single N(0, dt) increment shared by every cell.
double sample_time_increment(const NoiseStream& stream, const GridSpec& grid, int step);

/// Full noise path as an nt x ny row-major matrix of increments,
/// row k being the slice driving the step from t_k to t_{k+1}.
std::vector<double> sample_noise_path(const NoiseStream& stream, const GridSpec& grid);

}  // namespace stefan
