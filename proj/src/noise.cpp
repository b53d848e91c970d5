#include "stefan/noise.hpp"

#include <cmath>

namespace stefan {

namespace {

// splitmix64 finalizer; full avalanche on 64 bits
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t key_hash(std::uint64_t seed, std::uint64_t path, std::uint64_t stream,
                              std::uint64_t step, std::uint64_t counter) {
    std::uint64_t h = mix64(seed ^ 0x6a09e667f3bcc909ull);
    h = mix64(h ^ path);
    h = mix64(h ^ (stream + 0x243f6a8885a308d3ull));
    h = mix64(h ^ step);
    h = mix64(h ^ counter);
    return h;
}

inline double to_unit(std::uint64_t bits) {
    // (0, 1]: keeps log() finite in Box-Muller
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1p-53;
}

}  // namespace

double NoiseStream::gaussian(std::uint64_t step, std::uint64_t index) const {
    const double u1 = to_unit(key_hash(seed_, path_, stream_, step, 2 * index));
    const double u2 = to_unit(key_hash(seed_, path_, stream_, step, 2 * index + 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

NoiseSlice sample_slice(const NoiseStream& stream, const GridSpec& grid, int step) {
    NoiseSlice slice;
    slice.step_index = step;
    slice.dW.resize(grid.ny);
    const double scale = std::sqrt(grid.dt * grid.dy);
    for (int i = 0; i < grid.ny; ++i) {
        slice.dW[i] = scale * stream.gaussian(static_cast<std::uint64_t>(step),
                                              static_cast<std::uint64_t>(i));
    }
    return slice;
}

double sample_time_increment(const NoiseStream& stream, const GridSpec& grid, int step) {
    return std::sqrt(grid.dt) * stream.gaussian(static_cast<std::uint64_t>(step), 0);
}

std::vector<double> sample_noise_path(const NoiseStream& stream, const GridSpec& grid) {
    std::vector<double> path(static_cast<std::size_t>(grid.nt) * grid.ny);
    const double scale = std::sqrt(grid.dt * grid.dy);
    for (int k = 0; k < grid.nt; ++k) {
        for (int i = 0; i < grid.ny; ++i) {
            path[static_cast<std::size_t>(k) * grid.ny + i] =
                scale * stream.gaussian(static_cast<std::uint64_t>(k),
                                        static_cast<std::uint64_t>(i));
        }
    }
    return path;
}

}  // namespace stefan
