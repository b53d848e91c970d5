#include "stefan/green.hpp"

#include <cmath>
#include <stdexcept>

namespace stefan {

namespace {

constexpr double kTailExponent = 32.0 * 2.302585092994046;  // 32*ln(10)

void check_point(const GreenSeries& gs, double t, double x, double y) {
    if (t < gs.t_min) {
        throw std::domain_error(
            "green_eval: t below t_min; rebuild the GreenSeries with a smaller t_min");
    }
    if (x < 0.0 || x > gs.lambda || y < 0.0 || y > gs.lambda) {
        throw std::domain_error("green_eval: point outside [0, lambda]");
    }
}

}  // namespace

GreenSeries GreenSeries::make(double alpha, double lambda, double t_min) {
    if (!(alpha > 0.0) || !(lambda > 0.0) || !(t_min > 0.0)) {
        throw std::invalid_argument("GreenSeries: alpha, lambda, t_min must be positive");
    }
    GreenSeries gs;
    gs.alpha = alpha;
    gs.lambda = lambda;
    gs.t_min = t_min;
    const double n_real = lambda / M_PI * std::sqrt(kTailExponent / (alpha * t_min));
    gs.n_terms = static_cast<int>(std::ceil(n_real));
    return gs;
}

double eigenvalue(int n, double lambda) {
    if (n < 0) throw std::invalid_argument("eigenvalue: n must be non-negative");
    const double k = n * M_PI / lambda;
    return k * k;
}

double green_eval(const GreenSeries& gs, double t, double x, double y) {
    check_point(gs, t, x, y);
    double sum = 0.0;
    for (int n = 1; n <= gs.n_terms; ++n) {
        const double exponent = gs.alpha * eigenvalue(n, gs.lambda) * t;
        if (exponent > kTailExponent) break;
        sum += std::exp(-exponent) * std::sin(n * M_PI * x / gs.lambda) *
               std::sin(n * M_PI * y / gs.lambda);
    }
    return 2.0 / gs.lambda * sum;
}

double grad_green_eval(const GreenSeries& gs, double t, double x, double y) {
    check_point(gs, t, x, y);
    double sum = 0.0;
    for (int n = 1; n <= gs.n_terms; ++n) {
        const double exponent = gs.alpha * eigenvalue(n, gs.lambda) * t;
        if (exponent > kTailExponent) break;
        const double k = n * M_PI / gs.lambda;
        sum += std::exp(-exponent) * k * std::cos(k * x) * std::sin(k * y);
    }
    return 2.0 / gs.lambda * sum;
}

SineBasis::SineBasis(const GridSpec& grid, double lambda)
    : ny_(grid.ny), lambda_(lambda), dy_(grid.dy) {
    sin_.resize(static_cast<std::size_t>(ny_) * ny_);
    grad_cos_.resize(static_cast<std::size_t>(ny_) * ny_);
    for (int n = 1; n <= ny_; ++n) {
        const double k = n * M_PI / lambda_;
        for (int i = 1; i <= ny_; ++i) {
            const double y = i * dy_;
            sin_[static_cast<std::size_t>(n - 1) * ny_ + (i - 1)] = std::sin(k * y);
            grad_cos_[static_cast<std::size_t>(n - 1) * ny_ + (i - 1)] = k * std::cos(k * y);
        }
    }
}

void SineBasis::forward(std::span<const double> field, std::span<double> coeffs) const {
    for (int n = 0; n < ny_; ++n) {
        const double* row = &sin_[static_cast<std::size_t>(n) * ny_];
        double acc = 0.0;
        for (int i = 0; i < ny_; ++i) acc += row[i] * field[i];
        coeffs[n] = dy_ * acc;
    }
}

void SineBasis::inverse(std::span<const double> coeffs, std::span<double> field) const {
    const double scale = 2.0 / lambda_;
    for (int i = 0; i < ny_; ++i) field[i] = 0.0;
    for (int n = 0; n < ny_; ++n) {
        const double* row = &sin_[static_cast<std::size_t>(n) * ny_];
        const double c = scale * coeffs[n];
        if (c == 0.0) continue;
        for (int i = 0; i < ny_; ++i) field[i] += c * row[i];
    }
}

void SineBasis::forward_grad(std::span<const double> field, std::span<double> coeffs) const {
    for (int n = 0; n < ny_; ++n) {
        const double* row = &grad_cos_[static_cast<std::size_t>(n) * ny_];
        double acc = 0.0;
        for (int i = 0; i < ny_; ++i) acc += row[i] * field[i];
        coeffs[n] = dy_ * acc;
    }
}

double SineBasis::eval_at(std::span<const double> coeffs, double y) const {
    double acc = 0.0;
    for (int n = 1; n <= ny_; ++n) {
        acc += coeffs[n - 1] * std::sin(n * M_PI * y / lambda_);
    }
    return 2.0 / lambda_ * acc;
}

std::vector<double> heat_convolve(const GreenSeries& gs, const SineBasis& basis,
                                  std::span<const double> v0, double t) {
    if (t < 0.0) throw std::domain_error("heat_convolve: negative time");
    const int modes = basis.modes();
    std::vector<double> coeffs(modes), damped(modes), out(modes);
    basis.forward(v0, coeffs);
    for (int n = 1; n <= modes; ++n) {
        const double exponent = gs.alpha * eigenvalue(n, gs.lambda) * t;
        damped[n - 1] = exponent > kTailExponent ? 0.0 : coeffs[n - 1] * std::exp(-exponent);
    }
    basis.inverse(damped, out);
    return out;
}

ConvolutionAccumulator::ConvolutionAccumulator(const GreenSeries& gs, int modes, double dt,
                                               ConvolutionPolicy policy, double source_scale)
    : decay_(modes), gain_(modes), state_(modes, 0.0) {
    for (int n = 1; n <= modes; ++n) {
        const double x = gs.alpha * eigenvalue(n, gs.lambda) * dt;
        const double decay = x > kTailExponent ? 0.0 : std::exp(-x);
        decay_[n - 1] = decay;
        if (policy == ConvolutionPolicy::EndpointLag) {
            gain_[n - 1] = decay * source_scale;
        } else {
            // per-mode mean-square transfer of exp(-alpha*mu*(t-s)) over one step
            const double ms = x > 1e-8 ? -std::expm1(-2.0 * x) / (2.0 * x)
                                       : 1.0 - x + 2.0 * x * x / 3.0;
            gain_[n - 1] = std::sqrt(ms) * source_scale;
        }
    }
}

void ConvolutionAccumulator::step(std::span<const double> source) {
    for (std::size_t n = 0; n < state_.size(); ++n) {
        state_[n] = decay_[n] * state_[n] + gain_[n] * source[n];
    }
}

std::vector<double> stochastic_convolution(const GreenSeries& gs, const SineBasis& basis,
                                           const GridSpec& grid,
                                           std::span<const double> sigma_values,
                                           std::span<const double> noise_path, int steps,
                                           ConvolutionPolicy policy) {
    const int ny = grid.ny;
    ConvolutionAccumulator acc(gs, ny, grid.dt, policy, 1.0);
    std::vector<double> source(ny), coeffs(ny), out(ny);
    for (int k = 0; k < steps; ++k) {
        const double* dW = &noise_path[static_cast<std::size_t>(k) * ny];
        for (int i = 0; i < ny; ++i) source[i] = sigma_values[i] * dW[i] / grid.dy;
        basis.forward(source, coeffs);
        acc.step(coeffs);
    }
    std::vector<double> state(acc.coeffs().begin(), acc.coeffs().end());
    basis.inverse(state, out);
    return out;
}

}  // namespace stefan
