#pragma once

#include <span>
#include <vector>

#include "stefan/config.hpp"

namespace stefan {

/// Dirichlet heat kernel for -alpha*Laplacian on (0, lambda) as a sine
/// series, truncated so the tail is below double precision for every
/// admissible evaluation time t >= t_min.
struct GreenSeries {
    double alpha = 1.0;
    double lambda = 1.0;
    double t_min = 1e-6;  // smallest admissible lag
    int n_terms = 0;

    /// Picks n_terms as the smallest n with alpha*(n*pi/lambda)^2*t_min > 32*ln(10).
    static GreenSeries make(double alpha, double lambda, double t_min);
};

/// n-th Dirichlet eigenvalue of -Laplacian on (0, lambda): (n*pi/lambda)^2.
double eigenvalue(int n, double lambda);

/// G(t, x, y). Throws std::domain_error for t < t_min or x, y outside [0, lambda].
double green_eval(const GreenSeries& gs, double t, double x, double y);

/// d/dx G(t, x, y), term-wise differentiated series. Same domain checks.
double grad_green_eval(const GreenSeries& gs, double t, double x, double y);

/// Grid-sampled sine transform pair for ny interior nodes: the transform is
/// the exact eigendecomposition of grid-sampled eigenfunctions, so the
/// round trip is identity to rounding.
class SineBasis {
public:
    SineBasis(const GridSpec& grid, double lambda);

    int modes() const { return ny_; }
    double lambda() const { return lambda_; }

    /// coeffs_n = dy * sum_i field_i * sin(n*pi*y_i/lambda)
    void forward(std::span<const double> field, std::span<double> coeffs) const;

    /// field_i = (2/lambda) * sum_n coeffs_n * sin(n*pi*y_i/lambda)
    void inverse(std::span<const double> coeffs, std::span<double> field) const;

    /// coeffs_n = (n*pi/lambda) * dy * sum_i field_i * cos(n*pi*y_i/lambda):
    /// the wavenumber-scaled cosine moments, i.e. the mode sources left by
    /// integrating a transported field against the kernel by parts.
    void forward_grad(std::span<const double> field, std::span<double> coeffs) const;

    /// Evaluate the sine expansion at an arbitrary offset y.
    double eval_at(std::span<const double> coeffs, double y) const;

private:
    int ny_;
    double lambda_;
    double dy_;
    std::vector<double> sin_;       // ny x ny, sin(n*pi*y_i/lambda)
    std::vector<double> grad_cos_;  // ny x ny, (n*pi/lambda)*cos(n*pi*y_i/lambda)
};

/// Semigroup action: sine transform, damp each mode by exp(-alpha*mu_n*t),
/// inverse transform. Exact on grid-sampled eigenfunctions for any t >= 0.
std::vector<double> heat_convolve(const GreenSeries& gs, const SineBasis& basis,
                                  std::span<const double> v0, double t);

/// Within-step treatment of the lagged kernel in time convolutions.
/// EndpointLag evaluates every source at the start of its step (lag >= dt).
/// ExactVariance scales each mode so the per-step mean-square transfer of
/// the kernel is reproduced exactly; this removes the O(sqrt(dt)) variance
/// deficit of the endpoint rule for white-in-time sources.
enum class ConvolutionPolicy { EndpointLag, ExactVariance };

/// Mode-space accumulator for integrals of the form
///   sum_{j<k} decay^{k-j-1} * gain ∘ source_j
/// i.e. a lagged heat convolution advanced one step at a time.
class ConvolutionAccumulator {
public:
    ConvolutionAccumulator(const GreenSeries& gs, int modes, double dt,
                           ConvolutionPolicy policy, double source_scale);

    /// state := decay ∘ state + gain ∘ source; source holds sine coefficients
    /// of the step's source term.
    void step(std::span<const double> source);

    std::span<const double> coeffs() const { return state_; }

private:
    std::vector<double> decay_;
    std::vector<double> gain_;
    std::vector<double> state_;
};

/// Walsh stochastic convolution of the kernel against sigma(z) W(dz, ds),
/// accumulated over `steps` time steps of the given noise path (nt x ny
/// increments, each N(0, dt*dy)). Returns the field at t = steps*dt.
std::vector<double> stochastic_convolution(const GreenSeries& gs, const SineBasis& basis,
                                           const GridSpec& grid,
                                           std::span<const double> sigma_values,
                                           std::span<const double> noise_path, int steps,
                                           ConvolutionPolicy policy = ConvolutionPolicy::ExactVariance);

}  // namespace stefan
