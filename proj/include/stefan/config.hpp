#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace stefan {

/// Which variant of the moving-boundary model is simulated.
enum class CaseId {
    Case1Signed,       // signed density, both sides reflected, opposite noise signs
    Case2Reflected,    // non-negative density, both sides reflected, same noise sign
    Case3Unreflected,  // signed density, no reflection
};

/// Uniform discretization of the fixed interval (0, lambda) and of [0, T].
/// Interior nodes sit at y_i = i*dy, i = 1..ny; the endpoints are ghost values.
struct GridSpec {
    int ny = 0;       // interior node count
    double dy = 0.0;  // spacing, dy*(ny+1) == lambda
    int nt = 0;       // time step count
    double dt = 0.0;  // step, dt*nt == horizon

    static GridSpec make(int ny, int nt, double lambda, double horizon);
};

enum class SigmaKind { Sine, Constant };

/// Noise-diffusion profile sigma(y). The sine profile vanishes at both
/// endpoints with a finite slope at 0. The constant profile is only valid
/// together with time_only noise (single Brownian shared by all cells).
struct SigmaProfile {
    SigmaKind kind = SigmaKind::Sine;
    double sigma0 = 0.0;
    bool time_only = false;
};

enum class ProfileKind { Zero, Sine, Linear };

/// Initial data v(y,0). Sine: amplitude*sin(pi*y/lambda). Linear:
/// (amplitude/lambda)*y, a ramp whose value at y = lambda acts as a
/// far-field plateau held by the right ghost node.
struct InitialProfile {
    ProfileKind kind = ProfileKind::Sine;
    double amplitude = 0.0;
};

struct ModelConfig {
    CaseId case_id = CaseId::Case2Reflected;
    double alpha = 1.0;       // liquidity coefficient (diffusivity)
    double lambda = 1.0;      // domain length, == b - a
    double a = 0.0;           // physical domain left endpoint
    double b = 1.0;           // physical domain right endpoint
    double s_plus_0 = 0.6;    // initial ask boundary
    double s_minus_0 = 0.4;   // initial bid boundary
    SigmaProfile sigma_profile;
    InitialProfile initial_profile;
    double grad_bound_M = 1.0;  // boundary-gradient stopping level
    double horizon_T = 1.0;
    GridSpec grid;
    std::uint64_t seed = 0;
    bool shared_noise = false;  // drive both fields with one noise sheet

    double initial_spread() const { return s_plus_0 - s_minus_0; }
};

enum class Side { Plus, Minus };

/// Map an offset y in [0, lambda] back to a price x in the physical domain.
/// Side::Plus measures to the right of the ask, Side::Minus to the left of
/// the bid. Throws std::domain_error when y is outside [0, lambda].
double to_physical(double y, Side side, double s_plus, double s_minus, double lambda);

/// Inverse of to_physical on the matching branch.
double to_offset(double x, Side side, double s_plus, double s_minus, double lambda);

/// Evaluate the initial profile at offset y.
double profile_at(const InitialProfile& profile, double y, double lambda);

/// Evaluate the noise-diffusion profile at offset y.
/// Throws std::domain_error when y is outside [0, lambda].
double sigma_at(const SigmaProfile& profile, double y, double lambda);

/// Check every structural invariant of the configuration. Returns one
/// message per violated invariant, naming the offending field; an empty
/// list means the config is usable as-is.
std::vector<std::string> validate_config(const ModelConfig& cfg);

/// Parse a config from a JSON document. Unknown keys are an error.
/// Throws std::invalid_argument with a descriptive message on any
/// structural problem; validate_config is applied afterwards by callers.
ModelConfig config_from_json_text(const std::string& text);

/// Serialize the config back to canonical JSON (used for manifests).
std::string config_to_json_text(const ModelConfig& cfg);

/// FNV-1a hash of the canonical JSON form, as a hex string.
std::string config_hash(const ModelConfig& cfg);

enum class StopKind {
    GradientBound,
    SpreadNonNegativity,
    SpreadAreaLeft,
    SpreadAreaRight,
};

/// First constraint violation observed along a trajectory.
struct StopEvent {
    StopKind kind = StopKind::GradientBound;
    int step_index = 0;
    double time = 0.0;
    double triggering_value = 0.0;
};

const char* stop_kind_name(StopKind kind);

}  // namespace stefan
