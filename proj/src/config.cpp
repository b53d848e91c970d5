#include "stefan/config.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace stefan {

using nlohmann::json;

GridSpec GridSpec::make(int ny, int nt, double lambda, double horizon) {
    GridSpec g;
    g.ny = ny;
    g.nt = nt;
    g.dy = lambda / (ny + 1);
    g.dt = horizon / nt;
    return g;
}

double to_physical(double y, Side side, double s_plus, double s_minus, double lambda) {
    if (y < 0.0 || y > lambda) {
        throw std::domain_error("to_physical: offset y outside [0, lambda]");
    }
    return side == Side::Plus ? y + s_plus : s_minus - y;
}

double to_offset(double x, Side side, double s_plus, double s_minus, double lambda) {
    const double y = side == Side::Plus ? x - s_plus : s_minus - x;
    if (y < -1e-12 || y > lambda + 1e-12) {
        throw std::domain_error("to_offset: price x outside the branch range");
    }
    return y;
}

double profile_at(const InitialProfile& profile, double y, double lambda) {
    switch (profile.kind) {
        case ProfileKind::Zero:
            return 0.0;
        case ProfileKind::Sine:
            return profile.amplitude * std::sin(M_PI * y / lambda);
        case ProfileKind::Linear:
            return profile.amplitude / lambda * y;
    }
    return 0.0;
}

double sigma_at(const SigmaProfile& profile, double y, double lambda) {
    if (y < 0.0 || y > lambda) {
        throw std::domain_error("sigma_at: offset y outside [0, lambda]");
    }
    if (profile.kind == SigmaKind::Constant) {
        return profile.sigma0;
    }
    return profile.sigma0 * std::sin(M_PI * y / lambda);
}

std::vector<std::string> validate_config(const ModelConfig& cfg) {
    std::vector<std::string> errors;
    auto fail = [&errors](const std::string& msg) { errors.push_back(msg); };

    if (!(cfg.alpha > 0.0)) fail("alpha must be positive");
    if (!(cfg.b - cfg.a > 0.0)) fail("b must exceed a");
    if (std::abs(cfg.lambda - (cfg.b - cfg.a)) > 1e-12 * std::max(1.0, std::abs(cfg.lambda))) {
        fail("lambda must equal b - a");
    }
    if (!(cfg.a < cfg.s_minus_0)) fail("s_minus_0 must exceed a");
    if (!(cfg.s_minus_0 <= cfg.s_plus_0)) fail("s_minus_0 > s_plus_0");
    if (!(cfg.s_plus_0 < cfg.b)) fail("s_plus_0 must be below b");
    if (!(cfg.initial_spread() < cfg.lambda)) fail("initial spread must be below lambda");
    if (!(cfg.grad_bound_M > 0.0)) fail("grad_bound_M must be positive");
    if (!(cfg.horizon_T > 0.0)) fail("horizon_T must be positive");

    if (cfg.grid.ny < 4) fail("grid.ny must be at least 4");
    if (cfg.grid.nt < 1) fail("grid.nt must be at least 1");
    if (cfg.grid.ny >= 4 && cfg.lambda > 0.0) {
        if (std::abs(cfg.grid.dy * (cfg.grid.ny + 1) - cfg.lambda) > 1e-12 * cfg.lambda) {
            fail("grid.dy*(ny+1) must equal lambda");
        }
        // advection stability for the explicit upwinded drift, speed capped at M
        if (cfg.grid.dt * cfg.grad_bound_M / cfg.grid.dy > 0.5 + 1e-12) {
            fail("grid.dt*grad_bound_M/grid.dy must not exceed 1/2");
        }
    }

    // noise diffusion must vanish at both endpoints with a finite slope at 0,
    // checked by evaluation; the constant profile is exempt in time-only mode
    if (cfg.sigma_profile.kind == SigmaKind::Constant && !cfg.sigma_profile.time_only) {
        fail("sigma_profile: sigma(0) != 0 (constant profile requires time_only noise)");
    }
    if (cfg.sigma_profile.time_only && cfg.sigma_profile.kind != SigmaKind::Constant) {
        fail("sigma_profile: time_only noise requires the constant profile");
    }
    if (!cfg.sigma_profile.time_only && cfg.grid.ny >= 1 && cfg.lambda > 0.0) {
        const double s0 = sigma_at(cfg.sigma_profile, 0.0, cfg.lambda);
        const double sl = sigma_at(cfg.sigma_profile, cfg.lambda, cfg.lambda);
        if (std::abs(s0) > 1e-14) fail("sigma_profile: sigma(0) != 0");
        if (std::abs(sl) > 1e-12) fail("sigma_profile: sigma(lambda) != 0");
        const double y1 = cfg.grid.dy;
        if (!std::isfinite(sigma_at(cfg.sigma_profile, y1, cfg.lambda) / y1)) {
            fail("sigma_profile: slope at 0 not finite");
        }
    }
    if (cfg.sigma_profile.sigma0 < 0.0) fail("sigma_profile.sigma0 must be non-negative");

    // initial data: the ramp carries a far-field plateau at y = lambda and is
    // only meaningful for the unreflected case; other profiles must vanish there
    if (cfg.initial_profile.kind == ProfileKind::Linear) {
        if (cfg.case_id != CaseId::Case3Unreflected) {
            fail("initial_profile: linear ramp is only valid for case3_unreflected");
        }
    } else if (cfg.lambda > 0.0) {
        if (std::abs(profile_at(cfg.initial_profile, cfg.lambda, cfg.lambda)) > 1e-12) {
            fail("initial_profile must vanish at y = lambda");
        }
    }
    if (cfg.case_id != CaseId::Case3Unreflected && cfg.initial_profile.amplitude < 0.0) {
        fail("initial_profile.amplitude must be non-negative for reflected cases");
    }

    return errors;
}

namespace {

const std::map<std::string, CaseId> kCaseNames = {
    {"case1_signed", CaseId::Case1Signed},
    {"case2_reflected", CaseId::Case2Reflected},
    {"case3_unreflected", CaseId::Case3Unreflected},
};

std::string case_name(CaseId id) {
    for (const auto& [name, value] : kCaseNames) {
        if (value == id) return name;
    }
    return "?";
}

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::set<std::string>& required, const std::string& where) {
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key())) {
            throw std::invalid_argument("unknown key '" + item.key() + "' in " + where);
        }
    }
    for (const auto& key : required) {
        if (!obj.contains(key)) {
            throw std::invalid_argument("missing key '" + key + "' in " + where);
        }
    }
}

}  // namespace

ModelConfig config_from_json_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");

    require_keys(doc,
                 {"case_id", "alpha", "lambda", "a", "b", "s_plus_0", "s_minus_0",
                  "sigma_profile", "initial_profile", "grad_bound_M", "horizon_T", "grid",
                  "seed", "shared_noise"},
                 {"case_id", "alpha", "lambda", "a", "b", "s_plus_0", "s_minus_0",
                  "sigma_profile", "initial_profile", "grad_bound_M", "horizon_T", "grid",
                  "seed"},
                 "config");

    ModelConfig cfg;
    const std::string case_str = doc.at("case_id").get<std::string>();
    auto it = kCaseNames.find(case_str);
    if (it == kCaseNames.end()) {
        throw std::invalid_argument("case_id must be one of case1_signed, case2_reflected, "
                                    "case3_unreflected");
    }
    cfg.case_id = it->second;
    cfg.alpha = doc.at("alpha").get<double>();
    cfg.lambda = doc.at("lambda").get<double>();
    cfg.a = doc.at("a").get<double>();
    cfg.b = doc.at("b").get<double>();
    cfg.s_plus_0 = doc.at("s_plus_0").get<double>();
    cfg.s_minus_0 = doc.at("s_minus_0").get<double>();
    cfg.grad_bound_M = doc.at("grad_bound_M").get<double>();
    cfg.horizon_T = doc.at("horizon_T").get<double>();
    cfg.seed = doc.at("seed").get<std::uint64_t>();
    cfg.shared_noise = doc.value("shared_noise", false);

    const json& sp = doc.at("sigma_profile");
    require_keys(sp, {"kind", "sigma0", "time_only"}, {"kind", "sigma0"}, "sigma_profile");
    const std::string sig_kind = sp.at("kind").get<std::string>();
    if (sig_kind == "sine") {
        cfg.sigma_profile.kind = SigmaKind::Sine;
    } else if (sig_kind == "constant") {
        cfg.sigma_profile.kind = SigmaKind::Constant;
    } else {
        throw std::invalid_argument("sigma_profile.kind must be 'sine' or 'constant'");
    }
    cfg.sigma_profile.sigma0 = sp.at("sigma0").get<double>();
    cfg.sigma_profile.time_only = sp.value("time_only", false);

    const json& ip = doc.at("initial_profile");
    require_keys(ip, {"kind", "amplitude"}, {"kind", "amplitude"}, "initial_profile");
    const std::string prof_kind = ip.at("kind").get<std::string>();
    if (prof_kind == "zero") {
        cfg.initial_profile.kind = ProfileKind::Zero;
    } else if (prof_kind == "sine") {
        cfg.initial_profile.kind = ProfileKind::Sine;
    } else if (prof_kind == "linear") {
        cfg.initial_profile.kind = ProfileKind::Linear;
    } else {
        throw std::invalid_argument("initial_profile.kind must be 'zero', 'sine' or 'linear'");
    }
    cfg.initial_profile.amplitude = ip.at("amplitude").get<double>();

    const json& grid = doc.at("grid");
    require_keys(grid, {"ny", "nt"}, {"ny", "nt"}, "grid");
    const int ny = grid.at("ny").get<int>();
    const int nt = grid.at("nt").get<int>();
    if (ny < 1 || nt < 1) throw std::invalid_argument("grid.ny and grid.nt must be positive");
    cfg.grid = GridSpec::make(ny, nt, cfg.lambda, cfg.horizon_T);

    return cfg;
}

std::string config_to_json_text(const ModelConfig& cfg) {
    json doc;
    doc["case_id"] = case_name(cfg.case_id);
    doc["alpha"] = cfg.alpha;
    doc["lambda"] = cfg.lambda;
    doc["a"] = cfg.a;
    doc["b"] = cfg.b;
    doc["s_plus_0"] = cfg.s_plus_0;
    doc["s_minus_0"] = cfg.s_minus_0;
    doc["sigma_profile"] = {
        {"kind", cfg.sigma_profile.kind == SigmaKind::Sine ? "sine" : "constant"},
        {"sigma0", cfg.sigma_profile.sigma0},
        {"time_only", cfg.sigma_profile.time_only},
    };
    const char* prof = cfg.initial_profile.kind == ProfileKind::Zero    ? "zero"
                       : cfg.initial_profile.kind == ProfileKind::Sine ? "sine"
                                                                       : "linear";
    doc["initial_profile"] = {{"kind", prof}, {"amplitude", cfg.initial_profile.amplitude}};
    doc["grad_bound_M"] = cfg.grad_bound_M;
    doc["horizon_T"] = cfg.horizon_T;
    doc["grid"] = {{"ny", cfg.grid.ny}, {"nt", cfg.grid.nt}};
    doc["seed"] = cfg.seed;
    doc["shared_noise"] = cfg.shared_noise;
    return doc.dump(2);
}

std::string config_hash(const ModelConfig& cfg) {
    const std::string text = config_to_json_text(cfg);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

const char* stop_kind_name(StopKind kind) {
    switch (kind) {
        case StopKind::GradientBound: return "gradient_bound";
        case StopKind::SpreadNonNegativity: return "spread_non_negativity";
        case StopKind::SpreadAreaLeft: return "spread_area_left";
        case StopKind::SpreadAreaRight: return "spread_area_right";
    }
    return "?";
}

}  // namespace stefan
