#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "stefan/config.hpp"
#include "stefan/ensemble.hpp"
#include "stefan/green.hpp"
#include "stefan/meanfield.hpp"
#include "stefan/noise.hpp"
#include "stefan/picard.hpp"
#include "stefan/sim.hpp"
#include "stefan/spde.hpp"

#include "json.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadConfig = 1;
constexpr int kExitRuntime = 2;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    int paths = 1;
    std::vector<double> snapshot_times;
};

std::optional<stefan::ModelConfig> load_config(const CommonArgs& args) {
    std::ifstream in(args.config_path);
    if (!in) {
        std::cerr << "error: cannot read config file " << args.config_path << "\n";
        return std::nullopt;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    stefan::ModelConfig cfg;
    try {
        cfg = stefan::config_from_json_text(buffer.str());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return std::nullopt;
    }
    if (args.seed) cfg.seed = *args.seed;
    const auto errors = stefan::validate_config(cfg);
    if (!errors.empty()) {
        for (const auto& msg : errors) std::cerr << "config error: " << msg << "\n";
        return std::nullopt;
    }
    return cfg;
}

std::string out_path(const CommonArgs& args, const std::string& name) {
    return (std::filesystem::path(args.out_dir) / name).string();
}

int cmd_simulate(const CommonArgs& args, const std::string& command_line) {
    auto cfg = load_config(args);
    if (!cfg) return kExitBadConfig;
    std::filesystem::create_directories(args.out_dir);

    stefan::SimOptions options;
    options.snapshot_times = args.snapshot_times;
    stefan::StefanTrajectory traj;
    try {
        traj = stefan::simulate(*cfg, options);
    } catch (const stefan::SolverBlowUp& e) {
        std::cerr << "error: solver blow-up at t = " << e.time << "\n";
        return kExitRuntime;
    }

    stefan::write_trajectory_csv(traj, out_path(args, "trajectory.csv"));
    stefan::write_stop_json(traj.stop, out_path(args, "stop.json"));
    for (const auto& snap : traj.snapshots) {
        std::ostringstream name;
        name << "fields_step" << snap.step << ".csv";
        stefan::write_snapshot_csv(snap, cfg->grid, out_path(args, name.str()));
    }
    stefan::write_manifest(*cfg, command_line, out_path(args, "manifest.json"));

    if (traj.stop) {
        std::cout << "stopped: " << stefan::stop_kind_name(traj.stop->kind) << " at t = "
                  << traj.stop->time << " (step " << traj.stop->step_index << ")\n";
    } else {
        std::cout << "reached the horizon, terminal spread = "
                  << traj.spread.back() << "\n";
    }
    return kExitOk;
}

int cmd_ensemble(const CommonArgs& args, const std::string& command_line) {
    auto cfg = load_config(args);
    if (!cfg) return kExitBadConfig;
    std::filesystem::create_directories(args.out_dir);

    stefan::EnsembleSummary summary = stefan::run_ensemble(*cfg, args.paths);
    stefan::write_summary_csv(summary, out_path(args, "ensemble_summary.csv"));
    stefan::write_path_records_csv(summary, out_path(args, "paths.csv"));
    stefan::write_histogram_json(summary, out_path(args, "stop_histogram.json"));
    stefan::write_manifest(*cfg, command_line, out_path(args, "manifest.json"));

    std::cout << "paths: " << summary.n_paths << "\n";
    for (const auto& [kind, count] : summary.stop_histogram) {
        if (count > 0) std::cout << "  " << kind << ": " << count << "\n";
    }
    return kExitOk;
}

int cmd_picard_check(const CommonArgs& args, const std::string& command_line) {
    auto cfg = load_config(args);
    if (!cfg) return kExitBadConfig;
    std::filesystem::create_directories(args.out_dir);

    const stefan::GridSpec& grid = cfg->grid;
    stefan::PicardSetup setup;
    setup.alpha = cfg->alpha;
    setup.lambda = cfg->lambda;
    setup.trunc_M = cfg->grad_bound_M;
    setup.v0.resize(grid.ny);
    setup.sigma_values.resize(grid.ny);
    for (int i = 1; i <= grid.ny; ++i) {
        setup.v0[i - 1] = stefan::profile_at(cfg->initial_profile, i * grid.dy, cfg->lambda);
        setup.sigma_values[i - 1] = stefan::sigma_at(cfg->sigma_profile, i * grid.dy,
                                                     cfg->lambda);
    }

    const stefan::NoiseStream stream(cfg->seed, 0, 0);
    const std::vector<double> noise = stefan::sample_noise_path(stream, grid);
    const stefan::SineBasis basis(grid, cfg->lambda);

    stefan::PicardResult result;
    try {
        result = stefan::run_picard(noise, setup, grid, basis);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }

    {
        std::ofstream out(out_path(args, "picard_distances.csv"), std::ios::binary);
        out << "iteration,distance\n";
        for (std::size_t n = 0; n < result.report.distances.size(); ++n) {
            out << (n + 1) << ',' << stefan::format_double(result.report.distances[n]) << '\n';
        }
    }
    {
        nlohmann::json doc;
        doc["iterations"] = result.report.iterations;
        doc["converged"] = result.report.converged;
        doc["residual"] = result.report.residual;
        doc["distances"] = result.report.distances;
        std::ofstream out(out_path(args, "picard_report.json"), std::ios::binary);
        out << doc.dump(2) << '\n';
    }
    stefan::write_manifest(*cfg, command_line, out_path(args, "manifest.json"));

    std::cout << (result.report.converged ? "converged" : "not converged") << " after "
              << result.report.iterations << " sweeps, residual = "
              << result.report.residual << "\n";
    for (std::size_t n = 0; n < result.report.distances.size(); ++n) {
        std::cout << "  d_" << (n + 1) << " = " << result.report.distances[n] << "\n";
    }
    return result.report.converged ? kExitOk : kExitRuntime;
}

int cmd_meanfield(const CommonArgs& args, const std::string& command_line) {
    auto cfg = load_config(args);
    if (!cfg) return kExitBadConfig;
    std::filesystem::create_directories(args.out_dir);

    stefan::MeanFieldParams params;
    params.alpha = cfg->alpha;
    params.lambda = cfg->lambda;
    params.w0 = cfg->initial_profile.amplitude;
    params.spread0 = cfg->initial_spread();
    params.horizon = cfg->horizon_T;
    params.dt = cfg->grid.dt;
    params.seed = cfg->seed;

    stefan::MeanFieldPath path;
    try {
        path = stefan::simulate_meanfield(params);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadConfig;
    }
    stefan::write_meanfield_csv(path, out_path(args, "meanfield.csv"));
    stefan::write_manifest(*cfg, command_line, out_path(args, "manifest.json"));
    std::cout << "terminal w_inf = " << path.w_inf.back() << ", spread = "
              << path.spread.back() << "\n";
    return kExitOk;
}

double simpson(const std::vector<double>& f, double h) {
    double acc = f.front() + f.back();
    for (std::size_t i = 1; i + 1 < f.size(); ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * f[i];
    return acc * h / 3.0;
}

int cmd_kernel_test(const CommonArgs& args) {
    auto cfg = load_config(args);
    if (!cfg) return kExitBadConfig;

    const double alpha = cfg->alpha;
    const double lambda = cfg->lambda;
    const double t_min = 1e-5;
    const stefan::GreenSeries gs = stefan::GreenSeries::make(alpha, lambda, t_min);
    const stefan::GridSpec grid = stefan::GridSpec::make(127, 16, lambda, 1.0);
    const stefan::SineBasis basis(grid, lambda);
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    bool all_ok = true;
    auto report = [&all_ok](const std::string& name, double value, double bound) {
        const bool ok = value <= bound;
        all_ok = all_ok && ok;
        std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << value
                  << " (bound " << bound << ")\n";
    };

    {
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const double t = t_min + unif(rng) * 0.5;
            const double x = unif(rng) * lambda;
            const double y = unif(rng) * lambda;
            worst = std::max(worst, std::abs(stefan::green_eval(gs, t, x, y) -
                                             stefan::green_eval(gs, t, y, x)));
        }
        report("symmetry G(t,x,y)=G(t,y,x)", worst, 1e-13);
    }
    {
        // quadrature of G against the first eigenfunction vs its exact decay
        const int n_nodes = 2001;
        const double h = lambda / (n_nodes - 1);
        double worst = 0.0;
        for (double t : {0.01, 0.1, 0.5}) {
            for (double x : {0.25 * lambda, 0.5 * lambda, 0.8 * lambda}) {
                std::vector<double> f(n_nodes);
                for (int i = 0; i < n_nodes; ++i) {
                    const double y = i * h;
                    f[i] = stefan::green_eval(gs, t, x, y) * std::sin(M_PI * y / lambda);
                }
                const double expected = std::exp(-alpha * M_PI * M_PI * t / (lambda * lambda)) *
                                        std::sin(M_PI * x / lambda);
                worst = std::max(worst, std::abs(simpson(f, h) - expected));
            }
        }
        report("eigenfunction decay via quadrature", worst, 1e-10);
    }
    {
        const double h = 1e-5;
        double worst = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            const double t = t_min + unif(rng) * 0.2;
            const double x = h + unif(rng) * (lambda - 2 * h);
            const double y = unif(rng) * lambda;
            const double fd = (stefan::green_eval(gs, t, x + h, y) -
                               stefan::green_eval(gs, t, x - h, y)) / (2 * h);
            worst = std::max(worst, std::abs(fd - stefan::grad_green_eval(gs, t, x, y)));
        }
        report("gradient vs central difference", worst, 1e-6);
    }
    {
        std::vector<double> v0(grid.ny);
        for (int i = 1; i <= grid.ny; ++i) {
            v0[i - 1] = std::sin(3.0 * M_PI * i * grid.dy / lambda) +
                        0.3 * std::sin(7.0 * M_PI * i * grid.dy / lambda);
        }
        const auto two_steps = stefan::heat_convolve(
            gs, basis, stefan::heat_convolve(gs, basis, v0, 0.03), 0.07);
        const auto one_step = stefan::heat_convolve(gs, basis, v0, 0.1);
        double worst = 0.0;
        for (int i = 0; i < grid.ny; ++i) {
            worst = std::max(worst, std::abs(two_steps[i] - one_step[i]));
        }
        report("semigroup composition", worst, 1e-10);
    }
    {
        double most_negative = 0.0;
        for (int trial = 0; trial < 200; ++trial) {
            const double t = t_min + unif(rng) * 0.5;
            const double value = stefan::green_eval(gs, t, unif(rng) * lambda,
                                                    unif(rng) * lambda);
            most_negative = std::min(most_negative, value);
        }
        report("positivity (most negative value)", -most_negative, 1e-12);
    }
    {
        const int n_nodes = 2001;
        const double h = lambda / (n_nodes - 1);
        double worst = 0.0;
        for (double t : {t_min, 0.01, 0.1}) {
            for (double x : {0.3 * lambda, 0.5 * lambda, 0.9 * lambda}) {
                std::vector<double> f(n_nodes);
                for (int i = 0; i < n_nodes; ++i) {
                    f[i] = stefan::green_eval(gs, t, x, i * h);
                }
                worst = std::max(worst, simpson(f, h) - 1.0);
            }
        }
        report("mass bound (max integral minus 1)", worst, 1e-10);
    }
    {
        std::vector<double> field(grid.ny), coeffs(grid.ny), back(grid.ny);
        for (int i = 0; i < grid.ny; ++i) field[i] = 2.0 * unif(rng) - 1.0;
        basis.forward(field, coeffs);
        basis.inverse(coeffs, back);
        double worst = 0.0;
        for (int i = 0; i < grid.ny; ++i) worst = std::max(worst, std::abs(back[i] - field[i]));
        report("sine transform round trip", worst, 1e-12);
    }

    return all_ok ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic moving-boundary spread simulator"};
    app.set_version_flag("--version", stefan::kVersion);
    app.require_subcommand(1);

    CommonArgs args;
    auto add_common = [&args](CLI::App* sub, bool with_paths) {
        sub->add_option("--config", args.config_path, "config JSON file")->required();
        sub->add_option("--out", args.out_dir, "output directory");
        sub->add_option("--seed", args.seed, "override the config seed");
        if (with_paths) sub->add_option("--paths", args.paths, "number of ensemble paths");
        sub->add_option("--snapshot-times", args.snapshot_times,
                        "comma-separated field snapshot times")->delimiter(',');
    };

    CLI::App* sim = app.add_subcommand("simulate", "run one trajectory");
    add_common(sim, false);
    CLI::App* ens = app.add_subcommand("ensemble", "run a Monte Carlo ensemble");
    add_common(ens, true);
    CLI::App* pic = app.add_subcommand("picard-check", "fixed-point verification harness");
    add_common(pic, false);
    CLI::App* mf = app.add_subcommand("meanfield", "far-field SDE system");
    add_common(mf, false);
    CLI::App* ker = app.add_subcommand("kernel-test", "heat kernel property battery");
    add_common(ker, false);

    CLI11_PARSE(app, argc, argv);

    std::string command_line;
    for (int i = 0; i < argc; ++i) {
        if (i) command_line += ' ';
        command_line += argv[i];
    }

    try {
        if (sim->parsed()) return cmd_simulate(args, command_line);
        if (ens->parsed()) return cmd_ensemble(args, command_line);
        if (pic->parsed()) return cmd_picard_check(args, command_line);
        if (mf->parsed()) return cmd_meanfield(args, command_line);
        if (ker->parsed()) return cmd_kernel_test(args);
    } catch (const stefan::SolverBlowUp& e) {
        std::cerr << "error: solver blow-up at t = " << e.time << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
