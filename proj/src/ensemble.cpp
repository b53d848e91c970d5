#include "stefan/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace stefan {

const char* const kVersion = "0.1.0";

int worker_count_from_env(int n_jobs) {
    int workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    if (const char* env = std::getenv("STEFAN_SPREAD_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) workers = std::min(workers, cap);
    }
    return std::min(workers, std::max(1, n_jobs));
}

namespace {

struct PathOutcome {
    PathRecord record;
    std::vector<double> spread;  // values up to last_index inclusive
};

double nearest_rank(std::vector<double>& sorted, double q) {
    const std::size_t n = sorted.size();
    std::size_t rank = static_cast<std::size_t>(std::ceil(q * n));
    if (rank < 1) rank = 1;
    if (rank > n) rank = n;
    return sorted[rank - 1];
}

}  // namespace

EnsembleSummary run_ensemble(const ModelConfig& cfg, int n_paths) {
    if (n_paths < 1) throw std::invalid_argument("run_ensemble: n_paths must be positive");
    {
        // reject bad configs here; workers must not throw for shared reasons
        const auto errors = validate_config(cfg);
        if (!errors.empty()) {
            throw std::invalid_argument("run_ensemble: invalid config: " + errors.front());
        }
    }

    std::vector<PathOutcome> outcomes(n_paths);
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int index = next.fetch_add(1);
            if (index >= n_paths) return;
            PathOutcome& out = outcomes[index];
            out.record.path_index = index;
            SimOptions options;
            options.path_index = static_cast<std::uint64_t>(index);
            try {
                StefanTrajectory traj = simulate(cfg, options);
                const int last = traj.last_index();
                out.record.stop = traj.stop;
                out.record.last_index = last;
                out.record.terminal_time = traj.times[last];
                out.record.terminal_spread = traj.spread[last];
                out.record.terminal_s_plus = traj.s_plus[last];
                out.record.terminal_s_minus = traj.s_minus[last];
                out.spread = std::move(traj.spread);
            } catch (const SolverBlowUp& e) {
                out.record.blew_up = true;
                out.record.blow_up_time = e.time;
                out.record.last_index = -1;
            }
        }
    };

    const int workers = worker_count_from_env(n_paths);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    EnsembleSummary summary;
    summary.n_paths = n_paths;
    summary.stop_histogram = {{"none", 0},
                              {stop_kind_name(StopKind::GradientBound), 0},
                              {stop_kind_name(StopKind::SpreadNonNegativity), 0},
                              {stop_kind_name(StopKind::SpreadAreaLeft), 0},
                              {stop_kind_name(StopKind::SpreadAreaRight), 0},
                              {"blow_up", 0}};
    for (const auto& out : outcomes) {
        summary.records.push_back(out.record);
        if (out.record.blew_up) {
            summary.stop_histogram["blow_up"] += 1;
        } else if (out.record.stop) {
            summary.stop_histogram[stop_kind_name(out.record.stop->kind)] += 1;
        } else {
            summary.stop_histogram["none"] += 1;
        }
    }

    // aggregate in path-index order; a path is alive at index k while its
    // stop index (or blow-up) lies strictly beyond k
    std::vector<double> alive_values;
    for (int k = 0; k <= cfg.grid.nt; ++k) {
        alive_values.clear();
        for (const auto& out : outcomes) {
            if (out.record.blew_up) continue;
            const bool alive = out.record.stop ? k < out.record.stop->step_index
                                               : k <= out.record.last_index;
            if (alive) alive_values.push_back(out.spread[k]);
        }
        if (alive_values.empty()) break;
        double mean = 0.0;
        for (double v : alive_values) mean += v;
        mean /= static_cast<double>(alive_values.size());
        std::sort(alive_values.begin(), alive_values.end());
        summary.times.push_back(k * cfg.grid.dt);
        summary.n_alive.push_back(static_cast<int>(alive_values.size()));
        summary.mean_spread.push_back(mean);
        summary.q10.push_back(nearest_rank(alive_values, 0.10));
        summary.q50.push_back(nearest_rank(alive_values, 0.50));
        summary.q90.push_back(nearest_rank(alive_values, 0.90));
        summary.survival.push_back(static_cast<double>(alive_values.size()) / n_paths);
    }
    return summary;
}

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& file) {
    std::ofstream out(file, std::ios::binary);  // binary keeps LF endings everywhere
    if (!out) throw std::runtime_error("cannot open output file: " + file);
    return out;
}

}  // namespace

void write_trajectory_csv(const StefanTrajectory& traj, const std::string& file) {
    std::ofstream out = open_out(file);
    out << "step,t,s_plus,s_minus,spread,g1,g2,eta1_total,eta2_total\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        out << k << ',' << format_double(traj.times[k]) << ','
            << format_double(traj.s_plus[k]) << ',' << format_double(traj.s_minus[k]) << ','
            << format_double(traj.spread[k]) << ',' << format_double(traj.g1[k]) << ','
            << format_double(traj.g2[k]) << ',' << format_double(traj.eta1_total[k]) << ','
            << format_double(traj.eta2_total[k]) << '\n';
    }
}

void write_snapshot_csv(const StefanTrajectory::Snapshot& snap, const GridSpec& grid,
                        const std::string& file) {
    std::ofstream out = open_out(file);
    out << "y,v1,v2\n";
    for (int i = 1; i <= grid.ny; ++i) {
        out << format_double(i * grid.dy) << ',' << format_double(snap.v1[i - 1]) << ','
            << format_double(snap.v2[i - 1]) << '\n';
    }
}

void write_stop_json(const std::optional<StopEvent>& stop, const std::string& file) {
    nlohmann::json doc;
    doc["stopped"] = stop.has_value();
    if (stop) {
        doc["kind"] = stop_kind_name(stop->kind);
        doc["step_index"] = stop->step_index;
        doc["time"] = stop->time;
        doc["triggering_value"] = stop->triggering_value;
    }
    open_out(file) << doc.dump(2) << '\n';
}

void write_summary_csv(const EnsembleSummary& summary, const std::string& file) {
    std::ofstream out = open_out(file);
    out << "step,t,n_alive,mean_spread,q10,q50,q90,survival\n";
    for (std::size_t k = 0; k < summary.times.size(); ++k) {
        out << k << ',' << format_double(summary.times[k]) << ',' << summary.n_alive[k] << ','
            << format_double(summary.mean_spread[k]) << ',' << format_double(summary.q10[k])
            << ',' << format_double(summary.q50[k]) << ',' << format_double(summary.q90[k])
            << ',' << format_double(summary.survival[k]) << '\n';
    }
}

void write_path_records_csv(const EnsembleSummary& summary, const std::string& file) {
    std::ofstream out = open_out(file);
    out << "path,stop_kind,stop_step,stop_time,terminal_time,terminal_spread,"
           "terminal_s_plus,terminal_s_minus\n";
    for (const auto& rec : summary.records) {
        out << rec.path_index << ',';
        if (rec.blew_up) {
            out << "blow_up,," << format_double(rec.blow_up_time) << ",,,,\n";
            continue;
        }
        if (rec.stop) {
            out << stop_kind_name(rec.stop->kind) << ',' << rec.stop->step_index << ','
                << format_double(rec.stop->time) << ',';
        } else {
            out << "none,,,";
        }
        out << format_double(rec.terminal_time) << ',' << format_double(rec.terminal_spread)
            << ',' << format_double(rec.terminal_s_plus) << ','
            << format_double(rec.terminal_s_minus) << '\n';
    }
}

void write_histogram_json(const EnsembleSummary& summary, const std::string& file) {
    nlohmann::json doc;
    doc["n_paths"] = summary.n_paths;
    doc["stop_histogram"] = summary.stop_histogram;
    open_out(file) << doc.dump(2) << '\n';
}

void write_meanfield_csv(const MeanFieldPath& path, const std::string& file) {
    std::ofstream out = open_out(file);
    out << "step,t,w_inf,spread\n";
    for (std::size_t k = 0; k < path.times.size(); ++k) {
        out << k << ',' << format_double(path.times[k]) << ',' << format_double(path.w_inf[k])
            << ',' << format_double(path.spread[k]) << '\n';
    }
}

void write_manifest(const ModelConfig& cfg, const std::string& command,
                    const std::string& file) {
    nlohmann::json doc;
    doc["config_hash"] = config_hash(cfg);
    doc["seed"] = cfg.seed;
    doc["version"] = kVersion;
    doc["command"] = command;
    doc["config"] = nlohmann::json::parse(config_to_json_text(cfg));
    open_out(file) << doc.dump(2) << '\n';
}

}  // namespace stefan
