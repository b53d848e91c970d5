#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stefan/config.hpp"
#include "stefan/meanfield.hpp"
#include "stefan/sim.hpp"

namespace stefan {

struct PathRecord {
    int path_index = 0;
    std::optional<StopEvent> stop;
    bool blew_up = false;
    double blow_up_time = 0.0;
    int last_index = 0;
    double terminal_time = 0.0;
    double terminal_spread = 0.0;
    double terminal_s_plus = 0.0;
    double terminal_s_minus = 0.0;
};

/// Aggregated statistics of an ensemble on the shared time grid. A path
/// contributes to the time-t row only while its stop (or blow-up) time
/// exceeds t; rows end once no path survives.
struct EnsembleSummary {
    int n_paths = 0;
    std::vector<double> times;
    std::vector<int> n_alive;
    std::vector<double> mean_spread;
    std::vector<double> q10, q50, q90;  // nearest-rank quantiles over survivors
    std::vector<double> survival;       // fraction of paths not yet stopped
    std::map<std::string, int> stop_histogram;  // per stop kind, plus "none" and "blow_up"
    std::vector<PathRecord> records;
};

/// Run n_paths independent trajectories on a worker pool and aggregate.
/// Path index keys the noise streams, so the result is independent of the
/// thread count; STEFAN_SPREAD_THREADS caps the workers. A blow-up in one
/// path is recorded and does not abort the ensemble.
EnsembleSummary run_ensemble(const ModelConfig& cfg, int n_paths);

int worker_count_from_env(int n_jobs);

// RFC-4180 CSV with LF line endings and 17 significant digits.
std::string format_double(double value);
void write_trajectory_csv(const StefanTrajectory& traj, const std::string& file);
void write_snapshot_csv(const StefanTrajectory::Snapshot& snap, const GridSpec& grid,
                        const std::string& file);
void write_stop_json(const std::optional<StopEvent>& stop, const std::string& file);
void write_summary_csv(const EnsembleSummary& summary, const std::string& file);
void write_path_records_csv(const EnsembleSummary& summary, const std::string& file);
void write_histogram_json(const EnsembleSummary& summary, const std::string& file);
void write_meanfield_csv(const MeanFieldPath& path, const std::string& file);
void write_manifest(const ModelConfig& cfg, const std::string& command,
                    const std::string& file);

extern const char* const kVersion;

}  // namespace stefan
