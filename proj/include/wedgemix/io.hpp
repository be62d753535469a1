#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wedgemix/experiment.hpp"
#include "wedgemix/field.hpp"
#include "wedgemix/packed_field.hpp"
#include "wedgemix/schedule.hpp"

namespace wedgemix {

/// Everything a run or ensemble needs, as read from a config file plus
/// flag overrides.
struct ExperimentConfig {
    ScheduleConfig schedule;
    std::int64_t runs = 100;
    AnalysisParams params;
    RunLimits limits;
};

/// Applies one key=value pair; the single authority for config keys in
/// both config files and schedule-log headers. Throws on unknown keys
/// or unparseable values. Keys: flow_type, n_exp, tau, time_set, runs,
/// master_seed, run_index, kappa (num/den), regression_start,
/// stop_offset, max_steps, mode (standard|extended), horizon.
void apply_config_key(ExperimentConfig& config, const std::string& key,
                      const std::string& value);

/// Flat key=value text; blank lines and '#' comments ignored.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);
std::string config_to_text(const ExperimentConfig& config);

/// "3" for a plain flow time, "3+4" for an explicit set (CSV-safe).
std::string tau_label(const ScheduleConfig& schedule);
std::string kappa_label(Kappa kappa);

inline constexpr const char* kTrajectoryCsvHeader = "run_id,k,neg_log2_scale";
inline constexpr const char* kSummaryCsvHeader =
    "flow_type,tau,n_exp,runs_completed,mean_rate,std_rate,mean_r2,std_r2,mean_T10,std_T10,"
    "kappa,regression_start,stop_offset,seed,generator_id";

std::string trajectory_csv(const RunResult& run);
std::string summary_csv(const EnsembleResult& result);  // header + one row
std::string summary_csv_row(const EnsembleResult& result);

/// One trajectory as parsed back from CSV; values are doubles so
/// synthetic (non-integer) trajectories can be analyzed too.
struct TrajectorySeries {
    std::int64_t run_id = 0;
    std::vector<double> n_by_k;  // index k, starting at 0
};

/// Strict parse: exact header, contiguous per-run row groups, k
/// counting up from 0 within each run.
std::vector<TrajectorySeries> parse_trajectory_csv(const std::string& text);

/// Split a summary CSV back into per-row field lists (header checked).
std::vector<std::vector<std::string>> parse_summary_csv(const std::string& text);

/// Line-oriented schedule log: '# key=value' header (config echo,
/// generator id, seeds) then one 'index direction phase duration' line
/// per block. Replaying the block list reproduces the run bit for bit
/// on any conforming implementation, whatever its RNG.
std::string schedule_log_text(const ExperimentConfig& config, std::uint64_t run_seed,
                              const std::vector<Block>& blocks);

struct ScheduleLogData {
    ExperimentConfig config;
    std::string generator_id;
    std::uint64_t run_seed = 0;
    std::vector<Block> blocks;
};

ScheduleLogData parse_schedule_log(const std::string& text);

/// Sidecar notes for an ensemble output directory: config echo plus the
/// statistical conventions baked into the summary numbers.
std::string ensemble_metadata_text(const EnsembleResult& result);

/// One cell of the paper-matrix preset: a schedule template plus a
/// filesystem/CSV-safe label like "RSFT_tau3" or "FSRT_tau3+4".
struct MatrixCell {
    ScheduleConfig schedule;
    std::string label;
};

/// The full measurement matrix: every flow type at tau = 2..10 except
/// FSFT tau=2 (no exponential mixing there), then FSRT and RSRT with
/// the explicit time set {3,4}. Each cell gets its own master seed,
/// derived from base.master_seed by cell position, so cells are
/// decorrelated but the whole matrix is reproducible from one seed.
std::vector<MatrixCell> paper_matrix_cells(const ScheduleConfig& base);

/// Binary PPM (P6) snapshot. Each pixel covers a downsample x
/// downsample block (downsample must be a power of two dividing side);
/// the color interpolates yellow (-1) to blue (+1) linearly in the
/// block average. Row 0 of the image is the top of the torus (x2 near
/// 1); x1 grows rightward.
std::string render_ppm(const Field& f, std::int64_t downsample);
std::string render_ppm(const PackedField& f, std::int64_t downsample);

void render_field(const Field& f, const std::string& path, std::int64_t downsample);
void render_field(const PackedField& f, const std::string& path, std::int64_t downsample);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& bytes);

}  // namespace wedgemix
