#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "wedgemix/mixing.hpp"
#include "wedgemix/schedule.hpp"

namespace wedgemix {

/// Standard: stop as soon as the trajectory hits the stop level (or
/// max_steps, marking the run incomplete). Extended: always run to
/// `horizon` steps for post-plateau inspection.
enum class RunMode { Standard, Extended };

/// Auto picks Packed when the grid supports it (n_exp >= 6), else the
/// byte-per-cell Reference engine. Both produce identical trajectories.
enum class Engine { Auto, Packed, Reference };

struct RunLimits {
    std::int64_t max_steps = 400;
    RunMode mode = RunMode::Standard;
    std::int64_t horizon = 0;  // extended mode only
};

struct AnalysisParams {
    Kappa kappa{};
    std::int64_t regression_start = 8;
    std::int64_t stop_offset = 5;  // stop level is n_exp - stop_offset
};

struct RateFit {
    double rate = 0;
    double r_squared = 0;
};

/// Ordinary least squares through (k, -n_k) for k in
/// [regression_start, t10], both inclusive. rate = -slope, so decaying
/// scales give positive rates; r_squared = 1 - SS_res/SS_tot, with
/// r_squared := 1 for a constant window. Sums are exact for integer
/// trajectories of any realistic length (magnitudes stay far below
/// 2^53). Throws if the window has fewer than 3 points or runs past the
/// end of the trajectory.
RateFit fit_rate(std::span<const double> n_by_k, std::int64_t regression_start,
                 std::int64_t t10);
RateFit fit_rate(std::span<const int> n_by_k, std::int64_t regression_start, std::int64_t t10);

struct RunResult {
    ScheduleConfig config;
    std::uint64_t run_seed = 0;
    /// n_k for k = 0..end; n_0 = 0 for the initial datum.
    std::vector<int> trajectory;
    /// Blocks consumed, in order: the schedule log payload.
    std::vector<Block> schedule;
    /// First k with n_k >= n_exp - stop_offset, when attained.
    std::optional<std::int64_t> t10;
    std::optional<double> rate;
    std::optional<double> r_squared;
    bool completed = false;
    /// Completed, but T10 came before regression_start + 2: no fit.
    bool degenerate = false;
};

RunResult run_simulation(const ScheduleConfig& config, const RunLimits& limits,
                         const AnalysisParams& params, Engine engine = Engine::Auto);

/// Same dynamics driven by an explicit block list (schedule-log
/// replay) instead of the RNG.
RunResult replay_simulation(const ScheduleConfig& config, const std::vector<Block>& blocks,
                            const RunLimits& limits, const AnalysisParams& params,
                            Engine engine = Engine::Auto);

struct EnsembleSummary {
    std::int64_t runs_requested = 0;
    std::int64_t runs_completed = 0;
    std::int64_t runs_with_rate = 0;
    // Sample statistics (divisor n-1); NaN when no qualifying runs.
    double mean_rate = 0, std_rate = 0;
    double mean_r2 = 0, std_r2 = 0;
    double mean_t10 = 0, std_t10 = 0;
    /// Per-time statistics of n_k over the runs that recorded time k.
    std::vector<double> time_mean;
    std::vector<double> time_std;
    std::vector<std::int64_t> time_count;
};

struct EnsembleResult {
    ScheduleConfig config;  // template; per-run configs differ in run_index
    RunLimits limits;
    AnalysisParams params;
    EnsembleSummary summary;
    std::vector<RunResult> runs;
};

using RunCallback = std::function<void(const RunResult&)>;

/// Runs `runs` independent simulations with run_index 0..runs-1 and
/// aggregates. Rate and r^2 statistics cover runs with a fit; T10
/// statistics cover runs that attained the stop level. on_run (if set)
/// observes each result as it finishes, in run order.
EnsembleResult run_ensemble(const ScheduleConfig& config_template, std::int64_t runs,
                            const RunLimits& limits, const AnalysisParams& params,
                            Engine engine = Engine::Auto, const RunCallback& on_run = {});

/// Fixed-horizon ensemble for post-plateau behavior; equivalent to
/// run_ensemble with mode = Extended.
EnsembleResult extended_ensemble(const ScheduleConfig& config_template, std::int64_t horizon,
                                 std::int64_t runs, const AnalysisParams& params,
                                 Engine engine = Engine::Auto, const RunCallback& on_run = {});

}  // namespace wedgemix
