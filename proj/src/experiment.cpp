#include "wedgemix/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "wedgemix/advection.hpp"

namespace wedgemix {

namespace {

RateFit fit_window(std::span<const double> n_by_k, std::int64_t start, std::int64_t t10) {
    if (start < 0) throw std::invalid_argument("regression_start must be >= 0");
    if (t10 < start + 2) {
        throw std::invalid_argument("regression window [" + std::to_string(start) + ", " +
                                    std::to_string(t10) + "] has fewer than 3 points");
    }
    if (t10 >= static_cast<std::int64_t>(n_by_k.size())) {
        throw std::invalid_argument("trajectory ends before T10 = " + std::to_string(t10));
    }
    const double m = static_cast<double>(t10 - start + 1);
    double sk = 0, sy = 0, skk = 0, sky = 0, syy = 0;
    for (std::int64_t k = start; k <= t10; ++k) {
        const double kd = static_cast<double>(k);
        const double y = -n_by_k[static_cast<std::size_t>(k)];
        sk += kd;
        sy += y;
        skk += kd * kd;
        sky += kd * y;
        syy += y * y;
    }
    // Scaled second moments: slope = B/A, r^2 = B^2/(A*C) (the usual
    // 1 - SS_res/SS_tot identity). A > 0 since the k are distinct.
    const double a = m * skk - sk * sk;
    const double b = m * sky - sk * sy;
    const double c = m * syy - sy * sy;
    RateFit out;
    out.rate = -b / a;
    out.r_squared = (c == 0) ? 1.0 : (b * b) / (a * c);
    return out;
}

struct SimulationEngine {
    std::function<void(Direction, Phase)> step;
    std::function<int()> measure;
};

bool resolve_packed(Engine engine, GridExponent n_exp) {
    switch (engine) {
        case Engine::Packed:
            return true;
        case Engine::Reference:
            return false;
        case Engine::Auto:
            return n_exp.n >= 6;
    }
    throw std::logic_error("unreachable engine");
}

RunResult simulate(const ScheduleConfig& config, BlockSource& source, const RunLimits& limits,
                   const AnalysisParams& params, Engine engine) {
    if (limits.mode == RunMode::Standard && limits.max_steps < 1) {
        throw std::invalid_argument("max_steps must be >= 1");
    }
    if (limits.mode == RunMode::Extended && limits.horizon < 0) {
        throw std::invalid_argument("extended-mode horizon must be >= 0");
    }

    RunResult res;
    res.config = config;
    res.run_seed = derive_run_seed(config.master_seed, config.run_index);

    // Engine state lives in whichever branch is active; the closures
    // keep the main loop engine-agnostic.
    std::optional<PackedField> packed;
    PackedMixingScratch scratch;
    std::optional<Field> field;
    SimulationEngine eng;
    if (resolve_packed(engine, config.n_exp)) {
        packed.emplace(PackedField::initial_datum(config.n_exp));
        eng.step = [&](Direction d, Phase w) { packed->shear(d, w, FlowTime{1}); };
        eng.measure = [&]() { return mixing_scale_exponent(*packed, params.kappa, scratch); };
    } else {
        field.emplace(Field::initial_datum(config.n_exp));
        eng.step = [&](Direction d, Phase w) { *field = unit_shear_step(*field, d, w); };
        eng.measure = [&]() {
            BlockSumPyramid p(*field);
            return mixing_scale_exponent(p, params.kappa, field->sup_norm());
        };
    }

    const std::int64_t stop_level = config.n_exp.n - params.stop_offset;
    const std::int64_t total_steps =
        (limits.mode == RunMode::Standard) ? limits.max_steps : limits.horizon;

    const int n0 = eng.measure();
    res.trajectory.push_back(n0);
    if (n0 >= stop_level) res.t10 = 0;

    if (!(limits.mode == RunMode::Standard && res.t10)) {
        Block cur;
        std::int64_t remaining = 0;
        for (std::int64_t k = 1; k <= total_steps; ++k) {
            if (remaining == 0) {
                cur = source.next_block();
                res.schedule.push_back(cur);
                remaining = cur.duration;
            }
            eng.step(cur.direction, cur.phase);
            --remaining;
            const int n = eng.measure();
            res.trajectory.push_back(n);
            if (!res.t10 && n >= stop_level) {
                res.t10 = k;
                if (limits.mode == RunMode::Standard) break;
            }
        }
    }

    res.completed = (limits.mode == RunMode::Extended) || res.t10.has_value();
    if (res.completed && res.t10) {
        if (*res.t10 >= params.regression_start + 2) {
            const RateFit fit = fit_rate(res.trajectory, params.regression_start, *res.t10);
            res.rate = fit.rate;
            res.r_squared = fit.r_squared;
        } else {
            res.degenerate = true;
        }
    }
    return res;
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

/// Sample standard deviation (divisor n-1); 0 for a single value.
double std_of(const std::vector<double>& v, double mean) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    if (v.size() == 1) return 0.0;
    double s = 0;
    for (double x : v) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

RateFit fit_rate(std::span<const double> n_by_k, std::int64_t regression_start,
                 std::int64_t t10) {
    return fit_window(n_by_k, regression_start, t10);
}

RateFit fit_rate(std::span<const int> n_by_k, std::int64_t regression_start, std::int64_t t10) {
    std::vector<double> v(n_by_k.begin(), n_by_k.end());
    return fit_window(v, regression_start, t10);
}

RunResult run_simulation(const ScheduleConfig& config, const RunLimits& limits,
                         const AnalysisParams& params, Engine engine) {
    ScheduleGenerator gen(config);
    return simulate(config, gen, limits, params, engine);
}

RunResult replay_simulation(const ScheduleConfig& config, const std::vector<Block>& blocks,
                            const RunLimits& limits, const AnalysisParams& params,
                            Engine engine) {
    ReplaySchedule replay(blocks);
    return simulate(config, replay, limits, params, engine);
}

EnsembleResult run_ensemble(const ScheduleConfig& config_template, std::int64_t runs,
                            const RunLimits& limits, const AnalysisParams& params,
                            Engine engine, const RunCallback& on_run) {
    if (runs < 1) throw std::invalid_argument("runs must be >= 1");

    EnsembleResult res;
    res.config = config_template;
    res.limits = limits;
    res.params = params;
    res.runs.reserve(static_cast<std::size_t>(runs));

    for (std::int64_t i = 0; i < runs; ++i) {
        ScheduleConfig c = config_template;
        c.run_index = i;
        res.runs.push_back(run_simulation(c, limits, params, engine));
        if (on_run) on_run(res.runs.back());
    }

    EnsembleSummary& s = res.summary;
    s.runs_requested = runs;
    std::vector<double> rates, r2s, t10s;
    std::size_t max_len = 0;
    for (const RunResult& r : res.runs) {
        if (r.completed) ++s.runs_completed;
        if (r.rate) {
            rates.push_back(*r.rate);
            r2s.push_back(*r.r_squared);
        }
        if (r.t10) t10s.push_back(static_cast<double>(*r.t10));
        max_len = std::max(max_len, r.trajectory.size());
    }
    s.runs_with_rate = static_cast<std::int64_t>(rates.size());
    s.mean_rate = mean_of(rates);
    s.std_rate = std_of(rates, s.mean_rate);
    s.mean_r2 = mean_of(r2s);
    s.std_r2 = std_of(r2s, s.mean_r2);
    s.mean_t10 = mean_of(t10s);
    s.std_t10 = std_of(t10s, s.mean_t10);

    s.time_mean.resize(max_len);
    s.time_std.resize(max_len);
    s.time_count.resize(max_len);
    std::vector<double> at_k;
    for (std::size_t k = 0; k < max_len; ++k) {
        at_k.clear();
        for (const RunResult& r : res.runs) {
            if (k < r.trajectory.size()) at_k.push_back(r.trajectory[k]);
        }
        s.time_count[k] = static_cast<std::int64_t>(at_k.size());
        s.time_mean[k] = mean_of(at_k);
        s.time_std[k] = std_of(at_k, s.time_mean[k]);
    }
    return res;
}

EnsembleResult extended_ensemble(const ScheduleConfig& config_template, std::int64_t horizon,
                                 std::int64_t runs, const AnalysisParams& params, Engine engine,
                                 const RunCallback& on_run) {
    RunLimits limits;
    limits.mode = RunMode::Extended;
    limits.horizon = horizon;
    return run_ensemble(config_template, runs, limits, params, engine, on_run);
}

}  // namespace wedgemix
