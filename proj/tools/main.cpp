#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wedgemix/exact_maps.hpp"
#include "wedgemix/experiment.hpp"
#include "wedgemix/io.hpp"

namespace fs = std::filesystem;

namespace wedgemix {
namespace {

/// --config plus per-key override flags; flags win over the file.
struct ConfigFlags {
    std::string config_file;
    std::map<std::string, std::string> overrides;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_file, "flat key=value config file");
        auto add = [this, cmd](const char* flag, const char* key, const char* desc) {
            cmd->add_option_function<std::string>(
                flag, [this, key](const std::string& v) { overrides[key] = v; }, desc);
        };
        add("--flow-type", "flow_type", "FSFT, RSFT, FSRT or RSRT");
        add("--n-exp", "n_exp", "grid exponent N; the side is 2^N");
        add("--tau", "tau", "flow time (center of the random set for *SRT)");
        add("--time-set", "time_set", "explicit flow time set, e.g. 3,4");
        add("--runs", "runs", "number of ensemble runs");
        add("--master-seed", "master_seed", "64-bit master seed");
        add("--run-index", "run_index", "run index within the master stream");
        add("--kappa", "kappa", "mixedness threshold as num/den");
        add("--regression-start", "regression_start", "first time in the rate fit window");
        add("--stop-offset", "stop_offset", "stop once n_k >= n_exp - stop_offset");
        add("--max-steps", "max_steps", "standard-mode step cap");
        add("--mode", "mode", "standard or extended");
        add("--horizon", "horizon", "extended-mode step count");
    }

    ExperimentConfig resolve() const {
        ExperimentConfig config;
        if (!config_file.empty()) config = load_config_file(config_file);
        for (const auto& [key, value] : overrides) apply_config_key(config, key, value);
        return config;
    }
};

Engine parse_engine(const std::string& name) {
    if (name == "auto") return Engine::Auto;
    if (name == "packed") return Engine::Packed;
    if (name == "reference") return Engine::Reference;
    throw std::invalid_argument("engine must be auto, packed or reference, got '" + name + "'");
}

std::string run_file_stem(std::int64_t run_index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "run_%04lld", static_cast<long long>(run_index));
    return buf;
}

void write_run_files(const fs::path& dir, const ExperimentConfig& config,
                     const RunResult& run) {
    ExperimentConfig echo = config;
    echo.schedule = run.config;
    const std::string stem = run_file_stem(run.config.run_index);
    write_file((dir / (stem + "_trajectory.csv")).string(), trajectory_csv(run));
    write_file((dir / (stem + "_schedule.log")).string(),
               schedule_log_text(echo, run.run_seed, run.schedule));
}

std::string run_status_line(const RunResult& run) {
    std::string out = "run " + std::to_string(run.config.run_index) + ": ";
    if (!run.completed) {
        return out + "incomplete (stop level not reached within max_steps)";
    }
    out += "T10=" + std::to_string(*run.t10);
    if (run.degenerate) {
        return out + " degenerate (T10 before regression window, no rate)";
    }
    if (run.rate) {
        char buf[64];
        std::snprintf(buf, sizeof buf, " rate=%.4f r2=%.4f", *run.rate, *run.r_squared);
        out += buf;
    } else {
        out += " (no stop level attained before horizon, no rate)";
    }
    return out;
}

int cmd_run(const ConfigFlags& flags, const std::string& engine_name,
            const std::string& replay_path, const std::string& out_dir) {
    const Engine engine = parse_engine(engine_name);
    ExperimentConfig config;
    RunResult result;
    if (!replay_path.empty()) {
        ScheduleLogData log = parse_schedule_log(read_file(replay_path));
        config = log.config;
        for (const auto& [key, value] : flags.overrides) apply_config_key(config, key, value);
        result = replay_simulation(config.schedule, log.blocks, config.limits, config.params,
                                   engine);
    } else {
        config = flags.resolve();
        result = run_simulation(config.schedule, config.limits, config.params, engine);
    }
    fs::create_directories(out_dir);
    write_run_files(out_dir, config, result);
    std::cout << run_status_line(result) << "\n";
    return 0;
}

int cmd_ensemble(const ConfigFlags& flags, const std::string& engine_name,
                 const std::string& out_dir, bool paper_matrix, bool quiet) {
    const Engine engine = parse_engine(engine_name);
    const ExperimentConfig base = flags.resolve();
    fs::create_directories(out_dir);

    auto run_one_cell = [&](const ExperimentConfig& config, const fs::path& dir) {
        fs::create_directories(dir);
        const RunCallback on_run = [&](const RunResult& run) {
            write_run_files(dir, config, run);
            if (!quiet) std::cerr << run_status_line(run) << "\n";
        };
        EnsembleResult result = run_ensemble(config.schedule, config.runs, config.limits,
                                             config.params, engine, on_run);
        write_file((dir / "summary.csv").string(), summary_csv(result));
        write_file((dir / "metadata.txt").string(), ensemble_metadata_text(result));
        return result;
    };

    if (!paper_matrix) {
        EnsembleResult result = run_one_cell(base, out_dir);
        std::cout << summary_csv(result);
        return 0;
    }

    std::string matrix = kSummaryCsvHeader;
    matrix += '\n';
    for (const MatrixCell& cell : paper_matrix_cells(base.schedule)) {
        if (!quiet) std::cerr << "=== " << cell.label << " ===\n";
        ExperimentConfig config = base;
        config.schedule = cell.schedule;
        EnsembleResult result = run_one_cell(config, fs::path(out_dir) / cell.label);
        matrix += summary_csv_row(result);
    }
    const std::string matrix_path = (fs::path(out_dir) / "matrix_summary.csv").string();
    write_file(matrix_path, matrix);
    write_file((fs::path(out_dir) / "matrix_notes.txt").string(),
               "cells: all four flow types, tau 2..10, FSFT tau=2 excluded (no exponential\n"
               "mixing there), plus FSRT and RSRT with the explicit time set {3,4}.\n"
               "Each cell draws its own master seed from the top-level one; see the\n"
               "seed column of matrix_summary.csv and each cell's metadata.txt.\n");
    std::cout << matrix;
    return 0;
}

int cmd_analyze(const std::vector<std::string>& paths, std::int64_t regression_start,
                std::int64_t stop_offset, int n_exp, const std::string& out_path) {
    std::string out = "run_id,T10,rate,r_squared\n";
    std::vector<double> rates;
    for (const std::string& path : paths) {
        for (const TrajectorySeries& series : parse_trajectory_csv(read_file(path))) {
            std::optional<std::int64_t> t10;
            if (n_exp > 0) {
                const double stop_level = n_exp - stop_offset;
                for (std::size_t k = 0; k < series.n_by_k.size(); ++k) {
                    if (series.n_by_k[k] >= stop_level) {
                        t10 = static_cast<std::int64_t>(k);
                        break;
                    }
                }
            } else {
                t10 = static_cast<std::int64_t>(series.n_by_k.size()) - 1;
            }
            out += std::to_string(series.run_id) + ",";
            if (!t10) {
                std::cerr << "run " << series.run_id << " in " << path
                          << ": stop level never reached, no fit\n";
                out += ",,\n";
                continue;
            }
            out += std::to_string(*t10) + ",";
            if (*t10 < regression_start + 2) {
                std::cerr << "run " << series.run_id << " in " << path
                          << ": degenerate window [" << regression_start << ", " << *t10
                          << "], no fit\n";
                out += ",\n";
                continue;
            }
            const RateFit fit = fit_rate(series.n_by_k, regression_start, *t10);
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.10g,%.10g\n", fit.rate, fit.r_squared);
            out += buf;
            rates.push_back(fit.rate);
        }
    }
    if (out_path.empty()) {
        std::cout << out;
    } else {
        write_file(out_path, out);
    }
    std::cerr << "fitted " << rates.size() << " run(s)\n";
    return 0;
}

struct VerifySuite {
    std::string report;
    bool passed = true;

    void check(bool ok, const std::string& line) {
        report += (ok ? "ok   " : "FAIL ") + line + "\n";
        passed = passed && ok;
    }
};

int cmd_verify(int samples, const std::string& out_path) {
    const Rational zero(0);
    const Rational q14(BigInt(1), BigInt(4));
    const Rational q12(BigInt(1), BigInt(2));
    const Rational q34(BigInt(3), BigInt(4));
    const Rational q18(BigInt(1), BigInt(8));
    const Rational q58(BigInt(5), BigInt(8));
    const Rational q78(BigInt(7), BigInt(8));
    const Rational eps(BigInt(1), BigInt(64));

    const MapWord half_word2 = {{Direction::Horizontal, zero, 2}, {Direction::Vertical, zero, 2}};
    MapWord word2sq = half_word2;
    word2sq.insert(word2sq.end(), half_word2.begin(), half_word2.end());
    const MapWord word1 = {{Direction::Horizontal, zero, 1}, {Direction::Vertical, zero, 1}};
    MapWord word1cube;
    for (int i = 0; i < 3; ++i) word1cube.insert(word1cube.end(), word1.begin(), word1.end());

    VerifySuite suite;

    // Orbit Jacobians at the pinned sample points.
    const BranchMatrix m_diag = orbit_jacobian({q18, q78}, word2sq);
    suite.check(m_diag == BranchMatrix{-3, 4, -4, 5},
                "tau=2 word squared on the diagonal segment: " + to_string(m_diag));
    const BranchMatrix m_plus = orbit_jacobian({q18, q58 + eps}, word1cube);
    suite.check(m_plus == BranchMatrix{3, -2, 2, -1},
                "tau=1 word cubed just above the half-diagonal: " + to_string(m_plus));
    const BranchMatrix m_minus = orbit_jacobian({q18, q58 - eps}, word1cube);
    suite.check(m_minus == BranchMatrix{-1, 2, -2, 3},
                "tau=1 word cubed just below the half-diagonal: " + to_string(m_minus));

    for (const BranchMatrix& m : {m_diag, m_plus, m_minus}) {
        const JordanReport j = jordan_check(m);
        suite.check(j.similar_to_jordan_block && j.ones_vector_fixed,
                    "unipotent Jordan structure with fixed (1,1): " + to_string(m));
    }

    // Invariant segment cycles.
    const ExactSegment seg_a{{zero, q34}, Rational(1), Rational(1), zero, q14};
    const ExactSegment seg_b{{zero, q14}, Rational(1), Rational(1), q14, q12};
    const ExactSegment seg_c{{zero, q34}, Rational(1), Rational(-1), q12, q34};
    const ExactSegment seg_d{{zero, q14}, Rational(1), Rational(-1), q34, Rational(1)};
    const ExactSegment seg_1{{zero, q12}, Rational(1), Rational(1), zero, q12};
    const ExactSegment seg_2{{q12, zero}, Rational(0), Rational(1), zero, q12};
    const ExactSegment seg_3{{zero, q12}, Rational(1), Rational(0), q12, Rational(1)};

    auto report_cycle = [&](const std::vector<ExactSegment>& segs, const MapWord& word,
                            const std::string& what) {
        const CycleReport r = verify_segment_cycle(segs, word, samples);
        suite.check(r.passed, what + " (" + std::to_string(samples) + " samples per segment)");
        for (const CycleFailure& f : r.failures) {
            suite.report += "     segment " + std::to_string(f.segment) + " sample " +
                            std::to_string(f.sample) + " at " + to_string(f.point) + ": " +
                            f.reason + "\n";
        }
    };
    report_cycle({seg_a, seg_b}, half_word2, "tau=2 swap of the two rising segments");
    report_cycle({seg_c, seg_d}, half_word2, "tau=2 swap of the two falling segments");
    report_cycle({seg_1, seg_2, seg_3}, word1, "tau=1 three-cycle of fixed segments");

    suite.report += suite.passed ? "all structure checks passed\n"
                                 : "structure verification FAILED\n";
    if (out_path.empty()) {
        std::cout << suite.report;
    } else {
        write_file(out_path, suite.report);
    }
    return suite.passed ? 0 : 1;
}

int cmd_render(const ConfigFlags& flags, const std::string& log_path, std::int64_t time,
               std::int64_t downsample, const std::string& out_path) {
    if (time < 0) throw std::invalid_argument("time must be >= 0");

    ExperimentConfig config;
    std::unique_ptr<BlockSource> source;
    std::vector<Block> blocks;
    if (!log_path.empty()) {
        ScheduleLogData log = parse_schedule_log(read_file(log_path));
        config = log.config;
        for (const auto& [key, value] : flags.overrides) apply_config_key(config, key, value);
        source = std::make_unique<ReplaySchedule>(log.blocks);
    } else {
        config = flags.resolve();
        if (time > 0) source = std::make_unique<ScheduleGenerator>(config.schedule);
    }

    const GridExponent n_exp = config.schedule.n_exp;
    if (downsample == 0) downsample = std::max<std::int64_t>(1, n_exp.side() / 1024);

    const bool packed = n_exp.n >= 6;
    std::optional<PackedField> pf;
    std::optional<Field> field;
    if (packed) {
        pf.emplace(PackedField::initial_datum(n_exp));
    } else {
        field.emplace(Field::initial_datum(n_exp));
    }

    Block cur;
    std::int64_t remaining = 0;
    for (std::int64_t k = 1; k <= time; ++k) {
        if (remaining == 0) {
            cur = source->next_block();
            remaining = cur.duration;
        }
        if (packed) {
            pf->shear(cur.direction, cur.phase, FlowTime{1});
        } else {
            *field = unit_shear_step(*field, cur.direction, cur.phase);
        }
        --remaining;
    }
    if (packed) {
        render_field(*pf, out_path, downsample);
    } else {
        render_field(*field, out_path, downsample);
    }
    std::cerr << "wrote " << out_path << " (" << (n_exp.side() / downsample) << "x"
              << (n_exp.side() / downsample) << " pixels, time " << time << ")\n";
    return 0;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"Passive-scalar mixing by alternating wedge shear flows on the discrete torus"};
    app.require_subcommand(1);
    int exit_code = 0;

    auto* run = app.add_subcommand("run", "simulate a single run and write its files");
    ConfigFlags run_flags;
    run_flags.attach(run);
    std::string run_engine = "auto", run_replay, run_out = ".";
    run->add_option("--engine", run_engine, "auto, packed or reference");
    run->add_option("--replay", run_replay, "replay a schedule log instead of sampling");
    run->add_option("--out-dir", run_out, "output directory");
    run->callback([&] { exit_code = cmd_run(run_flags, run_engine, run_replay, run_out); });

    auto* ens = app.add_subcommand("ensemble", "run an ensemble and write per-run + summary files");
    ConfigFlags ens_flags;
    ens_flags.attach(ens);
    std::string ens_engine = "auto", ens_out = ".";
    bool ens_matrix = false, ens_quiet = false;
    ens->add_option("--engine", ens_engine, "auto, packed or reference");
    ens->add_option("--out-dir", ens_out, "output directory");
    ens->add_flag("--paper-matrix", ens_matrix,
                  "preset: all flow-type/tau table cells plus the {3,4} runs");
    ens->add_flag("--quiet", ens_quiet, "suppress per-run progress on stderr");
    ens->callback(
        [&] { exit_code = cmd_ensemble(ens_flags, ens_engine, ens_out, ens_matrix, ens_quiet); });

    auto* ana = app.add_subcommand("analyze", "recompute rates and r^2 from trajectory CSVs");
    std::vector<std::string> ana_paths;
    std::int64_t ana_start = 8, ana_stop = 5;
    int ana_nexp = 0;
    std::string ana_out;
    ana->add_option("csv", ana_paths, "trajectory CSV files")->required()->expected(-1);
    ana->add_option("--regression-start", ana_start, "first time in the fit window");
    ana->add_option("--stop-offset", ana_stop, "stop offset for T10 recomputation");
    ana->add_option("--n-exp", ana_nexp,
                    "grid exponent; when given, T10 is recomputed from the stop rule instead "
                    "of taken as the last recorded time");
    ana->add_option("--out", ana_out, "write the rate CSV here instead of stdout");
    ana->callback(
        [&] { exit_code = cmd_analyze(ana_paths, ana_start, ana_stop, ana_nexp, ana_out); });

    auto* ver = app.add_subcommand("verify", "check the fixed-structure claims exactly");
    int ver_samples = 16;
    std::string ver_out;
    ver->add_option("--samples", ver_samples, "sample points per segment");
    ver->add_option("--out", ver_out, "write the report here instead of stdout");
    ver->callback([&] { exit_code = cmd_verify(ver_samples, ver_out); });

    auto* ren = app.add_subcommand("render", "render a field snapshot to a PPM image");
    ConfigFlags ren_flags;
    ren_flags.attach(ren);
    std::string ren_log, ren_out_path;
    std::int64_t ren_time = 0, ren_down = 0;
    ren->add_option("--schedule-log", ren_log, "drive the dynamics from this schedule log");
    ren->add_option("--time", ren_time, "number of unit steps to advance");
    ren->add_option("--downsample", ren_down,
                    "block edge per pixel (power of two; default side/1024, at least 1)");
    ren->add_option("--out", ren_out_path, "output PPM path")->required();
    ren->callback([&] {
        exit_code = cmd_render(ren_flags, ren_log, ren_time, ren_down, ren_out_path);
    });

    CLI11_PARSE(app, argc, argv);
    return exit_code;
}

}  // namespace
}  // namespace wedgemix

int main(int argc, char** argv) {
    try {
        return wedgemix::dispatch(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
