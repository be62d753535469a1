#include "wedgemix/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <optional>
#include <stdexcept>
#include <utility>

namespace wedgemix {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

template <typename T>
T parse_number(const std::string& s, const std::string& what) {
    T v{};
    const char* b = s.data();
    const char* e = s.data() + s.size();
    const auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc{} || p != e) {
        throw std::invalid_argument("cannot parse " + what + " from '" + s + "'");
    }
    return v;
}

std::int64_t parse_i64(const std::string& s, const std::string& what) {
    return parse_number<std::int64_t>(s, what);
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

constexpr int kBlue[3] = {31, 119, 255};
constexpr int kYellow[3] = {255, 221, 51};

void check_downsample(std::int64_t side, std::int64_t d) {
    if (d < 1 || !std::has_single_bit(static_cast<std::uint64_t>(d)) || side % d != 0) {
        throw std::invalid_argument("downsample must be a power of two dividing the side, got " +
                                    std::to_string(d));
    }
}

/// Linear yellow-to-blue interpolation at weight u / (2*cells), where
/// u = block sum + cells. Integer rounding keeps the bytes stable.
void emit_pixel(std::string& out, std::int64_t u, std::int64_t cells) {
    u = std::clamp<std::int64_t>(u, 0, 2 * cells);
    for (int ch = 0; ch < 3; ++ch) {
        const __int128 num = static_cast<__int128>(kYellow[ch]) * (2 * cells - u) +
                             static_cast<__int128>(kBlue[ch]) * u + cells;
        out.push_back(static_cast<char>(static_cast<int>(num / (2 * cells))));
    }
}

std::string ppm_header(std::int64_t width) {
    return "P6\n" + std::to_string(width) + " " + std::to_string(width) + "\n255\n";
}

}  // namespace

void apply_config_key(ExperimentConfig& config, const std::string& key,
                      const std::string& value) {
    if (key == "flow_type") {
        config.schedule.flow_type = parse_flow_type(value);
    } else if (key == "n_exp") {
        config.schedule.n_exp = GridExponent(static_cast<int>(parse_i64(value, key)));
    } else if (key == "tau") {
        config.schedule.tau = parse_i64(value, key);
    } else if (key == "time_set") {
        std::vector<std::int64_t> values;
        for (const std::string& part : split(value, ',')) {
            values.push_back(parse_i64(trim(part), key));
        }
        config.schedule.time_set = FlowTimeSet(values);
    } else if (key == "runs") {
        config.runs = parse_i64(value, key);
        if (config.runs < 1) throw std::invalid_argument("runs must be >= 1");
    } else if (key == "master_seed") {
        config.schedule.master_seed = parse_number<std::uint64_t>(value, key);
    } else if (key == "run_index") {
        config.schedule.run_index = parse_i64(value, key);
        if (config.schedule.run_index < 0) throw std::invalid_argument("run_index must be >= 0");
    } else if (key == "kappa") {
        const auto parts = split(value, '/');
        if (parts.size() != 2) {
            throw std::invalid_argument("kappa must be written num/den, got '" + value + "'");
        }
        config.params.kappa = Kappa(parse_i64(trim(parts[0]), key), parse_i64(trim(parts[1]), key));
    } else if (key == "regression_start") {
        config.params.regression_start = parse_i64(value, key);
        if (config.params.regression_start < 0) {
            throw std::invalid_argument("regression_start must be >= 0");
        }
    } else if (key == "stop_offset") {
        config.params.stop_offset = parse_i64(value, key);
        if (config.params.stop_offset < 0) throw std::invalid_argument("stop_offset must be >= 0");
    } else if (key == "max_steps") {
        config.limits.max_steps = parse_i64(value, key);
        if (config.limits.max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
    } else if (key == "mode") {
        if (value == "standard") {
            config.limits.mode = RunMode::Standard;
        } else if (value == "extended") {
            config.limits.mode = RunMode::Extended;
        } else {
            throw std::invalid_argument("mode must be 'standard' or 'extended', got '" + value +
                                        "'");
        }
    } else if (key == "horizon") {
        config.limits.horizon = parse_i64(value, key);
        if (config.limits.horizon < 0) throw std::invalid_argument("horizon must be >= 0");
    } else {
        throw std::invalid_argument("unknown config key '" + key + "'");
    }
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig config;
    std::size_t line_no = 0;
    for (const std::string& raw : split(text, '\n')) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        " is not key=value: '" + line + "'");
        }
        apply_config_key(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return config;
}

ExperimentConfig load_config_file(const std::string& path) {
    return parse_config_text(read_file(path));
}

std::string config_to_text(const ExperimentConfig& config) {
    std::string out;
    out += "flow_type=" + flow_type_name(config.schedule.flow_type) + "\n";
    out += "n_exp=" + std::to_string(config.schedule.n_exp.n) + "\n";
    out += "tau=" + std::to_string(config.schedule.tau) + "\n";
    if (config.schedule.time_set) {
        std::string set;
        for (std::int64_t v : config.schedule.time_set->values()) {
            if (!set.empty()) set += ',';
            set += std::to_string(v);
        }
        out += "time_set=" + set + "\n";
    }
    out += "runs=" + std::to_string(config.runs) + "\n";
    out += "master_seed=" + std::to_string(config.schedule.master_seed) + "\n";
    out += "kappa=" + kappa_label(config.params.kappa) + "\n";
    out += "regression_start=" + std::to_string(config.params.regression_start) + "\n";
    out += "stop_offset=" + std::to_string(config.params.stop_offset) + "\n";
    out += "max_steps=" + std::to_string(config.limits.max_steps) + "\n";
    out += std::string("mode=") +
           (config.limits.mode == RunMode::Standard ? "standard" : "extended") + "\n";
    if (config.limits.mode == RunMode::Extended) {
        out += "horizon=" + std::to_string(config.limits.horizon) + "\n";
    }
    return out;
}

std::string tau_label(const ScheduleConfig& schedule) {
    if (schedule.time_set) {
        std::string out;
        for (std::int64_t v : schedule.time_set->values()) {
            if (!out.empty()) out += '+';
            out += std::to_string(v);
        }
        return out;
    }
    return std::to_string(schedule.tau);
}

std::string kappa_label(Kappa kappa) {
    return std::to_string(kappa.num) + "/" + std::to_string(kappa.den);
}

std::string trajectory_csv(const RunResult& run) {
    std::string out = kTrajectoryCsvHeader;
    out += '\n';
    const std::string id = std::to_string(run.config.run_index);
    for (std::size_t k = 0; k < run.trajectory.size(); ++k) {
        out += id + "," + std::to_string(k) + "," + std::to_string(run.trajectory[k]) + "\n";
    }
    return out;
}

std::string summary_csv_row(const EnsembleResult& result) {
    const EnsembleSummary& s = result.summary;
    std::string out;
    out += flow_type_name(result.config.flow_type);
    out += "," + tau_label(result.config);
    out += "," + std::to_string(result.config.n_exp.n);
    out += "," + std::to_string(s.runs_completed);
    out += "," + fmt_double(s.mean_rate);
    out += "," + fmt_double(s.std_rate);
    out += "," + fmt_double(s.mean_r2);
    out += "," + fmt_double(s.std_r2);
    out += "," + fmt_double(s.mean_t10);
    out += "," + fmt_double(s.std_t10);
    out += "," + kappa_label(result.params.kappa);
    out += "," + std::to_string(result.params.regression_start);
    out += "," + std::to_string(result.params.stop_offset);
    out += "," + std::to_string(result.config.master_seed);
    out += std::string(",") + kGeneratorId;
    out += "\n";
    return out;
}

std::string summary_csv(const EnsembleResult& result) {
    return std::string(kSummaryCsvHeader) + "\n" + summary_csv_row(result);
}

std::vector<TrajectorySeries> parse_trajectory_csv(const std::string& text) {
    const auto lines = split(text, '\n');
    if (lines.empty() || trim(lines[0]) != kTrajectoryCsvHeader) {
        throw std::invalid_argument("trajectory CSV must start with header '" +
                                    std::string(kTrajectoryCsvHeader) + "'");
    }
    std::vector<TrajectorySeries> out;
    std::vector<std::int64_t> seen;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string line = trim(lines[i]);
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != 3) {
            throw std::invalid_argument("trajectory CSV row " + std::to_string(i + 1) +
                                        " does not have 3 fields: '" + line + "'");
        }
        const std::int64_t run_id = parse_i64(trim(fields[0]), "run_id");
        const std::int64_t k = parse_i64(trim(fields[1]), "k");
        const double value = parse_number<double>(trim(fields[2]), "neg_log2_scale");
        if (out.empty() || out.back().run_id != run_id) {
            if (std::find(seen.begin(), seen.end(), run_id) != seen.end()) {
                throw std::invalid_argument("trajectory CSV rows for run " +
                                            std::to_string(run_id) + " are not contiguous");
            }
            seen.push_back(run_id);
            out.push_back({run_id, {}});
        }
        if (k != static_cast<std::int64_t>(out.back().n_by_k.size())) {
            throw std::invalid_argument("trajectory CSV run " + std::to_string(run_id) +
                                        " has nonconsecutive time " + std::to_string(k));
        }
        out.back().n_by_k.push_back(value);
    }
    return out;
}

std::vector<std::vector<std::string>> parse_summary_csv(const std::string& text) {
    const auto lines = split(text, '\n');
    if (lines.empty() || trim(lines[0]) != kSummaryCsvHeader) {
        throw std::invalid_argument("summary CSV must start with its versioned header row");
    }
    const std::size_t width = split(kSummaryCsvHeader, ',').size();
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string line = trim(lines[i]);
        if (line.empty()) continue;
        auto fields = split(line, ',');
        if (fields.size() != width) {
            throw std::invalid_argument("summary CSV row " + std::to_string(i + 1) + " has " +
                                        std::to_string(fields.size()) + " fields, expected " +
                                        std::to_string(width));
        }
        rows.push_back(std::move(fields));
    }
    return rows;
}

std::string schedule_log_text(const ExperimentConfig& config, std::uint64_t run_seed,
                              const std::vector<Block>& blocks) {
    std::string out = "# schedule-log-v1\n";
    out += std::string("# generator=") + kGeneratorId + "\n";
    for (const std::string& line : split(config_to_text(config), '\n')) {
        if (!line.empty()) out += "# " + line + "\n";
    }
    out += "# run_index=" + std::to_string(config.schedule.run_index) + "\n";
    out += "# run_seed=" + std::to_string(run_seed) + "\n";
    for (const Block& b : blocks) {
        out += std::to_string(b.index);
        out += (b.direction == Direction::Horizontal) ? " H " : " V ";
        out += std::to_string(b.phase.w) + " " + std::to_string(b.duration) + "\n";
    }
    return out;
}

ScheduleLogData parse_schedule_log(const std::string& text) {
    const auto lines = split(text, '\n');
    if (lines.empty() || trim(lines[0]) != "# schedule-log-v1") {
        throw std::invalid_argument("schedule log must start with '# schedule-log-v1'");
    }
    ScheduleLogData data;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string line = trim(lines[i]);
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string body = trim(line.substr(1));
            const auto eq = body.find('=');
            if (eq == std::string::npos) continue;  // free-form comment
            const std::string key = trim(body.substr(0, eq));
            const std::string value = trim(body.substr(eq + 1));
            if (key == "generator") {
                data.generator_id = value;
            } else if (key == "run_seed") {
                data.run_seed = parse_number<std::uint64_t>(value, key);
            } else {
                apply_config_key(data.config, key, value);
            }
            continue;
        }
        const auto tokens = split(line, ' ');
        std::vector<std::string> fields;
        for (const auto& t : tokens) {
            if (!t.empty()) fields.push_back(t);
        }
        if (fields.size() != 4) {
            throw std::invalid_argument("schedule log line " + std::to_string(i + 1) +
                                        " is not 'index direction phase duration': '" + line +
                                        "'");
        }
        Block b;
        b.index = parse_i64(fields[0], "block index");
        if (fields[1] == "H") {
            b.direction = Direction::Horizontal;
        } else if (fields[1] == "V") {
            b.direction = Direction::Vertical;
        } else {
            throw std::invalid_argument("block direction must be H or V, got '" + fields[1] +
                                        "'");
        }
        b.phase.w = parse_i64(fields[2], "block phase");
        b.duration = parse_i64(fields[3], "block duration");
        if (b.index != static_cast<std::int64_t>(data.blocks.size())) {
            throw std::invalid_argument("block indices must count up from 0, got " +
                                        std::to_string(b.index));
        }
        if (b.direction != ((b.index % 2 == 0) ? Direction::Horizontal : Direction::Vertical)) {
            throw std::invalid_argument("block " + std::to_string(b.index) +
                                        " breaks the H/V alternation");
        }
        const std::int64_t side = data.config.schedule.n_exp.side();
        if (b.phase.w < 0 || b.phase.w >= side) {
            throw std::invalid_argument("block phase " + std::to_string(b.phase.w) +
                                        " outside [0, " + std::to_string(side) + ")");
        }
        if (b.duration < 1) throw std::invalid_argument("block duration must be >= 1");
        data.blocks.push_back(b);
    }
    return data;
}

std::string ensemble_metadata_text(const EnsembleResult& result) {
    ExperimentConfig echo;
    echo.schedule = result.config;
    echo.runs = result.summary.runs_requested;
    echo.params = result.params;
    echo.limits = result.limits;
    std::string out;
    out += config_to_text(echo);
    out += std::string("generator_id=") + kGeneratorId + "\n";
    out += "std_convention=sample\n";  // divisor n-1
    out += "runs_requested=" + std::to_string(result.summary.runs_requested) + "\n";
    out += "runs_completed=" + std::to_string(result.summary.runs_completed) + "\n";
    out += "runs_with_rate=" + std::to_string(result.summary.runs_with_rate) + "\n";
    return out;
}

std::vector<MatrixCell> paper_matrix_cells(const ScheduleConfig& base) {
    std::vector<MatrixCell> cells;
    auto push = [&](FlowType type, std::int64_t tau, std::optional<FlowTimeSet> set) {
        ScheduleConfig schedule = base;
        schedule.flow_type = type;
        schedule.tau = tau;
        schedule.time_set = std::move(set);
        schedule.run_index = 0;
        schedule.master_seed =
            derive_run_seed(base.master_seed, static_cast<std::int64_t>(cells.size()));
        std::string label =
            std::string(flow_type_name(type)) + "_tau" + tau_label(schedule);
        cells.push_back({std::move(schedule), std::move(label)});
    };
    for (FlowType type : {FlowType::FSFT, FlowType::RSFT, FlowType::FSRT, FlowType::RSRT}) {
        for (std::int64_t tau = 2; tau <= 10; ++tau) {
            if (type == FlowType::FSFT && tau == 2) continue;  // no exponential regime
            push(type, tau, std::nullopt);
        }
    }
    push(FlowType::FSRT, 3, FlowTimeSet({3, 4}));
    push(FlowType::RSRT, 3, FlowTimeSet({3, 4}));
    return cells;
}

std::string render_ppm(const Field& f, std::int64_t downsample) {
    const std::int64_t side = f.side();
    check_downsample(side, downsample);
    const std::int64_t w = side / downsample;
    const std::int64_t cells = downsample * downsample;

    std::vector<std::int64_t> sums(static_cast<std::size_t>(w) * w, 0);
    for (std::int64_t j = 0; j < side; ++j) {
        const std::int64_t jb = j / downsample;
        auto row = f.row(j);
        for (std::int64_t i = 0; i < side; ++i) {
            sums[jb * w + i / downsample] += row[i];
        }
    }

    std::string out = ppm_header(w);
    out.reserve(out.size() + static_cast<std::size_t>(w) * w * 3);
    for (std::int64_t y = 0; y < w; ++y) {
        const std::int64_t jb = w - 1 - y;
        for (std::int64_t ib = 0; ib < w; ++ib) {
            emit_pixel(out, sums[jb * w + ib] + cells, cells);
        }
    }
    return out;
}

std::string render_ppm(const PackedField& f, std::int64_t downsample) {
    const std::int64_t side = f.side();
    check_downsample(side, downsample);
    const std::int64_t d = downsample;
    const std::int64_t w = side / d;
    const std::int64_t cells = d * d;

    // Plus-counts per block in storage orientation.
    std::vector<std::int64_t> counts(static_cast<std::size_t>(w) * w, 0);
    for (std::int64_t t = 0; t < side; ++t) {
        const std::uint64_t* row = f.storage_row(t);
        std::int64_t* dst = counts.data() + (t / d) * w;
        if (d >= 64) {
            for (std::int64_t k = 0; k < f.words_per_row(); ++k) {
                dst[k * 64 / d] += std::popcount(row[k]);
            }
        } else {
            const std::uint64_t mask = (std::uint64_t{1} << d) - 1;
            const std::int64_t per_word = 64 / d;
            for (std::int64_t k = 0; k < f.words_per_row(); ++k) {
                for (std::int64_t s = 0; s < per_word; ++s) {
                    dst[k * per_word + s] += std::popcount((row[k] >> (s * d)) & mask);
                }
            }
        }
    }

    std::string out = ppm_header(w);
    out.reserve(out.size() + static_cast<std::size_t>(w) * w * 3);
    for (std::int64_t y = 0; y < w; ++y) {
        const std::int64_t jb = w - 1 - y;
        for (std::int64_t ib = 0; ib < w; ++ib) {
            const std::int64_t p =
                f.transposed() ? counts[ib * w + jb] : counts[jb * w + ib];
            emit_pixel(out, 2 * p, cells);
        }
    }
    return out;
}

void render_field(const Field& f, const std::string& path, std::int64_t downsample) {
    write_file(path, render_ppm(f, downsample));
}

void render_field(const PackedField& f, const std::string& path, std::int64_t downsample) {
    write_file(path, render_ppm(f, downsample));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    std::string out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw std::runtime_error("read error on '" + path + "'");
    return out;
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write error on '" + path + "'");
}

}  // namespace wedgemix
