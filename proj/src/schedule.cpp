#include "wedgemix/schedule.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace wedgemix {

bool has_fixed_shift(FlowType t) { return t == FlowType::FSFT || t == FlowType::FSRT; }

bool has_fixed_time(FlowType t) { return t == FlowType::FSFT || t == FlowType::RSFT; }

std::string flow_type_name(FlowType t) {
    switch (t) {
        case FlowType::FSFT: return "FSFT";
        case FlowType::RSFT: return "RSFT";
        case FlowType::FSRT: return "FSRT";
        case FlowType::RSRT: return "RSRT";
    }
    throw std::logic_error("unreachable flow type");
}

FlowType parse_flow_type(const std::string& name) {
    if (name == "FSFT") return FlowType::FSFT;
    if (name == "RSFT") return FlowType::RSFT;
    if (name == "FSRT") return FlowType::FSRT;
    if (name == "RSRT") return FlowType::RSRT;
    throw std::invalid_argument("unknown flow type '" + name +
                                "' (expected FSFT, RSFT, FSRT or RSRT)");
}

FlowTimeSet::FlowTimeSet(std::vector<std::int64_t> values) : values_(std::move(values)) {
    std::sort(values_.begin(), values_.end());
    values_.erase(std::unique(values_.begin(), values_.end()), values_.end());
    if (values_.empty()) throw std::invalid_argument("flow time set must be nonempty");
    if (values_.front() < 1) {
        throw std::invalid_argument("flow times must be positive integers");
    }
}

FlowTimeSet FlowTimeSet::centered(std::int64_t tau) {
    if (tau < 2) {
        throw std::invalid_argument("centered flow time set {tau-1, tau, tau+1} needs tau >= 2");
    }
    return FlowTimeSet({tau - 1, tau, tau + 1});
}

std::uint64_t derive_run_seed(std::uint64_t master_seed, std::int64_t run_index) {
    // splitmix64 output function on the stream position; the +1 keeps
    // run 0 from echoing a weakly mixed master seed directly.
    std::uint64_t z =
        master_seed + (static_cast<std::uint64_t>(run_index) + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

FlowTimeSet effective_time_set(const ScheduleConfig& config) {
    if (has_fixed_time(config.flow_type)) {
        if (config.time_set.has_value()) {
            throw std::invalid_argument("explicit time_set conflicts with fixed-time flow type " +
                                        flow_type_name(config.flow_type));
        }
        if (config.tau < 1) throw std::invalid_argument("flow time tau must be >= 1");
        return FlowTimeSet({config.tau});
    }
    if (config.time_set.has_value()) return *config.time_set;
    return FlowTimeSet::centered(config.tau);
}

ScheduleGenerator::ScheduleGenerator(const ScheduleConfig& config)
    : flow_type_(config.flow_type),
      side_(config.n_exp.side()),
      time_set_(effective_time_set(config)),
      run_seed_(derive_run_seed(config.master_seed, config.run_index)),
      rng_(run_seed_) {
    if (has_fixed_shift(flow_type_)) {
        omega_h_ = draw_phase();
        omega_v_ = draw_phase();
    }
}

std::int64_t ScheduleGenerator::draw_phase() {
    return static_cast<std::int64_t>(rng_() & static_cast<std::uint64_t>(side_ - 1));
}

std::int64_t ScheduleGenerator::draw_duration() {
    const auto& values = time_set_.values();
    if (values.size() == 1) return values[0];  // no draw for degenerate sets
    const std::uint64_t mask = std::bit_ceil(values.size()) - 1;
    for (;;) {
        const std::uint64_t r = rng_() & mask;
        if (r < values.size()) return values[static_cast<std::size_t>(r)];
    }
}

Block ScheduleGenerator::next_block() {
    Block b;
    b.index = next_index_++;
    b.direction = (b.index % 2 == 0) ? Direction::Horizontal : Direction::Vertical;
    if (has_fixed_shift(flow_type_)) {
        b.phase.w = (b.direction == Direction::Horizontal) ? omega_h_ : omega_v_;
    } else {
        b.phase.w = draw_phase();
    }
    b.duration = draw_duration();
    return b;
}

ReplaySchedule::ReplaySchedule(std::vector<Block> blocks) : blocks_(std::move(blocks)) {}

Block ReplaySchedule::next_block() {
    if (pos_ >= blocks_.size()) {
        throw std::out_of_range("schedule log exhausted after " + std::to_string(pos_) +
                                " blocks; rerun with a longer log");
    }
    return blocks_[pos_++];
}

}  // namespace wedgemix
