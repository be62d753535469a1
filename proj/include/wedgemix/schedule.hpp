#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "wedgemix/advection.hpp"
#include "wedgemix/field.hpp"

namespace wedgemix {

/// Identifies the sampling algorithm whose bit stream the logged
/// schedules came from. Recorded in every output; bump on any change to
/// seeding or draw order.
inline constexpr const char* kGeneratorId = "mt19937_64/splitmix64-v1";

/// Fixed/Random phase Shift x Fixed/Random flow Time.
enum class FlowType { FSFT, RSFT, FSRT, RSRT };

bool has_fixed_shift(FlowType t);  // FSFT, FSRT
bool has_fixed_time(FlowType t);   // FSFT, RSFT
std::string flow_type_name(FlowType t);
FlowType parse_flow_type(const std::string& name);

/// Uniform sampling support for random flow times. Stored sorted and
/// deduplicated; every member >= 1.
class FlowTimeSet {
public:
    explicit FlowTimeSet(std::vector<std::int64_t> values);

    /// {tau-1, tau, tau+1}; requires tau >= 2.
    static FlowTimeSet centered(std::int64_t tau);

    std::size_t size() const { return values_.size(); }
    const std::vector<std::int64_t>& values() const { return values_; }
    bool operator==(const FlowTimeSet&) const = default;

private:
    std::vector<std::int64_t> values_;
};

/// One directional segment of a schedule: `duration` consecutive unit
/// steps of the same shear.
struct Block {
    std::int64_t index = 0;  // even => Horizontal, odd => Vertical
    Direction direction = Direction::Horizontal;
    Phase phase;
    std::int64_t duration = 1;
};

struct ScheduleConfig {
    FlowType flow_type = FlowType::FSFT;
    GridExponent n_exp{15};
    std::int64_t tau = 3;
    /// Only meaningful for random-time types; when absent those use
    /// FlowTimeSet::centered(tau).
    std::optional<FlowTimeSet> time_set;
    std::uint64_t master_seed = 0;
    std::int64_t run_index = 0;
};

/// Per-run stream seed: output step of a splitmix64 sequence starting
/// at master_seed, taken at position run_index + 1. Stable across
/// builds; part of the kGeneratorId contract.
std::uint64_t derive_run_seed(std::uint64_t master_seed, std::int64_t run_index);

/// {tau} for fixed-time types; the explicit or centered set otherwise.
/// Throws on inconsistent configs (explicit set with a fixed-time type,
/// or tau < 1).
FlowTimeSet effective_time_set(const ScheduleConfig& config);

struct BlockSource {
    virtual ~BlockSource() = default;
    virtual Block next_block() = 0;
};

/// Lazy schedule sampler. Draw discipline (the reproducibility
/// contract): the engine is mt19937_64 seeded with derive_run_seed;
/// fixed-shift types draw omega then omega' at construction; each block
/// then draws its phase (random-shift types only) followed by its
/// duration (random-time types with a non-singleton set only). Phases
/// use rng() & (side-1), exact for power-of-two sides; durations use
/// masked rejection over the set index. Singleton time sets draw
/// nothing, so e.g. RSRT with set {tau} replays bit-identically to RSFT.
class ScheduleGenerator final : public BlockSource {
public:
    explicit ScheduleGenerator(const ScheduleConfig& config);

    Block next_block() override;
    std::uint64_t run_seed() const { return run_seed_; }

private:
    std::int64_t draw_phase();
    std::int64_t draw_duration();

    FlowType flow_type_;
    std::int64_t side_;
    FlowTimeSet time_set_;
    std::uint64_t run_seed_;
    std::mt19937_64 rng_;
    std::int64_t next_index_ = 0;
    std::int64_t omega_h_ = 0;  // fixed-shift phases, drawn at construction
    std::int64_t omega_v_ = 0;
};

/// Replays a previously logged block list; the dynamics are fully
/// determined by it, independent of any RNG.
class ReplaySchedule final : public BlockSource {
public:
    explicit ReplaySchedule(std::vector<Block> blocks);
    Block next_block() override;  // throws std::out_of_range past the end

private:
    std::vector<Block> blocks_;
    std::size_t pos_ = 0;
};

}  // namespace wedgemix
