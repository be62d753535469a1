#include <doctest.h>

#include <random>
#include <stdexcept>
#include <string>

#include "wedgemix/io.hpp"

using namespace wedgemix;

namespace {

ExperimentConfig sample_config() {
    ExperimentConfig c;
    apply_config_key(c, "flow_type", "RSRT");
    apply_config_key(c, "n_exp", "9");
    apply_config_key(c, "tau", "4");
    apply_config_key(c, "time_set", "3,5,4");
    apply_config_key(c, "runs", "12");
    apply_config_key(c, "master_seed", "987654321");
    apply_config_key(c, "kappa", "2/5");
    apply_config_key(c, "regression_start", "6");
    apply_config_key(c, "stop_offset", "4");
    apply_config_key(c, "max_steps", "250");
    apply_config_key(c, "mode", "extended");
    apply_config_key(c, "horizon", "77");
    return c;
}

}  // namespace

TEST_CASE("config text round trips") {
    const ExperimentConfig c = sample_config();
    const ExperimentConfig back = parse_config_text(config_to_text(c));
    CHECK(back.schedule.flow_type == FlowType::RSRT);
    CHECK(back.schedule.n_exp.n == 9);
    CHECK(back.schedule.tau == 4);
    REQUIRE(back.schedule.time_set.has_value());
    CHECK(back.schedule.time_set->values() == std::vector<std::int64_t>{3, 4, 5});
    CHECK(back.schedule.master_seed == 987654321);
    CHECK(back.runs == 12);
    CHECK(back.params.kappa.num == 2);
    CHECK(back.params.kappa.den == 5);
    CHECK(back.params.regression_start == 6);
    CHECK(back.params.stop_offset == 4);
    CHECK(back.limits.max_steps == 250);
    CHECK(back.limits.mode == RunMode::Extended);
    CHECK(back.limits.horizon == 77);
}

TEST_CASE("config parsing ignores comments and rejects junk") {
    const ExperimentConfig c =
        parse_config_text("# a comment\n\n  flow_type = FSFT \ntau=5\n");
    CHECK(c.schedule.flow_type == FlowType::FSFT);
    CHECK(c.schedule.tau == 5);

    ExperimentConfig d;
    CHECK_THROWS_AS(apply_config_key(d, "flowtype", "FSFT"), std::invalid_argument);
    CHECK_THROWS_AS(apply_config_key(d, "tau", "3x"), std::invalid_argument);
    CHECK_THROWS_AS(apply_config_key(d, "n_exp", "0"), std::invalid_argument);
    CHECK_THROWS_AS(apply_config_key(d, "kappa", "5/3"), std::invalid_argument);
    CHECK_THROWS_AS(apply_config_key(d, "kappa", "1"), std::invalid_argument);
    CHECK_THROWS_AS(apply_config_key(d, "mode", "fast"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("tau\n"), std::invalid_argument);
}

TEST_CASE("labels used in summaries") {
    ExperimentConfig c;
    CHECK(tau_label(c.schedule) == "3");
    c.schedule.time_set = FlowTimeSet({4, 3});
    CHECK(tau_label(c.schedule) == "3+4");
    CHECK(kappa_label(Kappa{}) == "1/3");
    CHECK(kappa_label(Kappa{2, 5}) == "2/5");
}

TEST_CASE("trajectory CSV round trips") {
    RunResult run;
    run.config.run_index = 7;
    run.trajectory = {0, 1, 1, 3};
    const std::string text = trajectory_csv(run);
    CHECK(text == "run_id,k,neg_log2_scale\n7,0,0\n7,1,1\n7,2,1\n7,3,3\n");

    const auto series = parse_trajectory_csv(text);
    REQUIRE(series.size() == 1);
    CHECK(series[0].run_id == 7);
    CHECK(series[0].n_by_k == std::vector<double>{0, 1, 1, 3});

    // Two runs in one stream parse as two contiguous groups.
    const auto two = parse_trajectory_csv(
        "run_id,k,neg_log2_scale\n0,0,0\n0,1,2\n1,0,0\n1,1,1\n");
    REQUIRE(two.size() == 2);
    CHECK(two[1].n_by_k == std::vector<double>{0, 1});

    CHECK_THROWS_AS(parse_trajectory_csv("run,k,n\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_trajectory_csv("run_id,k,neg_log2_scale\n0,1,0\n"),
                    std::invalid_argument);  // k must start at 0
    CHECK_THROWS_AS(parse_trajectory_csv("run_id,k,neg_log2_scale\n0,0,0\n0,2,1\n"),
                    std::invalid_argument);  // gap in k
}

TEST_CASE("summary CSV carries the pinned header and round trips") {
    CHECK(std::string(kSummaryCsvHeader) ==
          "flow_type,tau,n_exp,runs_completed,mean_rate,std_rate,mean_r2,std_r2,"
          "mean_T10,std_T10,kappa,regression_start,stop_offset,seed,generator_id");

    EnsembleResult result;
    result.config.flow_type = FlowType::FSRT;
    result.config.n_exp = GridExponent{11};
    result.config.tau = 6;
    result.config.master_seed = 5;
    result.summary.runs_requested = 2;
    result.summary.runs_completed = 2;
    result.summary.runs_with_rate = 2;
    result.summary.mean_rate = 0.25;
    result.summary.std_rate = 0.5;
    result.summary.mean_r2 = 0.975;
    result.summary.std_r2 = 0.0125;
    result.summary.mean_t10 = 31;
    result.summary.std_t10 = 2.25;

    const std::string text = summary_csv(result);
    const auto rows = parse_summary_csv(text);
    REQUIRE(rows.size() == 1);
    REQUIRE(rows[0].size() == 15);
    CHECK(rows[0][0] == "FSRT");
    CHECK(rows[0][1] == "6");
    CHECK(rows[0][2] == "11");
    CHECK(rows[0][3] == "2");
    CHECK(rows[0][4] == "0.25");
    CHECK(rows[0][10] == "1/3");
    CHECK(rows[0][13] == "5");
    CHECK(rows[0][14] == kGeneratorId);
}

TEST_CASE("schedule logs round trip and validate") {
    ExperimentConfig config;
    apply_config_key(config, "flow_type", "RSFT");
    apply_config_key(config, "n_exp", "3");
    apply_config_key(config, "tau", "2");
    const std::vector<Block> blocks = {
        {0, Direction::Horizontal, Phase{2}, 2},
        {1, Direction::Vertical, Phase{0}, 2},
        {2, Direction::Horizontal, Phase{7}, 2},
    };
    const std::string text = schedule_log_text(config, 555, blocks);
    const ScheduleLogData data = parse_schedule_log(text);
    CHECK(data.generator_id == kGeneratorId);
    CHECK(data.run_seed == 555);
    CHECK(data.config.schedule.flow_type == FlowType::RSFT);
    CHECK(data.config.schedule.n_exp.n == 3);
    REQUIRE(data.blocks.size() == 3);
    CHECK(data.blocks[2].phase.w == 7);
    CHECK(data.blocks[2].duration == 2);

    auto corrupt = [&](const std::string& from, const std::string& to) {
        std::string t = text;
        t.replace(t.find(from), from.size(), to);
        return t;
    };
    CHECK_THROWS_AS(parse_schedule_log(corrupt("schedule-log-v1", "schedule-log-v9")),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_schedule_log(corrupt("1 V 0 2", "1 H 0 2")),
                    std::invalid_argument);  // broken alternation
    CHECK_THROWS_AS(parse_schedule_log(corrupt("2 H 7 2", "5 H 7 2")),
                    std::invalid_argument);  // index gap
    CHECK_THROWS_AS(parse_schedule_log(corrupt("0 H 2 2", "0 H 8 2")),
                    std::invalid_argument);  // phase outside the grid
    CHECK_THROWS_AS(parse_schedule_log(corrupt("0 H 2 2", "0 H 2 0")),
                    std::invalid_argument);  // empty block
}

TEST_CASE("field snapshots serialize to pinned PPM bytes") {
    const Field f = Field::initial_datum(GridExponent{2});
    const std::string blue = "\x1f\x77\xff";
    const std::string yellow = "\xff\xdd\x33";
    std::string want = "P6\n4 4\n255\n";
    for (int y = 0; y < 4; ++y) want += blue + blue + yellow + yellow;
    CHECK(render_ppm(f, 1) == want);

    // Downsampling to single-color blocks keeps the extreme colors.
    CHECK(render_ppm(f, 2) == "P6\n2 2\n255\n" + blue + yellow + blue + yellow);

    // A zero field sits exactly mid-gradient.
    const Field zero(GridExponent{2});
    const std::string mid = render_ppm(zero, 4);
    REQUIRE(mid.size() == std::string("P6\n1 1\n255\n").size() + 3);
    CHECK(static_cast<unsigned char>(mid[mid.size() - 3]) == 143);
    CHECK(static_cast<unsigned char>(mid[mid.size() - 2]) == 170);
    CHECK(static_cast<unsigned char>(mid[mid.size() - 1]) == 153);

    CHECK_THROWS_AS(render_ppm(f, 3), std::invalid_argument);
    CHECK_THROWS_AS(render_ppm(f, 8), std::invalid_argument);
}

TEST_CASE("packed rendering matches the reference in both layouts") {
    std::mt19937_64 rng(4);
    Field f(GridExponent{7});
    for (std::int64_t j = 0; j < 128; ++j) {
        for (std::int64_t i = 0; i < 128; ++i) f.set(i, j, (rng() & 1) ? 1 : -1);
    }
    PackedField p = PackedField::pack(f);
    for (const std::int64_t d : {1L, 2L, 32L, 128L}) {
        CHECK(render_ppm(p, d) == render_ppm(f, d));
    }
    p.set_layout(true);
    for (const std::int64_t d : {1L, 4L, 64L}) {
        CHECK(render_ppm(p, d) == render_ppm(f, d));
    }
}
