#include <doctest.h>

#include <random>

#include "wedgemix/advection.hpp"

using namespace wedgemix;

namespace {

Field random_field(GridExponent n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Field f(n);
    for (std::int64_t j = 0; j < n.side(); ++j) {
        for (std::int64_t i = 0; i < n.side(); ++i) {
            f.set(i, j, static_cast<std::int8_t>(static_cast<int>(rng() % 7) - 3));
        }
    }
    return f;
}

Field transpose(const Field& f) {
    Field out(GridExponent{f.exponent().n});
    for (std::int64_t j = 0; j < f.side(); ++j) {
        for (std::int64_t i = 0; i < f.side(); ++i) out.set(j, i, f.at(i, j));
    }
    return out;
}

}  // namespace

TEST_CASE("pullback shifts a row against the flow") {
    // Horizontal shear, w=0, tau=1 on the 4x4 initial datum: row 1 moves
    // one cell to the right, so [+,+,-,-] reads back as [-,+,+,-].
    const Field f = Field::initial_datum(GridExponent{2});
    const Field g = unit_shear_step(f, Direction::Horizontal, Phase{0});
    const std::int8_t expected[4] = {-1, 1, 1, -1};
    for (std::int64_t i = 0; i < 4; ++i) CHECK(g.at(i, 1) == expected[i]);
    // Rows 0 and 2 sit at distance 0 and 2 from the phase: shifts 0 and 2.
    for (std::int64_t i = 0; i < 4; ++i) CHECK(g.at(i, 0) == f.at(i, 0));
    for (std::int64_t i = 0; i < 4; ++i) CHECK(g.at(i, 2) == f.at((i + 2) % 4, 2));
}

TEST_CASE("flow map equals the per-point oracle on small grids") {
    for (int n = 1; n <= 3; ++n) {
        const Field f = random_field(GridExponent{n}, 100 + n);
        for (const Direction dir : {Direction::Horizontal, Direction::Vertical}) {
            for (std::int64_t w = 0; w < f.side(); ++w) {
                for (std::int64_t tau = -5; tau <= 5; ++tau) {
                    const Field got = apply_flow_map(f, dir, Phase{w}, FlowTime{tau});
                    const Field want = naive_pullback_oracle(f, dir, Phase{w}, FlowTime{tau});
                    CHECK(got == want);
                }
            }
        }
    }
}

TEST_CASE("opposite flow times invert each other") {
    const Field f = random_field(GridExponent{4}, 7);
    for (const Direction dir : {Direction::Horizontal, Direction::Vertical}) {
        for (std::int64_t tau : {1, 2, 3, 7}) {
            const Field fwd = apply_flow_map(f, dir, Phase{5}, FlowTime{tau});
            const Field back = apply_flow_map(fwd, dir, Phase{5}, FlowTime{-tau});
            CHECK(back == f);
        }
    }
}

TEST_CASE("tau zero is the identity") {
    const Field f = random_field(GridExponent{3}, 1);
    CHECK(apply_flow_map(f, Direction::Horizontal, Phase{2}, FlowTime{0}) == f);
}

TEST_CASE("a flow of time tau is tau unit steps") {
    const Field f = random_field(GridExponent{4}, 9);
    for (const Direction dir : {Direction::Horizontal, Direction::Vertical}) {
        Field stepped = f;
        for (int k = 0; k < 5; ++k) stepped = unit_shear_step(stepped, dir, Phase{3});
        CHECK(stepped == apply_flow_map(f, dir, Phase{3}, FlowTime{5}));
    }
}

TEST_CASE("advection preserves the cell multiset") {
    const Field f = random_field(GridExponent{4}, 11);
    const Field g = apply_flow_map(f, Direction::Vertical, Phase{6}, FlowTime{3});
    CHECK(f.total_sum() == g.total_sum());
    CHECK(f.sup_norm() == g.sup_norm());
    // Vertical shear permutes within columns; column sums are invariant.
    for (std::int64_t i = 0; i < f.side(); ++i) {
        std::int64_t a = 0, b = 0;
        for (std::int64_t j = 0; j < f.side(); ++j) {
            a += f.at(i, j);
            b += g.at(i, j);
        }
        CHECK(a == b);
    }
}

TEST_CASE("vertical shear is the transpose conjugate of horizontal") {
    const Field f = random_field(GridExponent{3}, 13);
    const Field direct = apply_flow_map(f, Direction::Vertical, Phase{3}, FlowTime{2});
    const Field conj = transpose(
        apply_flow_map(transpose(f), Direction::Horizontal, Phase{3}, FlowTime{2}));
    CHECK(direct == conj);
}
