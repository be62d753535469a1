#include <doctest.h>

#include <cstdint>
#include <random>

#include "wedgemix/advection.hpp"
#include "wedgemix/packed_field.hpp"

using namespace wedgemix;

namespace {

Field random_signs(GridExponent n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Field f(n);
    for (std::int64_t j = 0; j < n.side(); ++j) {
        for (std::int64_t i = 0; i < n.side(); ++i) {
            f.set(i, j, (rng() & 1) ? 1 : -1);
        }
    }
    return f;
}

}  // namespace

TEST_CASE("bit transpose is an involution with the right fixed points") {
    std::mt19937_64 rng(3);
    std::uint64_t tile[64], copy[64];
    for (auto& w : tile) w = rng();
    for (int i = 0; i < 64; ++i) copy[i] = tile[i];
    transpose64(tile);
    // Spot-check: bit c of row r moved to bit r of row c.
    for (int r = 0; r < 64; r += 7) {
        for (int c = 0; c < 64; c += 5) {
            CHECK(((tile[c] >> r) & 1) == ((copy[r] >> c) & 1));
        }
    }
    transpose64(tile);
    for (int i = 0; i < 64; ++i) CHECK(tile[i] == copy[i]);
}

TEST_CASE("pack and unpack round trip") {
    const Field f = random_signs(GridExponent{7}, 21);
    const PackedField p = PackedField::pack(f);
    CHECK(p.unpack() == f);
    CHECK(p.total_sum() == f.total_sum());
    for (std::int64_t j = 0; j < f.side(); j += 17) {
        for (std::int64_t i = 0; i < f.side(); i += 13) {
            CHECK(p.value_at(i, j) == f.at(i, j));
        }
    }
}

TEST_CASE("packing rejects values other than plus and minus one") {
    Field f(GridExponent{6});
    CHECK_THROWS(PackedField::pack(f));  // zeros everywhere
}

TEST_CASE("packed initial datum matches the reference one") {
    for (int n : {6, 7, 8}) {
        const PackedField p = PackedField::initial_datum(GridExponent{n});
        CHECK(p.unpack() == Field::initial_datum(GridExponent{n}));
        CHECK(p.total_sum() == 0);
    }
}

TEST_CASE("layout flips preserve the logical field") {
    const Field f = random_signs(GridExponent{6}, 5);
    PackedField p = PackedField::pack(f);
    PackedField q = PackedField::pack(f);
    q.set_layout(true);
    CHECK(q.transposed());
    CHECK(p.logically_equal(q));
    CHECK(q.unpack() == f);
    q.set_layout(false);
    CHECK(p.logically_equal(q));
}

TEST_CASE("packed shear agrees with reference advection") {
    for (int n : {6, 7, 8}) {
        Field ref = random_signs(GridExponent{n}, 40 + n);
        PackedField p = PackedField::pack(ref);
        // Mixed directions force layout transposes; include negative and
        // wrapping times.
        struct Step {
            Direction dir;
            std::int64_t w, tau;
        };
        const Step steps[] = {
            {Direction::Horizontal, 0, 1},  {Direction::Vertical, 9, 2},
            {Direction::Vertical, 3, -4},   {Direction::Horizontal, 30, 65},
            {Direction::Horizontal, 1, 0},  {Direction::Vertical, 63, 1},
        };
        for (const Step& s : steps) {
            const Phase w{s.w % (std::int64_t{1} << n)};
            ref = apply_flow_map(ref, s.dir, w, FlowTime{s.tau});
            p.shear(s.dir, w, FlowTime{s.tau});
            REQUIRE(p.unpack() == ref);
        }
    }
}

TEST_CASE("shear with phase zero leaves the phase row in place") {
    PackedField p = PackedField::initial_datum(GridExponent{6});
    const PackedField before = p;
    p.shear(Direction::Horizontal, Phase{0}, FlowTime{3});
    // Row 0 has distance 0 and never moves; the antipodal row moves by
    // 3*32 mod 64 = 32.
    for (std::int64_t i = 0; i < 64; ++i) {
        CHECK(p.value_at(i, 0) == before.value_at(i, 0));
        CHECK(p.value_at(i, 32) == before.value_at((i + 32) % 64, 32));
    }
}
