#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

namespace wedgemix {

/// Exponent of the dyadic grid resolution: the torus is split into
/// 2^n x 2^n cells, each represented by its lower-left grid point.
struct GridExponent {
    int n = 0;

    explicit GridExponent(int n_exp);
    std::int64_t side() const { return std::int64_t{1} << n; }
    std::int64_t cells() const { return std::int64_t{1} << (2 * n); }
};

/// Phase shift of a wedge flow, in grid units (omega = w / side).
struct Phase {
    std::int64_t w = 0;
};

/// Number of unit time steps a single directional shear acts.
/// Negative values select the inverse map; zero is the identity.
struct FlowTime {
    std::int64_t tau = 0;
};

/// Distance between two grid coordinates on the periodic axis, in grid
/// units: min((a-b) mod side, (b-a) mod side). Result is in [0, side/2].
std::int64_t torus_grid_distance(std::int64_t a, std::int64_t b, std::int64_t side);

/// An integer-valued scalar on the 2^n x 2^n grid. Indexed (i, j) where
/// the grid point is (i/side, j/side): i is the first coordinate (x1,
/// column), j the second (x2, row). Rows are contiguous in memory so
/// horizontal shears are contiguous row rotations.
///
/// Fields are inert values: no operation mutates shared state, and
/// read-only concurrent access is safe.
class Field {
public:
    explicit Field(GridExponent n_exp);  // all-zero field

    /// The half-and-half split: +1 where x1 < 1/2, -1 where x1 >= 1/2.
    static Field initial_datum(GridExponent n_exp);

    int n_exp() const { return n_exp_.n; }
    GridExponent exponent() const { return n_exp_; }
    std::int64_t side() const { return side_; }
    std::int64_t cells() const { return side_ * side_; }

    std::int8_t at(std::int64_t i, std::int64_t j) const { return data_[j * side_ + i]; }
    void set(std::int64_t i, std::int64_t j, std::int8_t v);

    std::span<const std::int8_t> row(std::int64_t j) const {
        return {data_.data() + j * side_, static_cast<std::size_t>(side_)};
    }
    std::span<std::int8_t> row(std::int64_t j) {
        return {data_.data() + j * side_, static_cast<std::size_t>(side_)};
    }
    std::span<const std::int8_t> values() const { return {data_.data(), data_.size()}; }

    /// Cached max |value|; recomputed lazily after mutation through set().
    int sup_norm() const;

    std::int64_t total_sum() const;

    bool operator==(const Field& other) const {
        return n_exp_.n == other.n_exp_.n && data_ == other.data_;
    }

    /// Used by advection to carry the cache across permutations.
    void adopt_sup_cache_from(const Field& src);

private:
    GridExponent n_exp_;
    std::int64_t side_;
    std::vector<std::int8_t> data_;
    mutable int sup_ = 0;
    mutable bool sup_valid_ = false;
};

/// Exact mean (as a reduced rational) and sup norm of a field.
std::pair<boost::rational<std::int64_t>, int> field_mean_and_supnorm(const Field& f);

}  // namespace wedgemix
