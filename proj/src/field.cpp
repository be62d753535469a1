#include "wedgemix/field.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <string>

namespace wedgemix {

GridExponent::GridExponent(int n_exp) : n(n_exp) {
    if (n_exp < 1 || n_exp > 30) {
        throw std::invalid_argument("grid exponent must be in [1, 30], got " +
                                    std::to_string(n_exp));
    }
}

std::int64_t torus_grid_distance(std::int64_t a, std::int64_t b, std::int64_t side) {
    std::int64_t d = (a - b) % side;
    if (d < 0) d += side;
    return std::min(d, side - d);
}

Field::Field(GridExponent n_exp)
    : n_exp_(n_exp),
      side_(n_exp.side()),
      data_(static_cast<std::size_t>(n_exp.cells()), 0),
      sup_(0),
      sup_valid_(true) {}

Field Field::initial_datum(GridExponent n_exp) {
    Field f(n_exp);
    const std::int64_t half = f.side_ / 2;
    for (std::int64_t j = 0; j < f.side_; ++j) {
        auto r = f.row(j);
        for (std::int64_t i = 0; i < f.side_; ++i) r[i] = i < half ? 1 : -1;
    }
    f.sup_ = 1;
    f.sup_valid_ = true;
    return f;
}

void Field::set(std::int64_t i, std::int64_t j, std::int8_t v) {
    data_[j * side_ + i] = v;
    sup_valid_ = false;
}

int Field::sup_norm() const {
    if (!sup_valid_) {
        int s = 0;
        for (std::int8_t v : data_) s = std::max(s, std::abs(static_cast<int>(v)));
        sup_ = s;
        sup_valid_ = true;
    }
    return sup_;
}

std::int64_t Field::total_sum() const {
    std::int64_t s = 0;
    for (std::int8_t v : data_) s += v;
    return s;
}

void Field::adopt_sup_cache_from(const Field& src) {
    if (src.sup_valid_) {
        sup_ = src.sup_;
        sup_valid_ = true;
    } else {
        sup_valid_ = false;
    }
}

std::pair<boost::rational<std::int64_t>, int> field_mean_and_supnorm(const Field& f) {
    std::int64_t sum = 0;
    int sup = 0;
    for (std::int8_t v : f.values()) {
        sum += v;
        sup = std::max(sup, std::abs(static_cast<int>(v)));
    }
    return {boost::rational<std::int64_t>(sum, f.cells()), sup};
}

}  // namespace wedgemix
