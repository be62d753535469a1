#include "wedgemix/packed_field.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace wedgemix {

namespace {

int64_t rotation_amount(int64_t tau, int64_t dist, int64_t side) {
    int64_t r = ((tau % side) * dist) % side;
    if (r < 0) r += side;
    return r;
}

/// dst = src rotated right by r bits, bit position c reading from
/// c - r mod side. LSB-first, so "right" means toward higher positions.
void rotate_row_right(const std::uint64_t* src, std::uint64_t* dst, int64_t words, int64_t r) {
    const int64_t rw = r >> 6;
    const int sb = static_cast<int>(r & 63);
    // k0 walks (k - rw) mod words without division in the loop.
    int64_t k0 = (words - rw) % words;
    if (sb == 0) {
        for (int64_t k = 0; k < words; ++k) {
            dst[k] = src[k0];
            if (++k0 == words) k0 = 0;
        }
    } else {
        int64_t k1 = (k0 == 0) ? words - 1 : k0 - 1;
        for (int64_t k = 0; k < words; ++k) {
            dst[k] = (src[k0] << sb) | (src[k1] >> (64 - sb));
            if (++k0 == words) k0 = 0;
            if (++k1 == words) k1 = 0;
        }
    }
}

}  // namespace

void transpose64(std::uint64_t a[64]) {
    // Swap off-diagonal s x s sub-blocks of each 2s x 2s block; the six
    // levels compose to a full transpose and commute with each other.
    for (int s = 1; s < 64; s <<= 1) {
        std::uint64_t mask = 0;
        for (int c = 0; c < 64; ++c) {
            if (c & s) mask |= std::uint64_t{1} << c;
        }
        for (int i = 0; i < 64; ++i) {
            if (i & s) continue;
            const std::uint64_t t = (a[i] ^ (a[i + s] << s)) & mask;
            a[i] ^= t;
            a[i + s] ^= t >> s;
        }
    }
}

PackedField::PackedField(GridExponent n_exp)
    : n_exp_(n_exp), side_(n_exp.side()), words_per_row_(side_ / 64) {
    if (n_exp.n < 6) {
        throw std::invalid_argument("packed field needs side >= 64, got exponent " +
                                    std::to_string(n_exp.n));
    }
    data_.assign(static_cast<std::size_t>(side_ * words_per_row_), 0);
    scratch_.assign(data_.size(), 0);
}

PackedField PackedField::initial_datum(GridExponent n_exp) {
    PackedField f(n_exp);
    const int64_t half = f.side_ / 2;
    for (int64_t k = 0; k < f.words_per_row_; ++k) {
        std::uint64_t w;
        if ((k + 1) * 64 <= half) {
            w = ~std::uint64_t{0};
        } else if (k * 64 >= half) {
            w = 0;
        } else {
            w = (std::uint64_t{1} << (half - k * 64)) - 1;
        }
        for (int64_t t = 0; t < f.side_; ++t) f.data_[t * f.words_per_row_ + k] = w;
    }
    return f;
}

PackedField PackedField::pack(const Field& f) {
    PackedField p(f.exponent());
    for (int64_t j = 0; j < p.side_; ++j) {
        auto row = f.row(j);
        std::uint64_t* dst = p.data_.data() + j * p.words_per_row_;
        for (int64_t i = 0; i < p.side_; ++i) {
            const int v = row[i];
            if (v != 1 && v != -1) {
                throw std::invalid_argument("pack requires a {-1,+1}-valued field");
            }
            if (v == 1) dst[i >> 6] |= std::uint64_t{1} << (i & 63);
        }
    }
    return p;
}

Field PackedField::unpack() const {
    Field f(n_exp_);
    for (int64_t t = 0; t < side_; ++t) {
        const std::uint64_t* src = storage_row(t);
        for (int64_t c = 0; c < side_; ++c) {
            const auto v = static_cast<std::int8_t>((src[c >> 6] >> (c & 63)) & 1 ? 1 : -1);
            if (transposed_) {
                f.set(t, c, v);
            } else {
                f.set(c, t, v);
            }
        }
    }
    return f;
}

int PackedField::value_at(std::int64_t i, std::int64_t j) const {
    const int64_t t = transposed_ ? i : j;
    const int64_t c = transposed_ ? j : i;
    return (storage_row(t)[c >> 6] >> (c & 63)) & 1 ? 1 : -1;
}

void PackedField::transpose_storage() {
    const int64_t w = words_per_row_;
    std::uint64_t tile[64];
    for (int64_t tr = 0; tr < w; ++tr) {
        for (int64_t tc = 0; tc < w; ++tc) {
            const std::uint64_t* src = data_.data() + (tr * 64) * w + tc;
            for (int r = 0; r < 64; ++r) tile[r] = src[r * w];
            transpose64(tile);
            std::uint64_t* dst = scratch_.data() + (tc * 64) * w + tr;
            for (int c = 0; c < 64; ++c) dst[c * w] = tile[c];
        }
    }
    data_.swap(scratch_);
    transposed_ = !transposed_;
}

void PackedField::set_layout(bool want_transposed) {
    if (transposed_ != want_transposed) transpose_storage();
}

void PackedField::shear(Direction dir, Phase phase, FlowTime tau) {
    set_layout(dir == Direction::Vertical);
    if (tau.tau == 0) return;
    for (int64_t t = 0; t < side_; ++t) {
        const int64_t s = torus_grid_distance(t, phase.w, side_);
        const int64_t r = rotation_amount(tau.tau, s, side_);
        rotate_row_right(data_.data() + t * words_per_row_,
                         scratch_.data() + t * words_per_row_, words_per_row_, r);
    }
    data_.swap(scratch_);
}

std::int64_t PackedField::popcount() const {
    std::int64_t c = 0;
    for (std::uint64_t w : data_) c += std::popcount(w);
    return c;
}

bool PackedField::logically_equal(const PackedField& other) const {
    if (n_exp_.n != other.n_exp_.n) return false;
    if (transposed_ == other.transposed_) return data_ == other.data_;
    for (int64_t j = 0; j < side_; ++j) {
        for (int64_t i = 0; i < side_; ++i) {
            if (value_at(i, j) != other.value_at(i, j)) return false;
        }
    }
    return true;
}

}  // namespace wedgemix
