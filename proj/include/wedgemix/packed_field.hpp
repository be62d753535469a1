#pragma once

#include <cstdint>
#include <vector>

#include "wedgemix/advection.hpp"
#include "wedgemix/field.hpp"

namespace wedgemix {

/// A {-1,+1}-valued field stored one bit per cell (bit 1 <=> +1), LSB
/// first within 64-bit words. Requires side >= 64 (n_exp >= 6).
///
/// Storage is row-major over "storage rows". In normal layout storage
/// row t is grid row j = t (bit position c is column i = c); in
/// transposed layout storage row t is grid column i = t (bit position c
/// is row j = c). Either way a directional shear is a per-storage-row
/// bit rotation, so the engine transposes only when the shear direction
/// changes. Block averages are orientation-independent, so mixing
/// statistics can be read off in whichever layout is current.
class PackedField {
public:
    explicit PackedField(GridExponent n_exp);  // all cells -1

    /// The half-and-half split: +1 where x1 < 1/2, -1 where x1 >= 1/2.
    static PackedField initial_datum(GridExponent n_exp);

    /// Requires every cell of f to be -1 or +1.
    static PackedField pack(const Field& f);

    /// Expand to the byte-per-cell representation, in logical (i, j)
    /// orientation regardless of current layout.
    Field unpack() const;

    int n_exp() const { return n_exp_.n; }
    GridExponent exponent() const { return n_exp_; }
    std::int64_t side() const { return side_; }
    std::int64_t words_per_row() const { return words_per_row_; }
    bool transposed() const { return transposed_; }

    /// Value at logical grid point (i, j): +1 or -1.
    int value_at(std::int64_t i, std::int64_t j) const;

    /// Transpose storage if needed so transposed() == want.
    void set_layout(bool want_transposed);

    /// Pullback by the time-tau wedge shear. Adjusts layout to make the
    /// shear a row rotation, then rotates each storage row.
    void shear(Direction dir, Phase phase, FlowTime tau);

    /// Number of +1 cells.
    std::int64_t popcount() const;
    std::int64_t total_sum() const { return 2 * popcount() - side_ * side_; }

    const std::uint64_t* storage() const { return data_.data(); }
    const std::uint64_t* storage_row(std::int64_t t) const {
        return data_.data() + t * words_per_row_;
    }

    /// Same field values at every logical grid point (layouts may differ).
    bool logically_equal(const PackedField& other) const;

private:
    void transpose_storage();

    GridExponent n_exp_;
    std::int64_t side_;
    std::int64_t words_per_row_;
    bool transposed_ = false;
    std::vector<std::uint64_t> data_;
    std::vector<std::uint64_t> scratch_;
};

/// Transpose a 64x64 bit matrix held as 64 words (word r = row r, bit c
/// = column c), in place.
void transpose64(std::uint64_t a[64]);

}  // namespace wedgemix
