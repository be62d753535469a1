#pragma once

#include <cstdint>
#include <vector>

#include "wedgemix/field.hpp"
#include "wedgemix/packed_field.hpp"

namespace wedgemix {

/// Mixing threshold kappa = num/den, constrained to (0, 1).
struct Kappa {
    std::int64_t num = 1;
    std::int64_t den = 3;

    Kappa() = default;
    Kappa(std::int64_t num, std::int64_t den);
};

/// Exact integer sums of a field over every dyadic square. Level n
/// splits the torus into 2^n x 2^n squares; entry (i, j) of level n is
/// the sum over grid cells [i*2^(N-n), (i+1)*2^(N-n)) x [same for j].
/// Level N is the field itself, level 0 the total sum.
class BlockSumPyramid {
public:
    explicit BlockSumPyramid(const Field& f);

    int n_exp() const { return n_exp_; }
    std::int64_t sum(int n, std::int64_t i, std::int64_t j) const {
        return levels_[n][(j << n) + i];
    }
    const std::vector<std::int64_t>& level(int n) const { return levels_[n]; }

private:
    int n_exp_;
    std::vector<std::vector<std::int64_t>> levels_;
};

/// True iff every level-n block satisfies den*|sum| <= num*sup_norm*4^(N-n),
/// i.e. every block average has magnitude <= kappa*sup. Exact integers.
bool is_mixed_at_level(const BlockSumPyramid& p, int n, Kappa kappa, int sup_norm);

/// Largest n such that is_mixed_at_level(p, n, ...) holds; the mixing
/// scale is 2^(-n). Throws std::domain_error when not even level 0 is
/// mixed (non-mean-zero input).
int mixing_scale_exponent(const BlockSumPyramid& p, Kappa kappa, int sup_norm);

/// Reusable buffers for the packed analyzer; sized on first use per
/// grid exponent and reused across calls.
struct PackedMixingScratch {
    std::vector<std::uint8_t> quad;    // level N-2 block counts, <= 16
    std::vector<std::uint8_t> oct;     // level N-3 block counts, <= 64
    std::vector<std::int64_t> coarse;  // ping-pong for levels N-4..0
    std::vector<std::int64_t> coarse2;
};

/// Same result as the pyramid-based overload on f.unpack() (sup norm is
/// 1 by construction), computed from the packed bits without
/// materializing per-cell sums. Works in the field's current storage
/// layout: transposition permutes the dyadic squares at each level, so
/// per-level extreme block sums are unchanged.
int mixing_scale_exponent(const PackedField& f, Kappa kappa, PackedMixingScratch& scratch);

}  // namespace wedgemix
