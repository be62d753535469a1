#include "wedgemix/mixing.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace wedgemix {

namespace {

using u64 = std::uint64_t;
using i128 = __int128;

constexpr u64 kK5 = 0x5555555555555555ull;  // every other bit
constexpr u64 kK3 = 0x3333333333333333ull;  // low 2 bits of each nibble
constexpr u64 kK1 = 0x1111111111111111ull;  // bit 0 of each nibble
constexpr u64 kK8 = 0x8888888888888888ull;  // bit 3 of each nibble
constexpr u64 kKF = 0x0F0F0F0F0F0F0F0Full;  // low nibble of each byte

/// den*|2p - c| <= num*c for a block of c cells holding p ones (sup = 1).
bool count_range_mixed(std::int64_t pmin, std::int64_t pmax, std::int64_t c, Kappa kappa) {
    const std::int64_t dev = std::max(2 * pmax - c, c - 2 * pmin);
    return static_cast<i128>(kappa.den) * dev <= static_cast<i128>(kappa.num) * c;
}

}  // namespace

Kappa::Kappa(std::int64_t num_, std::int64_t den_) : num(num_), den(den_) {
    if (num <= 0 || den <= 0 || num >= den) {
        throw std::invalid_argument("kappa must satisfy 0 < num/den < 1, got " +
                                    std::to_string(num) + "/" + std::to_string(den));
    }
}

BlockSumPyramid::BlockSumPyramid(const Field& f) : n_exp_(f.n_exp()) {
    levels_.resize(n_exp_ + 1);
    auto& base = levels_[n_exp_];
    base.assign(f.values().begin(), f.values().end());
    for (int n = n_exp_ - 1; n >= 0; --n) {
        const auto& fine = levels_[n + 1];
        auto& coarse = levels_[n];
        const std::int64_t w = std::int64_t{1} << n;
        coarse.resize(static_cast<std::size_t>(w) * w);
        for (std::int64_t j = 0; j < w; ++j) {
            const std::int64_t* ra = fine.data() + (2 * j) * (2 * w);
            const std::int64_t* rb = ra + 2 * w;
            std::int64_t* dst = coarse.data() + j * w;
            for (std::int64_t i = 0; i < w; ++i) {
                dst[i] = ra[2 * i] + ra[2 * i + 1] + rb[2 * i] + rb[2 * i + 1];
            }
        }
    }
}

bool is_mixed_at_level(const BlockSumPyramid& p, int n, Kappa kappa, int sup_norm) {
    const i128 bound = static_cast<i128>(kappa.num) * sup_norm
                       << (2 * (p.n_exp() - n));
    for (std::int64_t s : p.level(n)) {
        const std::int64_t a = s < 0 ? -s : s;
        if (static_cast<i128>(kappa.den) * a > bound) return false;
    }
    return true;
}

int mixing_scale_exponent(const BlockSumPyramid& p, Kappa kappa, int sup_norm) {
    for (int n = p.n_exp(); n >= 0; --n) {
        if (is_mixed_at_level(p, n, kappa, sup_norm)) return n;
    }
    throw std::domain_error("field is not mixed at any scale (mean exceeds kappa*sup)");
}

int mixing_scale_exponent(const PackedField& f, Kappa kappa, PackedMixingScratch& scratch) {
    const int N = f.n_exp();
    const std::int64_t side = f.side();
    const std::int64_t words = f.words_per_row();

    // Level N: single cells, |value| = sup, never mixed since kappa < 1.

    // Level N-1 (2x2 blocks): a nibble count p in [0,4] passes iff
    // lo1 <= p <= hi1, the integer solution of den*|2p-4| <= 4*num.
    const std::int64_t lo1 = std::max<std::int64_t>(
        0, (2 * (kappa.den - kappa.num) + kappa.den - 1) / kappa.den);
    const std::int64_t hi1 = std::min<std::int64_t>(7, 2 * (kappa.den + kappa.num) / kappa.den);
    const u64 off_hi = static_cast<u64>(7 - hi1) * kK1;
    const u64 off_lo = static_cast<u64>(8 - lo1) * kK1;

    const std::int64_t quad_side = side / 4;
    scratch.quad.resize(static_cast<std::size_t>(quad_side) * quad_side);

    u64 viol = 0;
    for (std::int64_t q = 0; q < side / 4; ++q) {
        const u64* r0 = f.storage_row(4 * q);
        const u64* r1 = f.storage_row(4 * q + 1);
        const u64* r2 = f.storage_row(4 * q + 2);
        const u64* r3 = f.storage_row(4 * q + 3);
        std::uint8_t* dst = scratch.quad.data() + q * quad_side;
        for (std::int64_t k = 0; k < words; ++k) {
            // Nibble u of pair-sums: 2x2 block count over columns
            // 64k+4u..+1 (sE) resp. +2..+3 (sO), the two rows of the pair.
            // Values <= 4, so nibble bit 3 is free for the range test:
            // bit 3 of v + (7-hi1) fires iff v > hi1; bit 3 of
            // v + (8-lo1) fires iff v >= lo1 (sums stay < 16).
            auto pair4 = [&](u64 a, u64 b) {
                const u64 ca = (a & kK5) + ((a >> 1) & kK5);
                const u64 cb = (b & kK5) + ((b >> 1) & kK5);
                const u64 se = (ca & kK3) + (cb & kK3);
                const u64 so = ((ca >> 2) & kK3) + ((cb >> 2) & kK3);
                viol |= (se + off_hi) & kK8;
                viol |= ~(se + off_lo) & kK8;
                viol |= (so + off_hi) & kK8;
                viol |= ~(so + off_lo) & kK8;
                return se + so;  // nibble u: columns 64k+4u..+3, both rows
            };
            const u64 c4a = pair4(r0[k], r1[k]);
            const u64 c4b = pair4(r2[k], r3[k]);
            // Byte lane m of be/bo holds the 4x4 count of level N-2
            // block column 16k + 2m resp. 16k + 2m + 1 (<= 16).
            const u64 be = (c4a & kKF) + (c4b & kKF);
            const u64 bo = ((c4a >> 4) & kKF) + ((c4b >> 4) & kKF);
            std::uint8_t* out = dst + 16 * k;
            for (int m = 0; m < 8; ++m) {
                out[2 * m] = static_cast<std::uint8_t>(be >> (8 * m));
                out[2 * m + 1] = static_cast<std::uint8_t>(bo >> (8 * m));
            }
        }
    }
    // For any kappa in (0,1), lo1 in {1,2} and hi1 in {2,3}: the passing
    // range is never empty, so viol == 0 is exactly "level N-1 mixed".
    if (viol == 0) return N - 1;

    {
        auto [mn, mx] = std::minmax_element(scratch.quad.begin(), scratch.quad.end());
        if (count_range_mixed(*mn, *mx, 16, kappa)) return N - 2;
    }

    const std::int64_t oct_side = side / 8;
    scratch.oct.resize(static_cast<std::size_t>(oct_side) * oct_side);
    for (std::int64_t j = 0; j < oct_side; ++j) {
        const std::uint8_t* ra = scratch.quad.data() + (2 * j) * quad_side;
        const std::uint8_t* rb = ra + quad_side;
        std::uint8_t* dst = scratch.oct.data() + j * oct_side;
        for (std::int64_t i = 0; i < oct_side; ++i) {
            dst[i] = static_cast<std::uint8_t>(ra[2 * i] + ra[2 * i + 1] + rb[2 * i] +
                                               rb[2 * i + 1]);
        }
    }
    {
        auto [mn, mx] = std::minmax_element(scratch.oct.begin(), scratch.oct.end());
        if (count_range_mixed(*mn, *mx, 64, kappa)) return N - 3;
    }

    // Levels N-4 down to 0: widen to int64 and halve repeatedly.
    std::int64_t w = side / 16;
    scratch.coarse.resize(static_cast<std::size_t>(w) * w);
    scratch.coarse2.resize(static_cast<std::size_t>(w) * w);
    std::int64_t pmin = std::numeric_limits<std::int64_t>::max();
    std::int64_t pmax = std::numeric_limits<std::int64_t>::min();
    for (std::int64_t j = 0; j < w; ++j) {
        const std::uint8_t* ra = scratch.oct.data() + (2 * j) * oct_side;
        const std::uint8_t* rb = ra + oct_side;
        std::int64_t* dst = scratch.coarse.data() + j * w;
        for (std::int64_t i = 0; i < w; ++i) {
            const std::int64_t v = std::int64_t{ra[2 * i]} + ra[2 * i + 1] + rb[2 * i] +
                                   rb[2 * i + 1];
            dst[i] = v;
            pmin = std::min(pmin, v);
            pmax = std::max(pmax, v);
        }
    }
    std::int64_t cells = 256;
    int n = N - 4;
    std::int64_t* cur = scratch.coarse.data();
    std::int64_t* nxt = scratch.coarse2.data();
    while (true) {
        if (count_range_mixed(pmin, pmax, cells, kappa)) return n;
        if (n == 0) break;
        pmin = std::numeric_limits<std::int64_t>::max();
        pmax = std::numeric_limits<std::int64_t>::min();
        for (std::int64_t j = 0; j < w / 2; ++j) {
            const std::int64_t* ra = cur + (2 * j) * w;
            const std::int64_t* rb = ra + w;
            std::int64_t* dst = nxt + j * (w / 2);
            for (std::int64_t i = 0; i < w / 2; ++i) {
                const std::int64_t v = ra[2 * i] + ra[2 * i + 1] + rb[2 * i] + rb[2 * i + 1];
                dst[i] = v;
                pmin = std::min(pmin, v);
                pmax = std::max(pmax, v);
            }
        }
        std::swap(cur, nxt);
        w /= 2;
        cells *= 4;
        --n;
    }
    throw std::domain_error("field is not mixed at any scale (mean exceeds kappa*sup)");
}

}  // namespace wedgemix
