#include "wedgemix/advection.hpp"

#include <cstring>

namespace wedgemix {

namespace {

// Net rightward rotation, reduced to [0, side). tau % side keeps the
// product below 2^60 for side <= 2^30.
int64_t rotation_amount(int64_t tau, int64_t dist, int64_t side) {
    int64_t r = ((tau % side) * dist) % side;
    if (r < 0) r += side;
    return r;
}

}  // namespace

Field unit_shear_step(const Field& f, Direction dir, Phase phase) {
    return apply_flow_map(f, dir, phase, FlowTime{1});
}

Field apply_flow_map(const Field& f, Direction dir, Phase phase, FlowTime tau) {
    const int64_t side = f.side();
    Field out(f.exponent());
    if (dir == Direction::Horizontal) {
        for (int64_t j = 0; j < side; ++j) {
            const int64_t s = torus_grid_distance(j, phase.w, side);
            const int64_t r = rotation_amount(tau.tau, s, side);
            const std::int8_t* src = f.row(j).data();
            std::int8_t* dst = out.row(j).data();
            // out(i) = in(i - r): copy tail then head.
            std::memcpy(dst + r, src, static_cast<std::size_t>(side - r));
            std::memcpy(dst, src + (side - r), static_cast<std::size_t>(r));
        }
    } else {
        for (int64_t i = 0; i < side; ++i) {
            const int64_t s = torus_grid_distance(i, phase.w, side);
            const int64_t r = rotation_amount(tau.tau, s, side);
            for (int64_t j = 0; j < side; ++j) {
                int64_t jj = j - r;
                if (jj < 0) jj += side;
                out.row(j)[i] = f.at(i, jj);
            }
        }
    }
    out.adopt_sup_cache_from(f);
    return out;
}

Field naive_pullback_oracle(const Field& f, Direction dir, Phase phase, FlowTime tau) {
    const int64_t side = f.side();
    Field out(f.exponent());
    for (int64_t j = 0; j < side; ++j) {
        for (int64_t i = 0; i < side; ++i) {
            int64_t si, sj;
            if (dir == Direction::Horizontal) {
                const int64_t s = torus_grid_distance(j, phase.w, side);
                si = i - rotation_amount(tau.tau, s, side);
                if (si < 0) si += side;
                sj = j;
            } else {
                const int64_t s = torus_grid_distance(i, phase.w, side);
                si = i;
                sj = j - rotation_amount(tau.tau, s, side);
                if (sj < 0) sj += side;
            }
            out.row(j)[i] = f.at(si, sj);
        }
    }
    out.adopt_sup_cache_from(f);
    return out;
}

}  // namespace wedgemix
