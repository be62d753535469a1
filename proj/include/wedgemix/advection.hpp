#pragma once

#include "wedgemix/field.hpp"

namespace wedgemix {

enum class Direction { Horizontal, Vertical };

/// One unit time step of a wedge shear. Horizontal: row j is rotated
/// right by torus_grid_distance(j, w, side) cells; vertical: column i is
/// rotated by torus_grid_distance(i, w, side). Both are exact
/// permutations of the grid cells.
Field unit_shear_step(const Field& f, Direction dir, Phase phase);

/// Time-tau shear map pullback: equivalent to |tau| unit steps (inverse
/// steps for negative tau), implemented as a single rotation per
/// row/column. tau = 0 returns the input unchanged.
Field apply_flow_map(const Field& f, Direction dir, Phase phase, FlowTime tau);

/// Same contract as apply_flow_map, evaluated point by point straight
/// from the pullback formula with no rotation shortcut. Test oracle;
/// intended for side <= 2^8.
Field naive_pullback_oracle(const Field& f, Direction dir, Phase phase, FlowTime tau);

}  // namespace wedgemix
