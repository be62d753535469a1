#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include "wedgemix/advection.hpp"

namespace wedgemix {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::rational<BigInt>;

/// r mod 1, reduced into [0, 1).
Rational wrap_unit(const Rational& r);

/// min((a-b) mod 1, (b-a) mod 1): the wedge speed profile, exact.
Rational unit_torus_distance(const Rational& a, const Rational& b);

struct ExactPoint {
    Rational x1, x2;  // both kept in [0, 1)

    bool operator==(const ExactPoint&) const = default;
};

std::string to_string(const Rational& r);
std::string to_string(const ExactPoint& p);

/// One shear application within a composed word.
struct MapApplication {
    Direction direction = Direction::Horizontal;
    Rational omega;
    std::int64_t tau = 1;
};

/// Applications listed in the order they act (index 0 acts first).
using MapWord = std::vector<MapApplication>;

/// Time-tau wedge shear on exact torus points. Horizontal moves
/// x1 by tau * d(x2, omega); Vertical moves x2 by tau * d(x1, omega).
ExactPoint exact_flow_map(const ExactPoint& p, Direction direction, const Rational& omega,
                          std::int64_t tau);

ExactPoint apply_word(const ExactPoint& p, const MapWord& word);

/// 2x2 integer matrix [[a, b], [c, d]].
struct BranchMatrix {
    std::int64_t a = 1, b = 0, c = 0, d = 1;

    bool operator==(const BranchMatrix&) const = default;
    std::int64_t det() const { return a * d - b * c; }
    std::int64_t trace() const { return a + d; }
};

BranchMatrix operator*(const BranchMatrix& lhs, const BranchMatrix& rhs);
std::string to_string(const BranchMatrix& m);

/// Raised when a Jacobian is requested at a point where some
/// application acts on the non-smooth locus of the wedge profile
/// ((coord - omega) mod 1 equal to 0 or 1/2).
class NonDifferentiableError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Derivative of the composed word along the orbit of p: the product,
/// in application order, of per-application branch matrices
/// [[1, tau*sigma], [0, 1]] (Horizontal) or [[1, 0], [tau*sigma, 1]]
/// (Vertical), where sigma is the slope sign of the wedge profile at
/// the point each application acts on.
BranchMatrix orbit_jacobian(const ExactPoint& p, const MapWord& word);

/// Open segment {base + t * dir : t in (t_lo, t_hi)} on the torus.
/// Membership testing recovers t from the first nonzero direction
/// component; t is unique mod 1 only when that component is +-1, which
/// holds for every verified segment.
struct ExactSegment {
    ExactPoint base;
    Rational dx1, dx2;
    Rational t_lo, t_hi;

    ExactPoint at(const Rational& t) const;
    bool contains(const ExactPoint& q) const;
};

struct CycleFailure {
    std::size_t segment = 0;
    std::size_t sample = 0;
    ExactPoint point;
    std::string reason;
};

struct CycleReport {
    bool passed = true;
    std::vector<CycleFailure> failures;
};

/// Checks that `samples` equispaced interior points of each segment map
/// under one word application into the next segment (cyclically), and
/// return exactly to themselves after `segments.size()` applications.
CycleReport verify_segment_cycle(const std::vector<ExactSegment>& segments, const MapWord& word,
                                 int samples);

struct JordanReport {
    bool det_one = false;
    bool trace_two = false;
    bool not_identity = false;
    bool similar_to_jordan_block = false;  // conjunction of the above
    bool ones_vector_fixed = false;        // m * (1,1)^T == (1,1)^T
};

/// A 2x2 integer matrix is similar to [[1,1],[0,1]] iff det = 1,
/// trace = 2 and it is not the identity.
JordanReport jordan_check(const BranchMatrix& m);

}  // namespace wedgemix
