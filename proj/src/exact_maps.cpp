#include "wedgemix/exact_maps.hpp"

#include <sstream>

namespace wedgemix {

namespace {

const Rational kHalf(BigInt(1), BigInt(2));

/// Slope sign of the wedge profile d(coord, omega): +1 on the rising
/// half, -1 on the falling half, error at the kinks.
std::int64_t branch_sign(const Rational& coord, const Rational& omega) {
    const Rational t = wrap_unit(coord - omega);
    // Compare via numerator: rational<cpp_int> vs plain int recurses in boost.
    if (t.numerator() == 0 || t == kHalf) {
        throw NonDifferentiableError("wedge profile is not differentiable at offset " +
                                     to_string(t) + " (coord " + to_string(coord) + ", omega " +
                                     to_string(omega) + ")");
    }
    return t < kHalf ? 1 : -1;
}

BranchMatrix shear_matrix(Direction direction, std::int64_t tau, std::int64_t sigma) {
    const std::int64_t off = tau * sigma;
    if (direction == Direction::Horizontal) return {1, off, 0, 1};
    return {1, 0, off, 1};
}

}  // namespace

Rational wrap_unit(const Rational& r) {
    // floor(num/den) with truncation corrected for negatives.
    BigInt q = r.numerator() / r.denominator();
    if (r.numerator() < 0 && q * r.denominator() != r.numerator()) --q;
    return r - Rational(q);
}

Rational unit_torus_distance(const Rational& a, const Rational& b) {
    const Rational d = wrap_unit(a - b);
    return d <= kHalf ? d : Rational(BigInt(1)) - d;
}

std::string to_string(const Rational& r) {
    std::ostringstream os;
    os << r.numerator();
    if (r.denominator() != 1) os << '/' << r.denominator();
    return os.str();
}

std::string to_string(const ExactPoint& p) {
    return "(" + to_string(p.x1) + ", " + to_string(p.x2) + ")";
}

ExactPoint exact_flow_map(const ExactPoint& p, Direction direction, const Rational& omega,
                          std::int64_t tau) {
    const Rational t{BigInt(tau)};
    if (direction == Direction::Horizontal) {
        return {wrap_unit(p.x1 + t * unit_torus_distance(p.x2, omega)), p.x2};
    }
    return {p.x1, wrap_unit(p.x2 + t * unit_torus_distance(p.x1, omega))};
}

ExactPoint apply_word(const ExactPoint& p, const MapWord& word) {
    ExactPoint q = p;
    for (const MapApplication& app : word) {
        q = exact_flow_map(q, app.direction, app.omega, app.tau);
    }
    return q;
}

BranchMatrix operator*(const BranchMatrix& lhs, const BranchMatrix& rhs) {
    return {lhs.a * rhs.a + lhs.b * rhs.c, lhs.a * rhs.b + lhs.b * rhs.d,
            lhs.c * rhs.a + lhs.d * rhs.c, lhs.c * rhs.b + lhs.d * rhs.d};
}

std::string to_string(const BranchMatrix& m) {
    return "[[" + std::to_string(m.a) + ", " + std::to_string(m.b) + "], [" +
           std::to_string(m.c) + ", " + std::to_string(m.d) + "]]";
}

BranchMatrix orbit_jacobian(const ExactPoint& p, const MapWord& word) {
    if (word.empty()) throw std::invalid_argument("orbit_jacobian needs a nonempty word");
    BranchMatrix jac;  // identity
    ExactPoint q = p;
    for (const MapApplication& app : word) {
        const Rational& coord = (app.direction == Direction::Horizontal) ? q.x2 : q.x1;
        const std::int64_t sigma = branch_sign(coord, app.omega);
        jac = shear_matrix(app.direction, app.tau, sigma) * jac;  // chain rule, left factor last
        q = exact_flow_map(q, app.direction, app.omega, app.tau);
    }
    return jac;
}

ExactPoint ExactSegment::at(const Rational& t) const {
    return {wrap_unit(base.x1 + t * dx1), wrap_unit(base.x2 + t * dx2)};
}

bool ExactSegment::contains(const ExactPoint& q) const {
    Rational t;
    if (dx1.numerator() != 0) {
        t = wrap_unit((q.x1 - base.x1) / dx1);
    } else if (dx2.numerator() != 0) {
        t = wrap_unit((q.x2 - base.x2) / dx2);
    } else {
        throw std::invalid_argument("segment direction must be nonzero");
    }
    return t_lo < t && t < t_hi && at(t) == q;
}

CycleReport verify_segment_cycle(const std::vector<ExactSegment>& segments, const MapWord& word,
                                 int samples) {
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    if (segments.empty()) throw std::invalid_argument("segment cycle must be nonempty");

    CycleReport report;
    const std::size_t cycle = segments.size();
    for (std::size_t m = 0; m < cycle; ++m) {
        const ExactSegment& seg = segments[m];
        const Rational span = seg.t_hi - seg.t_lo;
        for (int i = 0; i < samples; ++i) {
            // Equispaced strictly interior parameters.
            const Rational t = seg.t_lo + span * Rational(BigInt(i + 1), BigInt(samples + 1));
            const ExactPoint start = seg.at(t);
            ExactPoint q = apply_word(start, word);
            if (!segments[(m + 1) % cycle].contains(q)) {
                report.failures.push_back(
                    {m, static_cast<std::size_t>(i), q,
                     "image of " + to_string(start) + " is not on the next segment"});
                continue;
            }
            for (std::size_t rep = 1; rep < cycle; ++rep) q = apply_word(q, word);
            if (!(q == start)) {
                report.failures.push_back({m, static_cast<std::size_t>(i), q,
                                           "orbit of " + to_string(start) +
                                               " does not close up after " +
                                               std::to_string(cycle) + " applications"});
            }
        }
    }
    report.passed = report.failures.empty();
    return report;
}

JordanReport jordan_check(const BranchMatrix& m) {
    JordanReport r;
    r.det_one = (m.det() == 1);
    r.trace_two = (m.trace() == 2);
    r.not_identity = !(m == BranchMatrix{});
    r.similar_to_jordan_block = r.det_one && r.trace_two && r.not_identity;
    r.ones_vector_fixed = (m.a + m.b == 1) && (m.c + m.d == 1);
    return r;
}

}  // namespace wedgemix
