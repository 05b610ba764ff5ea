#pragma once

#include <string>
#include <vector>

namespace plth {

// Closed interval [lo, hi].  Degenerate intervals (lo == hi) are allowed
// and represent single points.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
};

// A finite union of closed intervals kept in canonical form: sorted by lo,
// pairwise disjoint, with components closer than kMergeTol fused into one.
// All operations are pure value semantics: inputs are never mutated and the
// result is freshly normalized, so instances can be shared across threads.
class IntervalUnion {
public:
    // Components whose gap is <= kMergeTol get merged during normalization.
    static constexpr double kMergeTol = 1e-12;

    IntervalUnion() = default;

    // Normalizes an arbitrary list of intervals.  Throws std::invalid_argument
    // if any interval has lo > hi or a non-finite endpoint.
    explicit IntervalUnion(std::vector<Interval> raw);

    static IntervalUnion point(double x) { return IntervalUnion({{x, x}}); }
    static IntervalUnion segment(double lo, double hi) { return IntervalUnion({{lo, hi}}); }

    bool empty() const { return parts_.size() == 0; }
    std::size_t size() const { return parts_.size(); }
    const std::vector<Interval>& parts() const { return parts_; }
    const Interval& operator[](std::size_t i) const { return parts_[i]; }

    // Total length of all components.
    double measure() const;

    // Distance from z to the nearest point of the set; +infinity when empty.
    double distance_to(double z) const;

    bool contains(double z) const { return distance_to(z) == 0.0; }

    std::string to_string() const;

private:
    std::vector<Interval> parts_;

    friend IntervalUnion union_of(const IntervalUnion&, const IntervalUnion&);
    friend IntervalUnion translate(const IntervalUnion&, double);
    friend IntervalUnion dilate(const IntervalUnion&, double);
    friend IntervalUnion intersect_window(const IntervalUnion&, double, double);
    friend IntervalUnion intersect(const IntervalUnion&, const IntervalUnion&);
    friend IntervalUnion subtract(const IntervalUnion&, const IntervalUnion&);

    // Trusted fast path for internal use: `sorted` must already be canonical.
    static IntervalUnion from_canonical(std::vector<Interval> sorted);
};

// Set union of two interval unions.
IntervalUnion union_of(const IntervalUnion& a, const IntervalUnion& b);

// Shifts every component by `shift` (must be finite).
IntervalUnion translate(const IntervalUnion& a, double shift);

// Minkowski sum with [-radius, +radius]; radius must be >= 0 and finite.
IntervalUnion dilate(const IntervalUnion& a, double radius);

// Intersection with the window [lo, hi]; requires lo <= hi.
IntervalUnion intersect_window(const IntervalUnion& a, double lo, double hi);

// General set intersection.
IntervalUnion intersect(const IntervalUnion& a, const IntervalUnion& b);

// Set difference a \ b (up to boundary points of measure zero).
IntervalUnion subtract(const IntervalUnion& a, const IntervalUnion& b);

// Picks a subset S of [-1/2, 1/2] \ f with measure exactly
// min(eps, 1 - measure(f)) such that every point of S lies within eps of f.
// f must be nonempty and contained in [-1/2, 1/2]; eps must be >= 0.
// The choice is deterministic: each component of f is first extended to the
// left, then to the right, in ascending order, clipping at the window edges
// and at the other components; a final sweep over all eligible complement
// pieces covers anything the directed passes missed.
IntervalUnion epsilon_extension(const IntervalUnion& f, double eps);

}  // namespace plth
