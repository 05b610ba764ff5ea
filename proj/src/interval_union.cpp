#include "plth/interval_union.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace plth {

namespace {

void check_interval(const Interval& iv) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi))
        throw std::invalid_argument("interval endpoint is not finite");
    if (iv.lo > iv.hi)
        throw std::invalid_argument("interval has lo > hi");
}

// Merge a sorted list of valid intervals in place.
void merge_sorted(std::vector<Interval>& parts) {
    std::size_t out = 0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (out > 0 && parts[i].lo <= parts[out - 1].hi + IntervalUnion::kMergeTol) {
            parts[out - 1].hi = std::max(parts[out - 1].hi, parts[i].hi);
        } else {
            parts[out++] = parts[i];
        }
    }
    parts.resize(out);
}

}  // namespace

IntervalUnion::IntervalUnion(std::vector<Interval> raw) : parts_(std::move(raw)) {
    for (const Interval& iv : parts_) check_interval(iv);
    std::sort(parts_.begin(), parts_.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    merge_sorted(parts_);
}

IntervalUnion IntervalUnion::from_canonical(std::vector<Interval> sorted) {
    IntervalUnion u;
    u.parts_ = std::move(sorted);
    return u;
}

double IntervalUnion::measure() const {
    double total = 0.0;
    for (const Interval& iv : parts_) total += iv.hi - iv.lo;
    return total;
}

double IntervalUnion::distance_to(double z) const {
    if (parts_.empty()) return std::numeric_limits<double>::infinity();
    // First component with lo > z; the candidates are it and its predecessor.
    auto it = std::upper_bound(parts_.begin(), parts_.end(), z,
                               [](double v, const Interval& iv) { return v < iv.lo; });
    double best = std::numeric_limits<double>::infinity();
    if (it != parts_.end()) best = std::min(best, it->lo - z);
    if (it != parts_.begin()) {
        const Interval& prev = *(it - 1);
        best = std::min(best, prev.hi >= z ? 0.0 : z - prev.hi);
    }
    return best;
}

std::string IntervalUnion::to_string() const {
    std::ostringstream os;
    os << "{";
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        if (i) os << ", ";
        os << "[" << parts_[i].lo << ", " << parts_[i].hi << "]";
    }
    os << "}";
    return os.str();
}

IntervalUnion union_of(const IntervalUnion& a, const IntervalUnion& b) {
    std::vector<Interval> merged;
    merged.reserve(a.size() + b.size());
    std::merge(a.parts_.begin(), a.parts_.end(), b.parts_.begin(), b.parts_.end(),
               std::back_inserter(merged),
               [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
    merge_sorted(merged);
    return IntervalUnion::from_canonical(std::move(merged));
}

IntervalUnion translate(const IntervalUnion& a, double shift) {
    if (!std::isfinite(shift)) throw std::invalid_argument("translate: shift is not finite");
    std::vector<Interval> parts = a.parts_;
    for (Interval& iv : parts) {
        iv.lo += shift;
        iv.hi += shift;
    }
    // Order is preserved but a shift can close gaps to within the merge
    // tolerance, so re-run the merge pass.
    merge_sorted(parts);
    return IntervalUnion::from_canonical(std::move(parts));
}

IntervalUnion dilate(const IntervalUnion& a, double radius) {
    if (!std::isfinite(radius) || radius < 0.0)
        throw std::invalid_argument("dilate: radius must be finite and >= 0");
    std::vector<Interval> parts = a.parts_;
    for (Interval& iv : parts) {
        iv.lo -= radius;
        iv.hi += radius;
    }
    merge_sorted(parts);
    return IntervalUnion::from_canonical(std::move(parts));
}

IntervalUnion intersect_window(const IntervalUnion& a, double lo, double hi) {
    if (!(lo <= hi)) throw std::invalid_argument("intersect_window: requires lo <= hi");
    std::vector<Interval> parts;
    parts.reserve(a.size());
    for (const Interval& iv : a.parts_) {
        double l = std::max(iv.lo, lo);
        double h = std::min(iv.hi, hi);
        if (l <= h) parts.push_back({l, h});
    }
    return IntervalUnion::from_canonical(std::move(parts));
}

IntervalUnion intersect(const IntervalUnion& a, const IntervalUnion& b) {
    std::vector<Interval> parts;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const Interval& x = a.parts_[i];
        const Interval& y = b.parts_[j];
        double l = std::max(x.lo, y.lo);
        double h = std::min(x.hi, y.hi);
        if (l <= h) parts.push_back({l, h});
        if (x.hi < y.hi)
            ++i;
        else
            ++j;
    }
    // Pieces come out sorted and disjoint already, but adjacent pieces can sit
    // within the merge tolerance of each other.
    merge_sorted(parts);
    return IntervalUnion::from_canonical(std::move(parts));
}

IntervalUnion subtract(const IntervalUnion& a, const IntervalUnion& b) {
    std::vector<Interval> parts;
    std::size_t j = 0;
    for (const Interval& x : a.parts_) {
        double cursor = x.lo;
        while (j < b.size() && b.parts_[j].hi < cursor) ++j;
        std::size_t k = j;
        while (k < b.size() && b.parts_[k].lo <= x.hi) {
            const Interval& y = b.parts_[k];
            if (y.lo > cursor) parts.push_back({cursor, y.lo});
            cursor = std::max(cursor, y.hi);
            if (cursor >= x.hi) break;
            ++k;
        }
        if (cursor < x.hi) parts.push_back({cursor, x.hi});
    }
    merge_sorted(parts);
    return IntervalUnion::from_canonical(std::move(parts));
}

namespace {

// One piece of complement claimed by the extension under construction.
struct Claim {
    std::vector<Interval> pieces;
    IntervalUnion occupied;  // f plus everything claimed so far
    double remaining = 0.0;

    // Claims up to `remaining` length from `candidate`, preferring the side
    // nearest `anchor_hi ? candidate.hi : candidate.lo` of each free piece.
    void take(const Interval& candidate, bool from_right) {
        if (remaining <= IntervalUnion::kMergeTol) return;
        if (candidate.lo >= candidate.hi) return;
        IntervalUnion freed = subtract(IntervalUnion({candidate}), occupied);
        std::vector<Interval> order(freed.parts().begin(), freed.parts().end());
        if (from_right) std::reverse(order.begin(), order.end());
        for (const Interval& piece : order) {
            if (remaining <= IntervalUnion::kMergeTol) break;
            double len = std::min(piece.length(), remaining);
            if (len <= 0.0) continue;
            Interval got = from_right ? Interval{piece.hi - len, piece.hi}
                                      : Interval{piece.lo, piece.lo + len};
            pieces.push_back(got);
            occupied = union_of(occupied, IntervalUnion({got}));
            remaining -= len;
        }
    }
};

}  // namespace

IntervalUnion epsilon_extension(const IntervalUnion& f, double eps) {
    constexpr double kWinLo = -0.5;
    constexpr double kWinHi = 0.5;
    if (f.empty()) throw std::invalid_argument("epsilon_extension: set is empty");
    if (!std::isfinite(eps) || eps < 0.0)
        throw std::invalid_argument("epsilon_extension: eps must be finite and >= 0");
    if (f.parts().front().lo < kWinLo - IntervalUnion::kMergeTol ||
        f.parts().back().hi > kWinHi + IntervalUnion::kMergeTol)
        throw std::invalid_argument("epsilon_extension: set must lie within [-1/2, 1/2]");

    double needed = std::min(eps, 1.0 - f.measure());
    if (needed <= IntervalUnion::kMergeTol) return IntervalUnion();

    Claim claim;
    claim.occupied = f;
    claim.remaining = needed;

    // Left extensions, components in ascending order.
    for (const Interval& iv : f.parts()) {
        Interval cand{std::max(kWinLo, iv.lo - eps), iv.lo};
        claim.take(cand, /*from_right=*/true);
        if (claim.remaining <= IntervalUnion::kMergeTol) break;
    }
    // Right extensions.
    if (claim.remaining > IntervalUnion::kMergeTol) {
        for (const Interval& iv : f.parts()) {
            Interval cand{iv.hi, std::min(kWinHi, iv.hi + eps)};
            claim.take(cand, /*from_right=*/false);
            if (claim.remaining <= IntervalUnion::kMergeTol) break;
        }
    }
    // Fallback sweep over every complement piece within eps of f.  The two
    // directed passes already cover this region; the sweep guards against
    // leftovers from floating-point trims.
    if (claim.remaining > IntervalUnion::kMergeTol) {
        IntervalUnion eligible = intersect_window(dilate(f, eps), kWinLo, kWinHi);
        for (const Interval& iv : eligible.parts()) {
            claim.take(iv, /*from_right=*/false);
            if (claim.remaining <= IntervalUnion::kMergeTol) break;
        }
    }
    if (claim.remaining > 1e-9)
        throw std::runtime_error("epsilon_extension: could not reach required measure");
    return IntervalUnion(std::move(claim.pieces));
}

}  // namespace plth
