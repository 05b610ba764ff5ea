#pragma once

#include <cstdint>
#include <vector>

#include "plth/interval_union.hpp"

namespace plth {

// A pool of candidate values together with the per-value perturbation
// budget eps: each selected value x_i may be shifted by any y_i with
// |y_i| <= eps before summing.
struct CandidateSet {
    std::vector<double> values;
    double eps = 0.0;
};

// Result of a solver run: mask[i] == 1 iff values[i] is selected,
// perturbations[i] is the applied shift (0 wherever mask[i] == 0), and
// error = |sum(selected perturbed values) - target|.
struct PerturbedSolution {
    std::vector<std::uint8_t> mask;
    std::vector<double> perturbations;
    double error = 0.0;

    std::size_t selected_count() const;
};

// Optimal perturbation for a fixed selection mask.
struct InnerOptimum {
    double error = 0.0;
    std::vector<double> y;
};

// Minimizes |sum_{i in mask}(values[i] + y_i) - z| over |y_i| <= eps.
// With k selected values and residual r = z - sum(selected values), the
// optimum is max(0, |r| - k*eps), attained by the uniform shift
// y_i = clamp(r/k, -eps, +eps).  Validated against a grid oracle in tests.
InnerOptimum optimal_error_for_mask(const std::vector<double>& values,
                                    const std::vector<std::uint8_t>& mask,
                                    double eps, double z);

// Exhaustive search over all 2^n masks; n <= 30.  Ties on error prefer
// fewer selected values, then the lexicographically smallest mask.
PerturbedSolution solve_exact(const CandidateSet& cands, double z);

// Meet-in-the-middle search; n <= 48.  Returns the same optimal error as
// solve_exact; the reported mask may differ on exact ties.
PerturbedSolution solve_meet_in_middle(const CandidateSet& cands, double z);

// Routes to solve_exact for small n and solve_meet_in_middle otherwise.
PerturbedSolution solve_auto(const CandidateSet& cands, double z);

// The set of all reachable perturbed subset sums as an interval union:
// for every subset S, [sum(S) - |S|*eps, sum(S) + |S|*eps].  The empty
// subset contributes the point 0.  n <= 24.
IntervalUnion achievable_set(const CandidateSet& cands);

// Fraction of the target window [-1/2, 1/2] whose points admit an
// approximation with error <= eta; equals the measure of
// intersect_window(dilate(achievable_set(cands), eta), -1/2, 1/2).
double coverage_fraction(const CandidateSet& cands, double eta);

// Whether some perturbed subset sum lands within eta of z (up to 1e-12).
bool has_approximation(const CandidateSet& cands, double eta, double z);

// Incrementally maintained set of targets reachable within `slack` by the
// candidates fed so far: starts at [-slack, +slack] (empty subset) and each
// added candidate x contributes translate(dilate(current, eps), x).
// Grows one candidate at a time so prefix sweeps cost one update per step.
class AchievableCover {
public:
    AchievableCover(double eps, double slack, std::size_t max_intervals = 1000000);

    void add_candidate(double x);
    bool covers(double z) const { return set_.distance_to(z) <= IntervalUnion::kMergeTol; }
    double window_measure() const;
    const IntervalUnion& set() const { return set_; }

private:
    IntervalUnion set_;
    double eps_;
    std::size_t max_intervals_;
};

// Outcome of the empirical search for the smallest candidate-pool size.
struct MinNResult {
    double eta = 0.0;
    double eps = 0.0;
    int min_n = 0;            // n_max + 1 when not found
    int trials = 0;
    int successes_required = 0;
    std::uint64_t seed = 0;
    bool found = false;
};

// Smallest n <= n_max such that at least successes_required of `trials`
// independent draws cover every target within eta using only the first n
// candidates.  Candidates are Unif[-1, 1], drawn freshly per (trial, target)
// from mix_seed(seed, trial, target_index), so the values do not depend on
// eta or eps and series across budgets stay comparable.  By convention the
// reported n is at least 1 even when the empty sum already suffices.
MinNResult min_n_search(double eta, double eps, const std::vector<double>& targets,
                        int trials, int successes_required, std::uint64_t seed,
                        int n_max = 400, int workers = 0);

// Candidate-count bounds from the analytical growth/fill phases.
struct CandidateBudget {
    long k1 = 0;  // doubling-phase length
    long k2 = 0;  // fill-phase length
    // Total pool size; with_final_phase adds a second doubling-length block
    // plus one extra candidate on top of k1 + k2.
    long total(bool with_final_phase = false) const {
        return with_final_phase ? 2 * k1 + k2 + 1 : k1 + k2;
    }
};

// k1 = ceil(c1 * log(1/eta) / log(5/4 + eps/2)),
// k2 = ceil(c2 * (1 + log(1/eta) / (1 + eps))).
// Requires 0 < eta < 1, eps >= 0, c1 > 0, c2 > 0.
CandidateBudget theoretical_n(double eta, double eps, double c1 = 1.0, double c2 = 1.0);

}  // namespace plth
