#include "plth/subset_sum.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include "plth/parallel.hpp"
#include "plth/rng.hpp"

namespace plth {

namespace {

void check_candidates(const CandidateSet& cands, std::size_t max_n, const char* who,
                      const char* overflow_hint) {
    if (cands.values.empty())
        throw std::invalid_argument(std::string(who) + ": candidate list is empty");
    if (cands.values.size() > max_n)
        throw std::invalid_argument(std::string(who) + ": more than " +
                                    std::to_string(max_n) + " candidates" + overflow_hint);
    for (double v : cands.values)
        if (!std::isfinite(v))
            throw std::invalid_argument(std::string(who) + ": candidate value is not finite");
    if (!std::isfinite(cands.eps) || cands.eps < 0.0)
        throw std::invalid_argument(std::string(who) + ": eps must be finite and >= 0");
}

void check_target(double z, const char* who) {
    if (!std::isfinite(z)) throw std::invalid_argument(std::string(who) + ": target is not finite");
}

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

// True when bit mask `a` reads lexicographically smaller than `b` as the
// sequence (bit 0, bit 1, ...).  The first differing position decides.
bool lex_smaller(std::uint64_t a, std::uint64_t b) {
    std::uint64_t diff = a ^ b;
    if (diff == 0) return false;
    int bit = std::countr_zero(diff);
    return ((a >> bit) & 1ull) == 0;
}

// (error, selected count, mask) with the solver's tie ordering.
struct Best {
    double error = std::numeric_limits<double>::infinity();
    int count = 0;
    std::uint64_t mask = 0;

    void offer(double error_in, int count_in, std::uint64_t mask_in) {
        if (error_in > error) return;
        if (error_in == error) {
            if (count_in > count) return;
            if (count_in == count && !lex_smaller(mask_in, mask)) return;
        }
        error = error_in;
        count = count_in;
        mask = mask_in;
    }
};

PerturbedSolution finish_solution(const CandidateSet& cands, double z, std::uint64_t mask_bits) {
    std::size_t n = cands.values.size();
    std::vector<std::uint8_t> mask(n, 0);
    for (std::size_t i = 0; i < n; ++i) mask[i] = (mask_bits >> i) & 1ull;
    InnerOptimum inner = optimal_error_for_mask(cands.values, mask, cands.eps, z);
    PerturbedSolution sol;
    sol.mask = std::move(mask);
    sol.perturbations = std::move(inner.y);
    sol.error = inner.error;
    return sol;
}

}  // namespace

std::size_t PerturbedSolution::selected_count() const {
    std::size_t k = 0;
    for (std::uint8_t b : mask) k += b;
    return k;
}

InnerOptimum optimal_error_for_mask(const std::vector<double>& values,
                                    const std::vector<std::uint8_t>& mask,
                                    double eps, double z) {
    if (mask.size() != values.size())
        throw std::invalid_argument("optimal_error_for_mask: mask length mismatch");
    if (!std::isfinite(eps) || eps < 0.0)
        throw std::invalid_argument("optimal_error_for_mask: eps must be finite and >= 0");
    check_target(z, "optimal_error_for_mask");
    double sum = 0.0;
    long k = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]))
            throw std::invalid_argument("optimal_error_for_mask: value is not finite");
        if (mask[i]) {
            sum += values[i];
            ++k;
        }
    }
    InnerOptimum out;
    out.y.assign(values.size(), 0.0);
    double r = z - sum;
    if (k == 0) {
        out.error = std::abs(r);
        return out;
    }
    // The selected shifts only matter through their total, which ranges over
    // [-k*eps, k*eps]; the closest total to r is the uniform clamped shift.
    double per = clamp(r / static_cast<double>(k), -eps, eps);
    for (std::size_t i = 0; i < values.size(); ++i)
        if (mask[i]) out.y[i] = per;
    out.error = std::max(0.0, std::abs(r) - static_cast<double>(k) * eps);
    return out;
}

PerturbedSolution solve_exact(const CandidateSet& cands, double z) {
    check_candidates(cands, 30, "solve_exact", "; use solve_meet_in_middle for larger pools");
    check_target(z, "solve_exact");
    std::size_t n = cands.values.size();
    double eps = cands.eps;

    Best best;
    best.offer(std::abs(z), 0, 0);  // empty selection

    // Gray-code walk: one value toggles per visited mask, so the running sum
    // and count update in O(1) per mask.
    std::uint64_t gray = 0;
    double sum = 0.0;
    int count = 0;
    std::uint64_t total = 1ull << n;
    for (std::uint64_t i = 1; i < total; ++i) {
        int bit = std::countr_zero(i);
        std::uint64_t flipped = 1ull << bit;
        gray ^= flipped;
        if (gray & flipped) {
            sum += cands.values[bit];
            ++count;
        } else {
            sum -= cands.values[bit];
            --count;
        }
        double err = std::max(0.0, std::abs(z - sum) - count * eps);
        best.offer(err, count, gray);
    }
    return finish_solution(cands, z, best.mask);
}

PerturbedSolution solve_meet_in_middle(const CandidateSet& cands, double z) {
    check_candidates(cands, 48, "solve_meet_in_middle", "");
    check_target(z, "solve_meet_in_middle");
    std::size_t n = cands.values.size();
    double eps = cands.eps;
    std::size_t n_left = n / 2;
    std::size_t n_right = n - n_left;

    // Right-half subsets grouped by selection count, each group sorted by sum.
    struct Entry {
        double sum;
        std::uint64_t mask;
    };
    std::vector<std::vector<Entry>> by_count(n_right + 1);
    {
        std::uint64_t total = 1ull << n_right;
        std::uint64_t gray = 0;
        double sum = 0.0;
        int count = 0;
        by_count[0].push_back({0.0, 0});
        for (std::uint64_t i = 1; i < total; ++i) {
            int bit = std::countr_zero(i);
            std::uint64_t flipped = 1ull << bit;
            gray ^= flipped;
            if (gray & flipped) {
                sum += cands.values[n_left + bit];
                ++count;
            } else {
                sum -= cands.values[n_left + bit];
                --count;
            }
            by_count[count].push_back({sum, gray});
        }
        for (auto& group : by_count)
            std::sort(group.begin(), group.end(),
                      [](const Entry& a, const Entry& b) { return a.sum < b.sum; });
    }

    Best best;
    // Left-half subsets via the same Gray-code walk; for each, scan every
    // right count class.  The budget (k_left + k_right) * eps is fixed inside
    // a class, so the closest right sum to the residual is optimal there.
    std::uint64_t total_left = 1ull << n_left;
    std::uint64_t gray = 0;
    double sum_left = 0.0;
    int count_left = 0;
    for (std::uint64_t i = 0; i < total_left; ++i) {
        if (i > 0) {
            int bit = std::countr_zero(i);
            std::uint64_t flipped = 1ull << bit;
            gray ^= flipped;
            if (gray & flipped) {
                sum_left += cands.values[bit];
                ++count_left;
            } else {
                sum_left -= cands.values[bit];
                --count_left;
            }
        }
        double want = z - sum_left;
        for (std::size_t k_right = 0; k_right <= n_right; ++k_right) {
            const auto& group = by_count[k_right];
            if (group.empty()) continue;
            double budget = (count_left + static_cast<double>(k_right)) * eps;
            auto it = std::lower_bound(group.begin(), group.end(), want,
                                       [](const Entry& e, double v) { return e.sum < v; });
            for (auto probe : {it, it == group.begin() ? group.end() : it - 1}) {
                if (probe == group.end()) continue;
                double err = std::max(0.0, std::abs(want - probe->sum) - budget);
                best.offer(err, count_left + static_cast<int>(k_right),
                           gray | (probe->mask << n_left));
            }
        }
    }
    return finish_solution(cands, z, best.mask);
}

PerturbedSolution solve_auto(const CandidateSet& cands, double z) {
    if (cands.values.size() <= 16) return solve_exact(cands, z);
    return solve_meet_in_middle(cands, z);
}

AchievableCover::AchievableCover(double eps, double slack, std::size_t max_intervals)
    : eps_(eps), max_intervals_(max_intervals) {
    if (!std::isfinite(eps) || eps < 0.0)
        throw std::invalid_argument("AchievableCover: eps must be finite and >= 0");
    if (!std::isfinite(slack) || slack < 0.0)
        throw std::invalid_argument("AchievableCover: slack must be finite and >= 0");
    set_ = IntervalUnion::segment(-slack, slack);
}

void AchievableCover::add_candidate(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("AchievableCover: candidate is not finite");
    set_ = union_of(set_, translate(dilate(set_, eps_), x));
    if (set_.size() > max_intervals_)
        throw std::runtime_error("AchievableCover: interval count exceeded " +
                                 std::to_string(max_intervals_));
}

double AchievableCover::window_measure() const {
    return intersect_window(set_, -0.5, 0.5).measure();
}

IntervalUnion achievable_set(const CandidateSet& cands) {
    if (cands.values.size() > 24)
        throw std::invalid_argument("achievable_set: more than 24 candidates");
    if (!std::isfinite(cands.eps) || cands.eps < 0.0)
        throw std::invalid_argument("achievable_set: eps must be finite and >= 0");
    AchievableCover cover(cands.eps, 0.0);
    for (double v : cands.values) {
        if (!std::isfinite(v))
            throw std::invalid_argument("achievable_set: candidate value is not finite");
        cover.add_candidate(v);
    }
    return cover.set();
}

double coverage_fraction(const CandidateSet& cands, double eta) {
    if (!std::isfinite(eta) || eta < 0.0)
        throw std::invalid_argument("coverage_fraction: eta must be finite and >= 0");
    return intersect_window(dilate(achievable_set(cands), eta), -0.5, 0.5).measure();
}

bool has_approximation(const CandidateSet& cands, double eta, double z) {
    if (!std::isfinite(eta) || eta < 0.0)
        throw std::invalid_argument("has_approximation: eta must be finite and >= 0");
    return solve_auto(cands, z).error <= eta + 1e-12;
}

MinNResult min_n_search(double eta, double eps, const std::vector<double>& targets,
                        int trials, int successes_required, std::uint64_t seed,
                        int n_max, int workers) {
    if (!std::isfinite(eta) || eta <= 0.0)
        throw std::invalid_argument("min_n_search: eta must be finite and > 0");
    if (!std::isfinite(eps) || eps < 0.0)
        throw std::invalid_argument("min_n_search: eps must be finite and >= 0");
    if (targets.empty()) throw std::invalid_argument("min_n_search: no targets");
    for (double z : targets)
        if (!std::isfinite(z) || std::abs(z) > 0.5 + 1e-12)
            throw std::invalid_argument("min_n_search: targets must lie in [-1/2, 1/2]");
    if (trials < 1) throw std::invalid_argument("min_n_search: trials must be >= 1");
    if (successes_required < 1 || successes_required > trials)
        throw std::invalid_argument("min_n_search: successes_required must be in [1, trials]");
    if (n_max < 1) throw std::invalid_argument("min_n_search: n_max must be >= 1");

    const int sentinel = n_max + 1;
    std::size_t n_targets = targets.size();
    std::vector<int> cell_n(static_cast<std::size_t>(trials) * n_targets, sentinel);

    // One cell per (trial, target): grow the reachable cover candidate by
    // candidate and record the first prefix length that reaches the target.
    parallel_for(cell_n.size(), workers, [&](std::size_t idx) {
        std::size_t trial = idx / n_targets;
        std::size_t t = idx % n_targets;
        double z = targets[t];
        Rng rng(mix_seed(seed, trial, t));
        AchievableCover cover(eps, eta);
        if (cover.covers(z)) {
            cell_n[idx] = 1;  // reported n is at least 1
            return;
        }
        for (int k = 1; k <= n_max; ++k) {
            cover.add_candidate(rng.uniform(-1.0, 1.0));
            if (cover.covers(z)) {
                cell_n[idx] = k;
                return;
            }
        }
    });

    std::vector<int> per_trial(trials, 1);
    for (int trial = 0; trial < trials; ++trial)
        for (std::size_t t = 0; t < n_targets; ++t)
            per_trial[trial] = std::max(per_trial[trial],
                                        cell_n[static_cast<std::size_t>(trial) * n_targets + t]);

    // The requirement "at least successes_required trials succeed with pool
    // size n" first holds at the successes_required-th smallest trial result.
    std::nth_element(per_trial.begin(), per_trial.begin() + (successes_required - 1),
                     per_trial.end());
    int min_n = per_trial[successes_required - 1];

    MinNResult out;
    out.eta = eta;
    out.eps = eps;
    out.min_n = min_n;
    out.trials = trials;
    out.successes_required = successes_required;
    out.seed = seed;
    out.found = min_n <= n_max;
    return out;
}

CandidateBudget theoretical_n(double eta, double eps, double c1, double c2) {
    if (!(eta > 0.0) || !(eta < 1.0))
        throw std::invalid_argument("theoretical_n: eta must be in (0, 1)");
    if (!std::isfinite(eps) || eps < 0.0)
        throw std::invalid_argument("theoretical_n: eps must be finite and >= 0");
    if (!(c1 > 0.0) || !(c2 > 0.0))
        throw std::invalid_argument("theoretical_n: c1 and c2 must be > 0");
    double log_inv_eta = std::log(1.0 / eta);
    CandidateBudget out;
    out.k1 = static_cast<long>(std::ceil(c1 * log_inv_eta / std::log(1.25 + eps / 2.0)));
    out.k2 = static_cast<long>(std::ceil(c2 * (1.0 + log_inv_eta / (1.0 + eps))));
    return out;
}

}  // namespace plth
