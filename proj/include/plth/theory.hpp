#pragma once

#include <cstdint>
#include <vector>

#include "plth/interval_union.hpp"

namespace plth {

// State of the lower-bounding coverage recursion on the window [-1/2, 1/2].
// fhat is the tracked coverage set, extension is the budget-eps helper set
// chosen disjoint from fhat (empty when eps = 0), and p_tilde = measure(fhat).
struct SurrogateState {
    int k = 0;
    IntervalUnion fhat;
    IntervalUnion extension;
    double p_tilde = 0.0;
    double eta = 0.0;
    double eps = 0.0;
};

// Initial state: fhat = [-eta, eta].  Requires 0 < eta < 1/2 and eps >= 0.
SurrogateState surrogate_init(double eta, double eps);

// One growth step with candidate value x:
//   fhat' = (fhat  U  translate(fhat U extension, x))  clipped to [-1/2, 1/2],
// then the extension is rebuilt for the new set.
SurrogateState surrogate_step(const SurrogateState& state, double x);

// Monte-Carlo check of the one-step expected growth
//   E[p'] = p + (1/2) * (1 - p) * min(1, p + eps)
// over x ~ Unif[-1, 1].
struct GrowthCheck {
    double empirical_mean = 0.0;
    double predicted = 0.0;
    double std_err = 0.0;
    bool within_three_se = false;
};

GrowthCheck expected_growth_check(const SurrogateState& state, int draws, std::uint64_t seed);

// The potential used to certify drift of the coverage sequence:
//   psi(p) = (1/(1+eps)) * (log(p + eps) - log(max(1 - p, floor))) + (16/3) p
// with floor = 1e-15 shielding the log at full coverage.
double psi_value(double p, double eps);

// One seeded trajectory of the coverage recursion.  Indexing: p_tilde, psi,
// p_exact and saturated have n+1 entries (step k in 0..n); x and z_increment
// have n entries, with z_increment[k-1] the normalized gain of step k,
//   Z_k = (p_k - p_{k-1}) / ((1 - p_{k-1}) * (p_{k-1} + eps)),
// NaN when the previous step had already saturated.  p_exact[k] is the true
// covered fraction of the window for the same candidate prefix (computed
// while k <= exact_up_to, NaN afterwards).
struct TrajectoryRecord {
    std::uint64_t seed = 0;
    double eta = 0.0;
    double eps = 0.0;
    std::vector<double> x;
    std::vector<double> p_tilde;
    std::vector<double> p_exact;
    std::vector<double> z_increment;
    std::vector<double> psi;
    std::vector<std::uint8_t> saturated;
    int k1_empirical = -1;  // first k with p_tilde > 1/4; -1 if never
};

TrajectoryRecord simulate_trajectory(double eta, double eps, int n, std::uint64_t seed,
                                     int exact_up_to = 24);

// Empirical success rate of the final containment condition: draw k3 values
// Unif[-1, 1] and count the draws whose total T satisfies
// [T - k3*eps, T + k3*eps] contains [eta - eps, eps - eta], i.e. the budget
// window around the drawn total swallows the residual window.  Requires
// eps >= eta.
double final_phase_check(double eps, double eta, int k3, int draws, std::uint64_t seed);

// The analytic lower bound the rate is compared against:
// 1 - exp(-((k3-1)*eps + eta)^2 / (2*k3)).
double final_phase_bound(double eps, double eta, int k3);

}  // namespace plth
