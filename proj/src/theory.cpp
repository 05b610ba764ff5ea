#include "plth/theory.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "plth/rng.hpp"
#include "plth/subset_sum.hpp"

namespace plth {

namespace {

constexpr double kWinLo = -0.5;
constexpr double kWinHi = 0.5;
constexpr double kSaturationFloor = 1e-15;

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

SurrogateState surrogate_init(double eta, double eps) {
    if (!(eta > 0.0) || !(eta < 0.5))
        throw std::invalid_argument("surrogate_init: eta must be in (0, 1/2)");
    if (!std::isfinite(eps) || eps < 0.0)
        throw std::invalid_argument("surrogate_init: eps must be finite and >= 0");
    SurrogateState s;
    s.k = 0;
    s.eta = eta;
    s.eps = eps;
    s.fhat = IntervalUnion::segment(-eta, eta);
    s.extension = epsilon_extension(s.fhat, eps);
    s.p_tilde = s.fhat.measure();
    return s;
}

SurrogateState surrogate_step(const SurrogateState& state, double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("surrogate_step: x is not finite");
    if (state.fhat.empty()) throw std::invalid_argument("surrogate_step: state has empty set");
    SurrogateState next;
    next.k = state.k + 1;
    next.eta = state.eta;
    next.eps = state.eps;
    IntervalUnion shifted = translate(union_of(state.fhat, state.extension), x);
    next.fhat = intersect_window(union_of(state.fhat, shifted), kWinLo, kWinHi);
    next.extension = epsilon_extension(next.fhat, state.eps);
    next.p_tilde = next.fhat.measure();
    return next;
}

GrowthCheck expected_growth_check(const SurrogateState& state, int draws, std::uint64_t seed) {
    if (draws < 2) throw std::invalid_argument("expected_growth_check: draws must be >= 2");
    Rng rng(seed);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < draws; ++i) {
        double x = rng.uniform(-1.0, 1.0);
        double p_next = surrogate_step(state, x).p_tilde;
        sum += p_next;
        sum_sq += p_next * p_next;
    }
    double n = static_cast<double>(draws);
    GrowthCheck out;
    out.empirical_mean = sum / n;
    double var = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0));
    out.std_err = std::sqrt(var / n);
    double p = state.p_tilde;
    out.predicted = p + 0.5 * (1.0 - p) * std::min(1.0, p + state.eps);
    out.within_three_se = std::abs(out.empirical_mean - out.predicted) <= 3.0 * out.std_err;
    return out;
}

double psi_value(double p, double eps) {
    double safe = std::max(1.0 - p, kSaturationFloor);
    return (std::log(p + eps) - std::log(safe)) / (1.0 + eps) + (16.0 / 3.0) * p;
}

TrajectoryRecord simulate_trajectory(double eta, double eps, int n, std::uint64_t seed,
                                     int exact_up_to) {
    if (n < 0) throw std::invalid_argument("simulate_trajectory: n must be >= 0");
    TrajectoryRecord rec;
    rec.seed = seed;
    rec.eta = eta;
    rec.eps = eps;
    rec.x.reserve(n);
    rec.p_tilde.reserve(n + 1);
    rec.p_exact.reserve(n + 1);
    rec.z_increment.reserve(n);
    rec.psi.reserve(n + 1);
    rec.saturated.reserve(n + 1);

    Rng rng(seed);
    SurrogateState state = surrogate_init(eta, eps);
    // True covered fraction for the same prefix, maintained incrementally.
    AchievableCover exact_cover(eps, eta);

    auto record_step = [&rec, eps](const SurrogateState& s, double p_exact_now) {
        rec.p_tilde.push_back(s.p_tilde);
        rec.p_exact.push_back(p_exact_now);
        rec.psi.push_back(psi_value(s.p_tilde, eps));
        rec.saturated.push_back(1.0 - s.p_tilde <= kSaturationFloor ? 1 : 0);
        if (rec.k1_empirical < 0 && s.p_tilde > 0.25) rec.k1_empirical = s.k;
    };

    record_step(state, exact_cover.window_measure());

    for (int k = 1; k <= n; ++k) {
        double x = rng.uniform(-1.0, 1.0);
        rec.x.push_back(x);
        double p_prev = state.p_tilde;
        bool prev_saturated = 1.0 - p_prev <= kSaturationFloor;
        state = surrogate_step(state, x);
        double p_exact_now = nan_value();
        if (k <= exact_up_to) {
            exact_cover.add_candidate(x);
            p_exact_now = exact_cover.window_measure();
        }
        record_step(state, p_exact_now);
        if (prev_saturated) {
            rec.z_increment.push_back(nan_value());
        } else {
            rec.z_increment.push_back((state.p_tilde - p_prev) /
                                      ((1.0 - p_prev) * (p_prev + eps)));
        }
    }
    return rec;
}

double final_phase_bound(double eps, double eta, int k3) {
    double t = (static_cast<double>(k3) - 1.0) * eps + eta;
    return 1.0 - std::exp(-t * t / (2.0 * static_cast<double>(k3)));
}

double final_phase_check(double eps, double eta, int k3, int draws, std::uint64_t seed) {
    if (!(eta > 0.0)) throw std::invalid_argument("final_phase_check: eta must be > 0");
    if (!std::isfinite(eps) || eps < eta)
        throw std::invalid_argument("final_phase_check: requires eps >= eta");
    if (k3 < 1) throw std::invalid_argument("final_phase_check: k3 must be >= 1");
    if (draws < 1) throw std::invalid_argument("final_phase_check: draws must be >= 1");
    Rng rng(seed);
    // Containment of [eta - eps, eps - eta] in [T - k3*eps, T + k3*eps]
    // reduces to |T| <= (k3 - 1)*eps + eta.
    double threshold = (static_cast<double>(k3) - 1.0) * eps + eta;
    long hits = 0;
    for (int i = 0; i < draws; ++i) {
        double total = 0.0;
        for (int j = 0; j < k3; ++j) total += rng.uniform(-1.0, 1.0);
        if (std::abs(total) <= threshold) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(draws);
}

}  // namespace plth
