// Standalone acceptance suite: eleven end-to-end checks over the exact
// solvers, the coverage recursion, the network construction, and the
// training pipeline.  Prints one PASS/FAIL line per criterion and exits
// nonzero when any fails.  Criteria with a pinned wall-clock budget fail
// if the budget is exceeded.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "plth/construct.hpp"
#include "plth/dataset.hpp"
#include "plth/interval_union.hpp"
#include "plth/matrix.hpp"
#include "plth/mlp.hpp"
#include "plth/rng.hpp"
#include "plth/subset_sum.hpp"
#include "plth/theory.hpp"
#include "plth/train.hpp"

using namespace plth;

namespace {

std::string strf(const char* fmt, ...) {
    va_list args;
    va_start(args, fmt);
    char buf[512];
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    return buf;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string join_ints(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(v[i]);
    }
    return out;
}

// --- criterion 1: exact solver against a brute-force shift grid ---------

// Independent oracle: enumerate every mask; per mask, scan selected-shift
// totals on a grid of step eps/100 (the total is capped at k*eps in
// magnitude).  Only the grid points nearest the residual can win, so three
// probes suffice.
double grid_best_error(const CandidateSet& cands, double z) {
    std::size_t n = cands.values.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
        double sum = 0.0;
        long long k = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1) {
                sum += cands.values[i];
                ++k;
            }
        double r = z - sum;
        double err;
        if (k == 0 || cands.eps == 0.0) {
            err = std::abs(r);
        } else {
            double h = cands.eps / 100.0;
            long long hi = 100 * k;
            long long m0 = std::llround(r / h);
            err = std::numeric_limits<double>::infinity();
            for (long long m : {m0 - 1, m0, m0 + 1}) {
                long long mc = std::clamp(m, -hi, hi);
                err = std::min(err, std::abs(r - mc * h));
            }
        }
        best = std::min(best, err);
    }
    return best;
}

Outcome exact_solver_vs_grid() {
    const double eps_grid[3] = {0.0, 0.01, 0.1};
    Rng rng(101);
    double worst_ratio = 0.0;
    int bad = 0;
    for (int i = 0; i < 500; ++i) {
        CandidateSet cands;
        cands.eps = eps_grid[i % 3];
        std::size_t n = 1 + rng.below(8);
        for (std::size_t j = 0; j < n; ++j) cands.values.push_back(rng.uniform(-1.0, 1.0));
        double z = rng.uniform(-0.5, 0.5);
        double solver = solve_exact(cands, z).error;
        double grid = grid_best_error(cands, z);
        double tol = cands.eps > 0.0 ? cands.eps / 50.0 : 1e-4;
        double gap = std::abs(solver - grid);
        worst_ratio = std::max(worst_ratio, gap / tol);
        if (gap > tol) ++bad;
    }
    return {bad == 0,
            strf("%d of 500 instances outside tolerance (worst gap/tol %.3f)", bad, worst_ratio)};
}

// --- criterion 2: approximability agrees with achievable-set distance ---

Outcome approximation_vs_distance() {
    const double eps_grid[3] = {0.0, 0.05, 0.2};
    Rng rng(202);
    long disagreements = 0, skipped = 0, checked = 0;
    for (int i = 0; i < 200; ++i) {
        CandidateSet cands;
        cands.eps = eps_grid[i % 3];
        std::size_t n = 1 + rng.below(14);
        for (std::size_t j = 0; j < n; ++j) cands.values.push_back(rng.uniform(-1.0, 1.0));
        double eta = rng.uniform(0.01, 0.15);
        IntervalUnion ach = achievable_set(cands);
        for (int t = 0; t < 1000; ++t) {
            double z = rng.uniform(-0.5, 0.5);
            double d = ach.distance_to(z);
            if (std::abs(d - eta) <= 1e-10) {  // numeric boundary: either answer is fine
                ++skipped;
                continue;
            }
            ++checked;
            if (has_approximation(cands, eta, z) != (d <= eta)) ++disagreements;
        }
    }
    return {disagreements == 0, strf("%ld disagreements on %ld probes (%ld boundary skips)",
                                     disagreements, checked, skipped)};
}

// --- criterion 3: empirical pool size shrinks as the shift budget grows -

Outcome pool_size_vs_budget_ratio() {
    std::vector<double> targets;
    Rng trng(mix_seed(303, 0));
    for (int i = 0; i < 16; ++i) targets.push_back(trng.uniform(-0.5, 0.5));
    const double etas[2] = {1e-2, 1e-3};
    std::vector<std::vector<int>> mins(2);
    bool found_all = true, monotone = true;
    for (int e = 0; e < 2; ++e) {
        for (int ratio = 0; ratio <= 10; ++ratio) {
            MinNResult r = min_n_search(etas[e], ratio * etas[e], targets, 10, 8, 303);
            if (!r.found) found_all = false;
            mins[e].push_back(r.min_n);
        }
        for (std::size_t j = 0; j + 1 < mins[e].size(); ++j)
            if (mins[e][j + 1] > mins[e][j]) monotone = false;
    }
    bool eta_ordered = mins[1][0] > mins[0][0];
    bool pass = found_all && monotone && eta_ordered;
    return {pass, strf("min_n at eta=1e-2: %s; at eta=1e-3: %s%s%s%s",
                       join_ints(mins[0]).c_str(), join_ints(mins[1]).c_str(),
                       found_all ? "" : "; some searches exhausted",
                       monotone ? "" : "; series not non-increasing",
                       eta_ordered ? "" : "; eta ordering violated")};
}

// --- criterion 4: pool size scales linearly in log(1/eta) ---------------

Outcome pool_size_log_fit() {
    const double etas[3] = {1e-1, 1e-2, 1e-3};
    double med[3];
    for (int e = 0; e < 3; ++e) {
        std::vector<double> vals;
        for (std::uint64_t s = 1; s <= 10; ++s) {
            std::vector<double> targets;
            Rng trng(mix_seed(404, s));
            for (int i = 0; i < 16; ++i) targets.push_back(trng.uniform(-0.5, 0.5));
            MinNResult r = min_n_search(etas[e], 0.0, targets, 10, 8, s);
            if (!r.found)
                return {false, strf("search exhausted at eta=%g seed=%llu", etas[e],
                                    static_cast<unsigned long long>(s))};
            vals.push_back(r.min_n);
        }
        std::sort(vals.begin(), vals.end());
        med[e] = 0.5 * (vals[4] + vals[5]);
    }
    // Least squares of median against log(1/eta) over the three budgets.
    double su = 0, sy = 0, suu = 0, suy = 0;
    for (int e = 0; e < 3; ++e) {
        double u = std::log(1.0 / etas[e]);
        su += u;
        sy += med[e];
        suu += u * u;
        suy += u * med[e];
    }
    double a = (3.0 * suy - su * sy) / (3.0 * suu - su * su);
    double b = (sy - a * su) / 3.0;
    double ss_res = 0, ss_tot = 0, ybar = sy / 3.0;
    for (int e = 0; e < 3; ++e) {
        double u = std::log(1.0 / etas[e]);
        ss_res += (med[e] - (a * u + b)) * (med[e] - (a * u + b));
        ss_tot += (med[e] - ybar) * (med[e] - ybar);
    }
    double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return {r2 >= 0.9, strf("medians %.1f/%.1f/%.1f at eta=1e-1/1e-2/1e-3, R^2 = %.4f",
                            med[0], med[1], med[2], r2)};
}

// --- criterion 5: one-step expected growth identity, Monte Carlo --------

Outcome growth_identity_cells() {
    const double ps[4] = {0.1, 0.3, 0.6, 0.9};
    const double es[3] = {0.0, 0.05, 0.2};
    int within = 0, cell = 0;
    double worst_dev = 0.0;
    for (double p : ps)
        for (double eps : es) {
            SurrogateState st;
            st.k = 0;
            st.eta = 0.01;
            st.eps = eps;
            // Two components hugging the window edges, total measure p.
            st.fhat = IntervalUnion({{-0.5, -0.5 + 0.4 * p}, {0.5 - 0.6 * p, 0.5}});
            st.extension = epsilon_extension(st.fhat, eps);
            st.p_tilde = st.fhat.measure();
            GrowthCheck gc = expected_growth_check(st, 100000, mix_seed(505, cell++));
            if (gc.within_three_se) ++within;
            if (gc.std_err > 0.0)
                worst_dev = std::max(worst_dev,
                                     std::abs(gc.empirical_mean - gc.predicted) / gc.std_err);
        }
    return {within >= 11,
            strf("%d/12 cells within 3 SE at 1e5 draws (worst |dev|/SE %.2f)", within, worst_dev)};
}

// --- criterion 6: trajectory invariants hold on every recorded step -----

Outcome trajectory_invariants() {
    const double eps_grid[3] = {0.0, 0.01, 0.1};
    long monotone = 0, cap = 0, zrange = 0, psig = 0, dom = 0;
    for (int i = 0; i < 50; ++i) {
        double eps = eps_grid[i % 3];
        TrajectoryRecord rec = simulate_trajectory(1e-3, eps, 80, mix_seed(606, i), 20);
        std::size_t n = rec.x.size();
        for (std::size_t k = 0; k < n; ++k) {
            double p = rec.p_tilde[k];
            double pn = rec.p_tilde[k + 1];
            if (pn < p - 1e-12) ++monotone;
            if (pn > std::min(1.0, 2.0 * p + eps) + 1e-9) ++cap;
            double z = rec.z_increment[k];
            if (!std::isnan(z)) {
                if (z < -1e-9 || z > 2.0 / (1.0 + eps) + 1e-9) ++zrange;
                if (p >= 0.25 && p < 1.0 - 1e-6 && rec.psi[k + 1] - rec.psi[k] < z - 1e-9)
                    ++psig;
            }
            if (!std::isnan(rec.p_exact[k]) && rec.p_tilde[k] > rec.p_exact[k] + 1e-9) ++dom;
        }
        if (!std::isnan(rec.p_exact[n]) && rec.p_tilde[n] > rec.p_exact[n] + 1e-9) ++dom;
    }
    long total = monotone + cap + zrange + psig + dom;
    return {total == 0,
            strf("violations over 50 trajectories: monotone %ld, step-cap %ld, z-range %ld, "
                 "psi-gain %ld, domination %ld",
                 monotone, cap, zrange, psig, dom)};
}

// --- criterion 7: whole-network construction hits the error target ------

Outcome construction_sup_error() {
    std::vector<std::size_t> dims{4, 8, 3};
    const double eta = 0.05;
    Mlp target = random_target(dims, 707);
    if (!validate_target(target).pass) return {false, "generated target failed validation"};
    const double eps_grid[2] = {0.0, eta};
    double sup[2];
    std::size_t hidden[2];
    for (int e = 0; e < 2; ++e) {
        CandidateNet cand = init_candidate(dims, eta, eps_grid[e], 1.0, 1.0, mix_seed(707, e + 1));
        NetworkApprox res = approximate_network(target, cand, eps_grid[e], eta);
        check_feasible(res.net);
        if (!res.all_pass)
            return {false, strf("per-entry budgets missed at eps=%g", eps_grid[e])};
        sup[e] = measure_sup_error(target, res.net, 10000, mix_seed(707, 99)).sup_err;
        hidden[e] = std::accumulate(cand.hidden_dims.begin(), cand.hidden_dims.end(),
                                    std::size_t{0});
    }
    bool pass = sup[0] < eta && sup[1] < eta && hidden[1] < hidden[0];
    return {pass, strf("sup err %.4f with %zu hidden units at eps=0; %.4f with %zu at eps=%.2f",
                       sup[0], hidden[0], sup[1], hidden[1], eta)};
}

// --- criterion 8: training never leaves the weight box -------------------

Outcome pgd_box_invariant() {
    Dataset train = synthetic_dataset(10, 4, 100, mix_seed(808, 0));
    std::vector<std::size_t> dims{4, 16, 16, 10};
    DenseNet net = init_dense(dims, mix_seed(808, 1));
    TrainConfig cfg;
    cfg.eps = 0.1;
    cfg.lr = 0.2;
    cfg.epochs = 3;
    cfg.batch_size = 128;
    cfg.seed = mix_seed(808, 2);
    long steps = 0, violations = 0;
    auto inside_box = [&](const std::vector<Matrix>& ws) {
        long bad = 0;
        for (std::size_t l = 0; l < ws.size(); ++l)
            for (std::size_t i = 0; i < ws[l].a.size(); ++i) {
                double w = ws[l].a[i];
                double w0 = net.init_weights[l].a[i];
                // Zero tolerance under clamp semantics: the stored weight is
                // init + clamped offset, so these comparisons must hold in
                // plain double arithmetic with no slack.
                if (!(w <= w0 + cfg.eps && w >= w0 - cfg.eps)) ++bad;
            }
        return bad;
    };
    DenseNet out = pgd_train(net, train, cfg, [&](int, const std::vector<Matrix>& ws) {
        ++steps;
        violations += inside_box(ws);
    });
    violations += inside_box(out.weights);
    bool moved = false;
    for (std::size_t l = 0; l < out.weights.size(); ++l)
        if (out.weights[l].a != net.init_weights[l].a) moved = true;
    // eps = 0 must hand back the snapshot bit for bit.
    TrainConfig cfg0 = cfg;
    cfg0.eps = 0.0;
    DenseNet frozen = pgd_train(net, train, cfg0);
    bool identical = true;
    for (std::size_t l = 0; l < frozen.weights.size(); ++l)
        if (std::memcmp(frozen.weights[l].a.data(), net.init_weights[l].a.data(),
                        frozen.weights[l].a.size() * sizeof(double)) != 0)
            identical = false;
    bool pass = violations == 0 && steps > 0 && moved && identical;
    return {pass, strf("%ld box violations over %ld steps at eps=0.1; eps=0 run %s",
                       violations, steps,
                       identical ? "bit-identical to init" : "DIFFERS from init")};
}

// --- criterion 9: analytic gradient against central differences ---------

Outcome gradient_check() {
    Dataset data = synthetic_dataset(2, 2, 30, mix_seed(909, 0));
    std::vector<std::size_t> dims{2, 32, 2};
    DenseNet net = init_dense(dims, mix_seed(909, 1));
    std::vector<std::size_t> batch(data.size());
    std::iota(batch.begin(), batch.end(), 0);
    std::vector<Matrix> grads;
    loss_and_gradient(net.weights, data, batch, grads);

    std::vector<std::pair<std::size_t, std::size_t>> coords;
    for (std::size_t l = 0; l < net.weights.size(); ++l)
        for (std::size_t i = 0; i < net.weights[l].a.size(); ++i) coords.emplace_back(l, i);
    Rng rng(mix_seed(909, 2));
    for (std::size_t i = coords.size(); i > 1; --i)
        std::swap(coords[i - 1], coords[rng.below(i)]);

    std::vector<Matrix> w = net.weights;
    std::vector<Matrix> scratch;
    const double h = 1e-5;
    double worst = 0.0;
    for (std::size_t c = 0; c < 100 && c < coords.size(); ++c) {
        auto [l, i] = coords[c];
        double keep = w[l].a[i];
        w[l].a[i] = keep + h;
        double up = loss_and_gradient(w, data, batch, scratch);
        w[l].a[i] = keep - h;
        double dn = loss_and_gradient(w, data, batch, scratch);
        w[l].a[i] = keep;
        double num = (up - dn) / (2.0 * h);
        double ana = grads[l].a[i];
        double rel = std::abs(num - ana) / std::max(1e-6, std::abs(num) + std::abs(ana));
        worst = std::max(worst, rel);
    }
    return {worst <= 1e-3, strf("max relative gap %.2e over 100 coordinates", worst)};
}

// --- criterion 10: kept-weight counts are exact at every sparsity -------

Outcome mask_kept_counts() {
    Rng rng(1010);
    const std::size_t shapes[4][2] = {{16, 4}, {7, 5}, {32, 16}, {3, 3}};
    long count_errors = 0, separation_errors = 0, cells = 0;
    for (const auto& sh : shapes) {
        Matrix scores(sh[0], sh[1]);
        for (double& s : scores.a) s = rng.uniform(-1.0, 1.0);
        for (int si = 1; si <= 9; ++si) {
            double sp = si / 10.0;
            Matrix m = topk_mask(scores, sp);
            long kept = 0;
            double min_kept = std::numeric_limits<double>::infinity();
            double max_dropped = 0.0;
            for (std::size_t i = 0; i < m.a.size(); ++i) {
                if (m.a[i] == 1.0) {
                    ++kept;
                    min_kept = std::min(min_kept, std::abs(scores.a[i]));
                } else {
                    max_dropped = std::max(max_dropped, std::abs(scores.a[i]));
                }
            }
            long want = std::llround((1.0 - sp) * static_cast<double>(scores.a.size()));
            if (kept != want) ++count_errors;
            if (min_kept < max_dropped) ++separation_errors;
            ++cells;
        }
    }
    // The masks coming out of the full prune loop obey the same rule.
    Dataset tr = synthetic_dataset(2, 2, 40, mix_seed(1010, 1));
    Dataset te = synthetic_dataset(2, 2, 10, mix_seed(1010, 2));
    DenseNet frozen = init_dense({2, 8, 2}, mix_seed(1010, 3));
    PruneConfig pc;
    pc.lr = 0.1;
    pc.epochs = 2;
    pc.batch_size = 16;
    pc.seed = mix_seed(1010, 4);
    PruneOutcome po = edge_popup(frozen, tr, te, 0.5, pc);
    for (const Matrix& m : po.masks) {
        long kept = 0;
        for (double v : m.a)
            if (v == 1.0) ++kept;
        long want = std::llround(0.5 * static_cast<double>(m.a.size()));
        if (kept != want) ++count_errors;
        ++cells;
    }
    bool pass = count_errors == 0 && separation_errors == 0;
    return {pass, strf("%ld count errors, %ld separation errors over %ld layer/sparsity cells",
                       count_errors, separation_errors, cells)};
}

// --- criterion 11: accuracy trend across shift budgets ------------------

double median3(std::array<double, 3> v) {
    std::sort(v.begin(), v.end());
    return v[1];
}

Outcome sweep_accuracy_trend() {
    Dataset train = synthetic_dataset(10, 4, 1000, mix_seed(12345, 0));
    Dataset test = synthetic_dataset(10, 4, 200, mix_seed(12345, 1));
    std::vector<std::size_t> dims{4, 16, 16, 10};
    TrainConfig tc;
    tc.lr = 0.2;
    tc.epochs = 25;
    tc.batch_size = 128;
    PruneConfig pc;
    pc.lr = 0.1;
    pc.epochs = 10;
    pc.batch_size = 128;
    pc.cosine_annealing = true;
    std::vector<double> eps_grid{0.0, 0.05, 0.1, 0.2};
    const std::uint64_t seeds[3] = {1, 2, 3};
    std::vector<std::array<double, 3>> best(eps_grid.size()), sstar(eps_grid.size());
    for (int s = 0; s < 3; ++s) {
        SweepResult res =
            sweep(eps_grid, pc.sparsity_levels, dims, tc, pc, train, test, seeds[s]);
        for (const SweepRow& row : res.rows)
            if (!row.ok)
                return {false, strf("cell eps=%g sparsity=%g failed", row.eps, row.sparsity)};
        for (std::size_t e = 0; e < eps_grid.size(); ++e) {
            best[e][s] = res.best_per_eps[e].best_test_acc;
            sstar[e][s] = res.best_per_eps[e].optimal_sparsity;
        }
    }
    double med_best[4], med_s[4];
    for (std::size_t e = 0; e < eps_grid.size(); ++e) {
        med_best[e] = median3(best[e]);
        med_s[e] = median3(sstar[e]);
    }
    int inversions = 0;
    for (std::size_t e = 0; e + 1 < eps_grid.size(); ++e)
        if (med_best[e + 1] < med_best[e]) ++inversions;
    bool sparsity_ok = med_s[3] <= med_s[0] + 1e-12;
    bool pass = inversions <= 1 && sparsity_ok;
    return {pass, strf("median best acc %.3f/%.3f/%.3f/%.3f across eps grid (%d adjacent "
                       "inversions); median optimal sparsity %.2f at eps=0.2 vs %.2f at eps=0",
                       med_best[0], med_best[1], med_best[2], med_best[3], inversions, med_s[3],
                       med_s[0])};
}

struct Criterion {
    int idx;
    double limit_s;  // 0 = no pinned wall-clock budget
    Outcome (*fn)();
};

}  // namespace

int main() {
    const Criterion table[] = {
        {1, 60, exact_solver_vs_grid},
        {2, 120, approximation_vs_distance},
        {3, 600, pool_size_vs_budget_ratio},
        {4, 0, pool_size_log_fit},
        {5, 0, growth_identity_cells},
        {6, 0, trajectory_invariants},
        {7, 300, construction_sup_error},
        {8, 0, pgd_box_invariant},
        {9, 0, gradient_check},
        {10, 0, mask_kept_counts},
        {11, 1200, sweep_accuracy_trend},
    };
    int failures = 0;
    for (const Criterion& c : table) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.fn();
        } catch (const std::exception& e) {
            out = {false, strf("exception: %s", e.what())};
        }
        double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool pass = out.pass;
        std::string line = out.detail + strf("; %.1fs", dt);
        if (c.limit_s > 0) {
            line += strf(" of %.0fs budget", c.limit_s);
            if (dt >= c.limit_s) {
                pass = false;
                line += " (EXCEEDED)";
            }
        }
        std::printf("criterion %d: %s - %s\n", c.idx, pass ? "PASS" : "FAIL", line.c_str());
        std::fflush(stdout);
        if (!pass) ++failures;
    }
    if (failures) {
        std::printf("%d of 11 criteria failed\n", failures);
        return 1;
    }
    std::printf("all 11 criteria passed\n");
    return 0;
}
