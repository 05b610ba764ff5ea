#include "plth/construct.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "plth/parallel.hpp"
#include "plth/rng.hpp"
#include "plth/subset_sum.hpp"

namespace plth {

namespace {

// Rows of the sign layer owned by input coordinate j: `half_m` rows in the
// +1 half followed by the mirrored `half_m` rows in the -1 half.
struct BlockLayout {
    std::size_t d_in = 0;
    std::size_t half_m = 0;   // units per coordinate per sign
    std::size_t half_h = 0;   // rows in one sign half

    std::size_t plus_row(std::size_t j, std::size_t t) const { return j * half_m + t; }
    std::size_t minus_row(std::size_t j, std::size_t t) const {
        return half_h + j * half_m + t;
    }
};

BlockLayout layout_for(const Matrix& inner_u) {
    BlockLayout bl;
    bl.d_in = inner_u.cols;
    if (inner_u.rows == 0 || inner_u.rows % (2 * bl.d_in) != 0)
        throw std::invalid_argument(
            "approximate_layer: sign-layer rows must be a positive multiple of 2*d_in");
    bl.half_h = inner_u.rows / 2;
    bl.half_m = bl.half_h / bl.d_in;
    return bl;
}

void check_sign_pattern(const Matrix& inner_u) {
    std::size_t half = inner_u.rows / 2;
    for (std::size_t i = 0; i < inner_u.rows; ++i) {
        double want = i < half ? 1.0 : -1.0;
        for (std::size_t j = 0; j < inner_u.cols; ++j)
            if (inner_u(i, j) != want)
                throw std::invalid_argument("approximate_layer: sign layer is not a +1/-1 split");
    }
}

}  // namespace

CandidateNet init_candidate(const std::vector<std::size_t>& target_dims, double eta, double eps,
                            double c1, double c2, std::uint64_t seed,
                            const std::function<void(const std::string&)>& log_fn) {
    if (target_dims.size() < 2)
        throw std::invalid_argument("init_candidate: need at least two target dims");
    for (std::size_t d : target_dims)
        if (d == 0) throw std::invalid_argument("init_candidate: zero-sized layer");
    if (!(eta > 0.0) || !(eta < 1.0))
        throw std::invalid_argument("init_candidate: eta must be in (0, 1)");
    if (!std::isfinite(eps) || eps < 0.0)
        throw std::invalid_argument("init_candidate: eps must be finite and >= 0");
    if (!(c1 > 0.0) || !(c2 > 0.0))
        throw std::invalid_argument("init_candidate: c1 and c2 must be > 0");

    CandidateNet net;
    net.target_dims = target_dims;
    std::size_t n_pairs = target_dims.size() - 1;
    Rng rng(seed);
    for (std::size_t l = 0; l < n_pairs; ++l) {
        std::size_t d_in = target_dims[l];
        std::size_t d_out = target_dims[l + 1];
        double d = static_cast<double>(d_in);
        double log_arg = std::log(d * static_cast<double>(d_out) *
                                  static_cast<double>(n_pairs) / eta);
        double k1 = c1 * d * log_arg / std::log(1.25 + eps / 2.0);
        double k2 = c2 * d * log_arg / (1.0 + eps);
        double width = k1 + k2;
        // Every input coordinate owns an even number of units, half per sign.
        std::size_t per_coord = 2 * static_cast<std::size_t>(
                                        std::max(1.0, std::ceil(width / (2.0 * d))));
        std::size_t hidden = d_in * per_coord;
        if (log_fn && static_cast<double>(hidden) != std::ceil(width))
            log_fn("pair " + std::to_string(l) + ": pool width rounded from " +
                   std::to_string(width) + " to " + std::to_string(hidden) +
                   " (" + std::to_string(per_coord) + " units per input coordinate)");
        net.hidden_dims.push_back(hidden);
        net.block_units.push_back(per_coord);
        net.width_real.push_back(width);

        Matrix inner(hidden, d_in);
        for (std::size_t i = 0; i < hidden; ++i) {
            double sign = i < hidden / 2 ? 1.0 : -1.0;
            for (std::size_t j = 0; j < d_in; ++j) inner(i, j) = sign;
        }
        net.weights.push_back(std::move(inner));

        Matrix outer(d_out, hidden);
        for (double& v : outer.a) v = rng.uniform(-1.0, 1.0);
        net.weights.push_back(std::move(outer));
    }
    return net;
}

WeightApprox approximate_weight(double w, const std::vector<double>& v, double eps, double eta) {
    if (!std::isfinite(w)) throw std::invalid_argument("approximate_weight: w is not finite");
    if (v.empty() || v.size() % 2 != 0)
        throw std::invalid_argument("approximate_weight: candidate pool must have even size");
    if (!std::isfinite(eta) || eta < 0.0)
        throw std::invalid_argument("approximate_weight: eta must be finite and >= 0");
    std::size_t n = v.size() / 2;
    CandidateSet plus{std::vector<double>(v.begin(), v.begin() + n), eps};
    CandidateSet minus{std::vector<double>(v.begin() + n, v.end()), eps};
    // The + half scales the relu of the input, the - half the relu of its
    // negation; matching coefficient sums w and -w reproduces w*x on [-1, 1].
    PerturbedSolution sol_plus = solve_auto(plus, w);
    PerturbedSolution sol_minus = solve_auto(minus, -w);

    WeightApprox out;
    out.mask.resize(2 * n);
    out.y.resize(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        out.mask[i] = sol_plus.mask[i];
        out.y[i] = sol_plus.perturbations[i];
        out.mask[n + i] = sol_minus.mask[i];
        out.y[n + i] = sol_minus.perturbations[i];
    }
    out.plus_error = sol_plus.error;
    out.minus_error = sol_minus.error;
    out.error = sol_plus.error + sol_minus.error;
    return out;
}

LayerApprox approximate_layer(const Matrix& w, const Matrix& inner_u, const Matrix& outer_u,
                              double eps, double eta_layer, int workers) {
    if (inner_u.cols != w.cols)
        throw std::invalid_argument("approximate_layer: sign layer input width != target cols");
    if (outer_u.rows != w.rows)
        throw std::invalid_argument("approximate_layer: mixing layer rows != target rows");
    if (outer_u.cols != inner_u.rows)
        throw std::invalid_argument("approximate_layer: pair widths do not match");
    if (!(eta_layer > 0.0))
        throw std::invalid_argument("approximate_layer: eta_layer must be > 0");
    if (!std::isfinite(eps) || eps < 0.0)
        throw std::invalid_argument("approximate_layer: eps must be finite and >= 0");
    BlockLayout bl = layout_for(inner_u);
    check_sign_pattern(inner_u);

    LayerApprox out;
    out.inner_mask = Matrix(inner_u.rows, inner_u.cols, 0.0);
    out.outer_mask = Matrix(outer_u.rows, outer_u.cols, 0.0);
    out.outer_perturbation = Matrix(outer_u.rows, outer_u.cols, 0.0);
    out.entry_budget = eta_layer / (static_cast<double>(w.rows) * static_cast<double>(w.cols));

    // Block-diagonal selection: every sign unit listens to exactly the
    // coordinate that owns it.
    for (std::size_t j = 0; j < bl.d_in; ++j)
        for (std::size_t t = 0; t < bl.half_m; ++t) {
            out.inner_mask(bl.plus_row(j, t), j) = 1.0;
            out.inner_mask(bl.minus_row(j, t), j) = 1.0;
        }

    std::vector<double> entry_errors(w.rows * w.cols, 0.0);
    parallel_for(w.rows * w.cols, workers, [&](std::size_t idx) {
        std::size_t i = idx / w.cols;
        std::size_t j = idx % w.cols;
        std::vector<double> pool(2 * bl.half_m);
        for (std::size_t t = 0; t < bl.half_m; ++t) {
            pool[t] = outer_u(i, bl.plus_row(j, t));
            pool[bl.half_m + t] = outer_u(i, bl.minus_row(j, t));
        }
        WeightApprox wa = approximate_weight(w(i, j), pool, eps, out.entry_budget);
        for (std::size_t t = 0; t < bl.half_m; ++t) {
            std::size_t rp = bl.plus_row(j, t);
            std::size_t rm = bl.minus_row(j, t);
            out.outer_mask(i, rp) = wa.mask[t];
            out.outer_perturbation(i, rp) = wa.y[t];
            out.outer_mask(i, rm) = wa.mask[bl.half_m + t];
            out.outer_perturbation(i, rm) = wa.y[bl.half_m + t];
        }
        entry_errors[idx] = wa.error;
    });

    out.max_entry_error = 0.0;
    out.sum_entry_error = 0.0;
    for (double e : entry_errors) {
        out.max_entry_error = std::max(out.max_entry_error, e);
        out.sum_entry_error += e;
    }
    out.pass = out.max_entry_error <= out.entry_budget;
    return out;
}

NetworkApprox approximate_network(const Mlp& target, const CandidateNet& candidate, double eps,
                                  double eta, int workers) {
    check_shapes(target);
    if (candidate.target_dims != target.dims)
        throw std::invalid_argument("approximate_network: candidate was built for another shape");
    if (!(eta > 0.0)) throw std::invalid_argument("approximate_network: eta must be > 0");
    std::size_t n_pairs = target.depth();
    double eta_layer = eta / (2.0 * static_cast<double>(n_pairs));

    NetworkApprox out;
    out.net.base = candidate;
    out.net.eps = eps;
    out.all_pass = true;
    for (std::size_t l = 0; l < n_pairs; ++l) {
        LayerApprox la = approximate_layer(target.weights[l], candidate.inner(l),
                                           candidate.outer(l), eps, eta_layer, workers);
        out.net.masks.push_back(std::move(la.inner_mask));
        out.net.masks.push_back(std::move(la.outer_mask));
        out.net.perturbations.push_back(Matrix(candidate.inner(l).rows,
                                               candidate.inner(l).cols, 0.0));
        out.net.perturbations.push_back(std::move(la.outer_perturbation));
        LayerReport rep;
        rep.entry_budget = la.entry_budget;
        rep.max_entry_error = la.max_entry_error;
        rep.sum_entry_error = la.sum_entry_error;
        rep.pass = la.pass;
        out.all_pass = out.all_pass && rep.pass;
        out.layers.push_back(rep);
    }
    check_feasible(out.net);
    return out;
}

SupError measure_sup_error(const Mlp& target, const PrunedPerturbedNet& pruned, int samples,
                           std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("measure_sup_error: samples must be >= 1");
    if (target.dims != pruned.base.target_dims)
        throw std::invalid_argument("measure_sup_error: shape mismatch");
    std::size_t d = target.dims.front();
    Rng rng(seed);
    SupError out;
    double total = 0.0;
    std::vector<double> x(d);
    for (int s = 0; s < samples; ++s) {
        bool corner = s < samples / 2;
        for (std::size_t j = 0; j < d; ++j)
            x[j] = corner ? (rng.uniform01() < 0.5 ? -1.0 : 1.0) : rng.uniform(-1.0, 1.0);
        std::vector<double> want = forward(target, x);
        std::vector<double> got = forward(pruned, x);
        double gap = 0.0;
        for (std::size_t i = 0; i < want.size(); ++i)
            gap += (want[i] - got[i]) * (want[i] - got[i]);
        gap = std::sqrt(gap);
        out.sup_err = std::max(out.sup_err, gap);
        total += gap;
    }
    out.mean_err = total / static_cast<double>(samples);
    return out;
}

}  // namespace plth
