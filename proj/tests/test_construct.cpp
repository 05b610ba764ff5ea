#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "plth/construct.hpp"
#include "plth/json_io.hpp"
#include "plth/mlp.hpp"
#include "plth/rng.hpp"

using namespace plth;

namespace {

Mlp single_layer(const Matrix& w) {
    Mlp net;
    net.dims = {w.cols, w.rows};
    net.weights = {w};
    return net;
}

std::size_t total_hidden(const CandidateNet& net) {
    std::size_t h = 0;
    for (std::size_t v : net.hidden_dims) h += v;
    return h;
}

}  // namespace

TEST_CASE("validate_target") {
    Matrix zero(3, 3, 0.0);
    TargetReport a = validate_target(single_layer(zero));
    CHECK(a.pass);
    CHECK(a.layers[0].spectral == doctest::Approx(0.0));

    Matrix half_eye(2, 2, 0.0);
    half_eye(0, 0) = 0.5;
    half_eye(1, 1) = 0.5;
    TargetReport b = validate_target(single_layer(half_eye));
    CHECK(b.pass);
    CHECK(b.layers[0].spectral == doctest::Approx(0.5));
    CHECK(b.layers[0].max_abs == doctest::Approx(0.5));

    // Entries pass the box bound but the operator norm is 2.
    Matrix fat(4, 4, 0.5);
    TargetReport c = validate_target(single_layer(fat));
    CHECK(!c.pass);
    CHECK(c.layers[0].spectral == doctest::Approx(2.0));
    CHECK(c.layers[0].max_abs_ok);
    CHECK(!c.layers[0].spectral_ok);
}

TEST_CASE("spectral_norm") {
    Matrix d(2, 2, 0.0);
    d(0, 0) = 3.0;
    d(1, 1) = 1.0;
    CHECK(spectral_norm(d) == doctest::Approx(3.0));
    Matrix rect(1, 3, 0.0);
    rect(0, 0) = 2.0;
    CHECK(spectral_norm(rect) == doctest::Approx(2.0));
}

TEST_CASE("random_target is valid and seed-deterministic") {
    Mlp a = random_target({5, 4, 3}, 11);
    CHECK(a.dims == std::vector<std::size_t>{5, 4, 3});
    check_shapes(a);
    CHECK(validate_target(a).pass);
    Mlp b = random_target({5, 4, 3}, 11);
    CHECK(a.weights[0].a == b.weights[0].a);
    Mlp c = random_target({5, 4, 3}, 12);
    CHECK(a.weights[0].a != c.weights[0].a);
}

TEST_CASE("forward") {
    // Bias-free: zero in, zero out.
    Mlp two = random_target({3, 5, 2}, 3);
    std::vector<double> out0 = forward(two, {0.0, 0.0, 0.0});
    CHECK(out0[0] == 0.0);
    CHECK(out0[1] == 0.0);

    // The last layer is linear: negative outputs survive.
    Matrix w(1, 1, 0.0);
    w(0, 0) = 1.0;
    CHECK(forward(single_layer(w), {-2.0})[0] == doctest::Approx(-2.0));

    // A hidden layer clips negatives before the final linear map.
    Mlp deep;
    deep.dims = {1, 1, 1};
    deep.weights = {w, w};
    CHECK(forward(deep, {-2.0})[0] == doctest::Approx(0.0));
    CHECK(forward(deep, {2.0})[0] == doctest::Approx(2.0));
}

TEST_CASE("init_candidate structure") {
    std::vector<std::size_t> dims{4, 8, 3};
    double eta = 0.05;
    CandidateNet net = init_candidate(dims, eta, 0.0, 1.0, 1.0, 21);
    REQUIRE(net.pairs() == 2);
    CHECK(net.target_dims == dims);

    for (std::size_t l = 0; l < net.pairs(); ++l) {
        std::size_t d_in = dims[l];
        std::size_t d_out = dims[l + 1];
        // Pre-rounding width follows the documented per-pair formula.
        double log_arg = std::log(static_cast<double>(d_in) * static_cast<double>(d_out) *
                                  2.0 / eta);
        double want = static_cast<double>(d_in) * log_arg / std::log(1.25) +
                      static_cast<double>(d_in) * log_arg;
        CHECK(net.width_real[l] == doctest::Approx(want).epsilon(1e-12));

        // Rounding: every coordinate owns an even block, total >= width.
        CHECK(net.block_units[l] % 2 == 0);
        CHECK(net.block_units[l] >= 2);
        CHECK(net.hidden_dims[l] == d_in * net.block_units[l]);
        CHECK(static_cast<double>(net.hidden_dims[l]) >= net.width_real[l]);

        // Sign layer: +1 rows on top, -1 rows below.
        const Matrix& inner = net.inner(l);
        CHECK(inner.rows == net.hidden_dims[l]);
        CHECK(inner.cols == d_in);
        for (std::size_t i = 0; i < inner.rows; ++i)
            for (std::size_t j = 0; j < inner.cols; ++j)
                CHECK(inner(i, j) == (i < inner.rows / 2 ? 1.0 : -1.0));

        // Mixing layer: correct shape, entries inside [-1, 1].
        const Matrix& outer = net.outer(l);
        CHECK(outer.rows == d_out);
        CHECK(outer.cols == net.hidden_dims[l]);
        for (double v : outer.a) {
            CHECK(v >= -1.0);
            CHECK(v <= 1.0);
        }
    }

    CandidateNet again = init_candidate(dims, eta, 0.0, 1.0, 1.0, 21);
    CHECK(net.outer(0).a == again.outer(0).a);
    CandidateNet other = init_candidate(dims, eta, 0.0, 1.0, 1.0, 22);
    CHECK(net.outer(0).a != other.outer(0).a);
}

TEST_CASE("init_candidate width shrinks as the perturbation budget grows") {
    std::vector<std::size_t> dims{6, 6};
    double prev_real = 1e300;
    std::size_t prev_hidden = static_cast<std::size_t>(-1);
    for (double eps : {0.0, 1e-3, 1e-2, 1e-1}) {
        CandidateNet net = init_candidate(dims, 1e-3, eps, 1.0, 1.0, 5);
        CHECK(net.width_real[0] < prev_real);
        CHECK(net.hidden_dims[0] <= prev_hidden);
        prev_real = net.width_real[0];
        prev_hidden = net.hidden_dims[0];
    }
}

TEST_CASE("init_candidate rejects bad arguments") {
    CHECK_THROWS_AS(init_candidate({4}, 0.1, 0.0, 1.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(init_candidate({4, 0}, 0.1, 0.0, 1.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(init_candidate({4, 3}, 0.0, 0.0, 1.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(init_candidate({4, 3}, 1.0, 0.0, 1.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(init_candidate({4, 3}, 0.1, -0.1, 1.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(init_candidate({4, 3}, 0.1, 0.0, 0.0, 1.0, 1), std::invalid_argument);
}

TEST_CASE("approximate_weight worked cases") {
    // Zero target: the empty selection is exact on both halves.
    WeightApprox z = approximate_weight(0.0, {0.4, 0.2, -0.3, 0.9}, 0.0, 0.1);
    CHECK(z.error == doctest::Approx(0.0));
    CHECK(z.mask == std::vector<std::uint8_t>{0, 0, 0, 0});

    // One unit per sign with budget: plus solves 0.3 + y = 0.5,
    // minus solves -0.2 + y = -0.5.
    WeightApprox a = approximate_weight(0.5, {0.3, -0.2}, 0.5, 0.1);
    CHECK(a.error == doctest::Approx(0.0));
    CHECK(a.mask == std::vector<std::uint8_t>{1, 1});
    CHECK(a.y[0] == doctest::Approx(0.2));
    CHECK(a.y[1] == doctest::Approx(-0.3));
    CHECK(a.plus_error == doctest::Approx(0.0));
    CHECK(a.minus_error == doctest::Approx(0.0));

    CHECK_THROWS_AS(approximate_weight(0.1, {0.3, 0.2, 0.1}, 0.0, 0.1),
                    std::invalid_argument);
    CHECK_THROWS_AS(approximate_weight(0.1, {}, 0.0, 0.1), std::invalid_argument);
}

TEST_CASE("approximate_weight bounds the scalar response gap") {
    Rng rng(808);
    for (int it = 0; it < 50; ++it) {
        std::size_t n = 2 + rng.below(5);
        std::vector<double> v(2 * n);
        for (auto& c : v) c = rng.uniform(-1.0, 1.0);
        double w = rng.uniform(-0.5, 0.5);
        double eps = (it % 2 == 0) ? 0.0 : rng.uniform(0.0, 0.1);
        WeightApprox wa = approximate_weight(w, v, eps, 0.01);

        for (std::size_t i = 0; i < 2 * n; ++i) {
            CHECK(std::abs(wa.y[i]) <= eps + 1e-15);
            if (!wa.mask[i]) CHECK(wa.y[i] == 0.0);
        }

        // Selected coefficient sums of the two halves.
        double plus_sum = 0.0, minus_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (wa.mask[i]) plus_sum += v[i] + wa.y[i];
            if (wa.mask[n + i]) minus_sum += v[n + i] + wa.y[n + i];
        }
        // The response plus_sum*relu(x) + minus_sum*relu(-x) tracks w*x on
        // [-1, 1]; the reported error bounds the endpoint gaps.
        double sup = 0.0;
        for (int g = -20; g <= 20; ++g) {
            double x = static_cast<double>(g) / 20.0;
            double got = plus_sum * relu(x) + minus_sum * relu(-x);
            sup = std::max(sup, std::abs(got - w * x));
        }
        CHECK(std::abs(plus_sum - w) == doctest::Approx(wa.plus_error).epsilon(1e-9));
        CHECK(std::abs(minus_sum + w) == doctest::Approx(wa.minus_error).epsilon(1e-9));
        CHECK(sup <= wa.error + 1e-12);
    }
}

TEST_CASE("approximate_layer reduces to approximate_weight for one entry") {
    Rng rng(909);
    std::size_t m = 6;  // units per sign
    Matrix inner(2 * m, 1, 0.0);
    for (std::size_t i = 0; i < 2 * m; ++i) inner(i, 0) = i < m ? 1.0 : -1.0;
    Matrix outer(1, 2 * m, 0.0);
    for (double& v : outer.a) v = rng.uniform(-1.0, 1.0);
    Matrix w(1, 1, 0.0);
    w(0, 0) = 0.37;

    LayerApprox la = approximate_layer(w, inner, outer, 0.02, 0.05, 1);
    WeightApprox wa = approximate_weight(0.37, outer.a, 0.02, 0.05);
    CHECK(la.entry_budget == doctest::Approx(0.05));
    CHECK(la.max_entry_error == doctest::Approx(wa.error));
    CHECK(la.sum_entry_error == doctest::Approx(wa.error));
    for (std::size_t t = 0; t < 2 * m; ++t) {
        CHECK(la.outer_mask(0, t) == static_cast<double>(wa.mask[t]));
        CHECK(la.outer_perturbation(0, t) == doctest::Approx(wa.y[t]));
    }
    // Every hidden unit listens to the single input coordinate.
    for (std::size_t i = 0; i < 2 * m; ++i) CHECK(la.inner_mask(i, 0) == 1.0);
}

TEST_CASE("approximate_layer on a zero target selects nothing") {
    CandidateNet cand = init_candidate({3, 4}, 0.1, 0.0, 1.0, 1.0, 31);
    Matrix zero(4, 3, 0.0);
    LayerApprox la = approximate_layer(zero, cand.inner(0), cand.outer(0), 0.0, 0.05, 1);
    CHECK(la.pass);
    CHECK(la.max_entry_error == doctest::Approx(0.0));
    for (double v : la.outer_mask.a) CHECK(v == 0.0);
    // The sign-layer mask is the block-diagonal pattern: one owning
    // coordinate per row, mirrored across the sign halves.
    std::size_t per_sign = cand.hidden_dims[0] / 2;
    std::size_t half_m = per_sign / 3;
    for (std::size_t i = 0; i < cand.hidden_dims[0]; ++i) {
        std::size_t row_sum = 0;
        std::size_t owner = 0;
        for (std::size_t j = 0; j < 3; ++j)
            if (la.inner_mask(i, j) == 1.0) {
                ++row_sum;
                owner = j;
            }
        CHECK(row_sum == 1);
        CHECK(owner == (i % per_sign) / half_m);
    }
}

TEST_CASE("approximate_layer validates shapes") {
    CandidateNet cand = init_candidate({3, 4}, 0.1, 0.0, 1.0, 1.0, 31);
    Matrix wrong_cols(4, 2, 0.0);
    CHECK_THROWS_AS(approximate_layer(wrong_cols, cand.inner(0), cand.outer(0), 0.0, 0.05, 1),
                    std::invalid_argument);
    Matrix wrong_rows(5, 3, 0.0);
    CHECK_THROWS_AS(approximate_layer(wrong_rows, cand.inner(0), cand.outer(0), 0.0, 0.05, 1),
                    std::invalid_argument);
    Matrix w(4, 3, 0.0);
    CHECK_THROWS_AS(approximate_layer(w, cand.inner(0), cand.outer(0), 0.0, 0.0, 1),
                    std::invalid_argument);
}

TEST_CASE("dense pruned forward matches the raw pool") {
    CandidateNet cand = init_candidate({3, 4, 2}, 0.2, 0.0, 1.0, 1.0, 17);
    PrunedPerturbedNet dense;
    dense.base = cand;
    dense.eps = 0.0;
    for (const Matrix& w : cand.weights) {
        dense.masks.push_back(Matrix(w.rows, w.cols, 1.0));
        dense.perturbations.push_back(Matrix(w.rows, w.cols, 0.0));
    }
    check_feasible(dense);
    Rng rng(18);
    for (int it = 0; it < 20; ++it) {
        std::vector<double> x{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                              rng.uniform(-1.0, 1.0)};
        std::vector<double> a = forward(cand, x);
        std::vector<double> b = forward(dense, x);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]));
    }
}

TEST_CASE("approximate_network hits the accuracy target end to end") {
    std::vector<std::size_t> dims{3, 4, 2};
    double eta = 0.1;
    Mlp target = random_target(dims, 33);
    REQUIRE(validate_target(target).pass);

    std::size_t hidden_at_zero = 0;
    for (double eps : {0.0, 0.1}) {
        CandidateNet cand = init_candidate(dims, eta, eps, 1.0, 1.0, 34);
        NetworkApprox na = approximate_network(target, cand, eps, eta, 1);
        CHECK(na.all_pass);
        REQUIRE(na.layers.size() == 2);
        for (std::size_t l = 0; l < na.layers.size(); ++l) {
            const LayerReport& rep = na.layers[l];
            // Per-layer budget eta/(2L) split evenly across the entries.
            double entries = static_cast<double>(dims[l] * dims[l + 1]);
            CHECK(rep.entry_budget == doctest::Approx(eta / 4.0 / entries));
            CHECK(rep.max_entry_error <= rep.entry_budget);
            CHECK(rep.pass);
        }
        check_feasible(na.net);
        CHECK(na.net.eps == eps);

        SupError se = measure_sup_error(target, na.net, 2000, 35);
        CHECK(se.sup_err < eta);
        CHECK(se.mean_err <= se.sup_err);

        if (eps == 0.0)
            hidden_at_zero = total_hidden(cand);
        else
            CHECK(total_hidden(cand) < hidden_at_zero);
    }
}

TEST_CASE("approximate_network rejects a mismatched candidate") {
    Mlp target = random_target({3, 4, 2}, 33);
    CandidateNet cand = init_candidate({3, 5, 2}, 0.1, 0.0, 1.0, 1.0, 34);
    CHECK_THROWS_AS(approximate_network(target, cand, 0.0, 0.1, 1), std::invalid_argument);
}

TEST_CASE("network json round trips") {
    Mlp target = random_target({2, 3, 2}, 51);
    json jt = target;
    Mlp target2 = jt.get<Mlp>();
    CHECK(target2.dims == target.dims);
    CHECK(target2.weights[1].a == target.weights[1].a);

    CandidateNet cand = init_candidate({2, 3, 2}, 0.2, 0.05, 1.0, 1.0, 52);
    NetworkApprox na = approximate_network(target, cand, 0.05, 0.2, 1);
    json jn = na.net;
    PrunedPerturbedNet back = jn.get<PrunedPerturbedNet>();  // re-runs feasibility checks
    CHECK(back.eps == na.net.eps);
    CHECK(back.base.hidden_dims == cand.hidden_dims);
    std::vector<double> x{0.3, -0.7};
    CHECK(forward(back, x)[0] == doctest::Approx(forward(na.net, x)[0]));

    // Tampered files fail the feasibility checks on load.
    json bad_eps = na.net;
    bad_eps["eps"] = -1.0;
    CHECK_THROWS_AS(bad_eps.get<PrunedPerturbedNet>(), std::invalid_argument);

    json bad_pert = na.net;
    bad_pert["perturbations"][1]["data"][0] = 10.0;  // exceeds the eps cap
    CHECK_THROWS_AS(bad_pert.get<PrunedPerturbedNet>(), std::invalid_argument);
}
