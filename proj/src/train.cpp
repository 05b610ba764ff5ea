#include "plth/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "plth/parallel.hpp"
#include "plth/rng.hpp"

namespace plth {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Seed streams: keep training, pruning and weight-init draws disjoint.
constexpr std::uint64_t kStreamCell = 0;
constexpr std::uint64_t kStreamTrain = 1;
constexpr std::uint64_t kStreamInit = 2;

void check_dims_for_data(const std::vector<Matrix>& weights, const Dataset& data,
                         const char* who) {
    if (weights.empty()) throw std::invalid_argument(std::string(who) + ": no layers");
    if (weights.front().cols != data.dim)
        throw std::invalid_argument(std::string(who) + ": input dim " + std::to_string(data.dim) +
                                    " does not match first layer width " +
                                    std::to_string(weights.front().cols));
    if (weights.back().rows < static_cast<std::size_t>(data.classes))
        throw std::invalid_argument(std::string(who) + ": fewer logits than classes");
}

// Per-sample activations reused across a batch.
struct Workspace {
    std::vector<std::vector<double>> pre;   // pre-activation per layer
    std::vector<std::vector<double>> act;   // post-relu per layer (last = logits)
    std::vector<std::vector<double>> delta;

    void resize(const std::vector<Matrix>& weights) {
        pre.resize(weights.size());
        act.resize(weights.size());
        delta.resize(weights.size());
        for (std::size_t l = 0; l < weights.size(); ++l) {
            pre[l].resize(weights[l].rows);
            act[l].resize(weights[l].rows);
            delta[l].resize(weights[l].rows);
        }
    }
};

// Forward one sample through `weights`, filling ws.pre/ws.act.
void forward_sample(const std::vector<Matrix>& weights, const double* x, Workspace& ws) {
    const double* cur = x;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        matvec(weights[l], cur, ws.pre[l].data());
        bool last = l + 1 == weights.size();
        for (std::size_t i = 0; i < ws.pre[l].size(); ++i)
            ws.act[l][i] = last ? ws.pre[l][i] : relu(ws.pre[l][i]);
        cur = ws.act[l].data();
    }
}

// Softmax cross-entropy of the filled workspace against `label`; fills the
// top delta (dL/dlogits).
double softmax_delta(Workspace& ws, int label) {
    std::vector<double>& logits = ws.act.back();
    std::vector<double>& dl = ws.delta.back();
    double top = *std::max_element(logits.begin(), logits.end());
    double denom = 0.0;
    for (double v : logits) denom += std::exp(v - top);
    double log_denom = std::log(denom);
    for (std::size_t i = 0; i < logits.size(); ++i)
        dl[i] = std::exp(logits[i] - top) / denom;
    dl[static_cast<std::size_t>(label)] -= 1.0;
    return log_denom - (logits[static_cast<std::size_t>(label)] - top);
}

// Backward pass for one sample.  `grad_sink(l, i, j, g)` receives every
// weight-gradient contribution; deltas flow through `weights` (which is the
// effective, possibly masked, forward matrix).
template <typename Sink>
void backward_sample(const std::vector<Matrix>& weights, const double* x, Workspace& ws,
                     Sink&& grad_sink) {
    for (std::size_t lr = weights.size(); lr-- > 0;) {
        const std::vector<double>& d = ws.delta[lr];
        const double* input = lr == 0 ? x : ws.act[lr - 1].data();
        grad_sink(lr, d.data(), input);
        if (lr == 0) break;
        std::vector<double>& dprev = ws.delta[lr - 1];
        matvec_t(weights[lr], d.data(), dprev.data());
        for (std::size_t j = 0; j < dprev.size(); ++j)
            if (ws.pre[lr - 1][j] <= 0.0) dprev[j] = 0.0;
    }
}

std::vector<std::size_t> epoch_order(std::size_t n, Rng& rng) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order.begin(), order.end());
    return order;
}

}  // namespace

DenseNet init_dense(const std::vector<std::size_t>& dims, std::uint64_t seed) {
    if (dims.size() < 2) throw std::invalid_argument("init_dense: need at least two dims");
    for (std::size_t d : dims)
        if (d == 0) throw std::invalid_argument("init_dense: zero-sized layer");
    DenseNet net;
    net.dims = dims;
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        Matrix w(dims[l + 1], dims[l]);
        for (double& v : w.a) v = rng.uniform(-0.5, 0.5);
        net.weights.push_back(w);
        net.init_weights.push_back(std::move(w));
    }
    return net;
}

double cosine_lr(double lr0, int t, int total) {
    if (total <= 0) throw std::invalid_argument("cosine_lr: total must be > 0");
    if (t < 0 || t > total) throw std::invalid_argument("cosine_lr: t out of range");
    return lr0 * (1.0 + std::cos(kPi * static_cast<double>(t) / static_cast<double>(total))) / 2.0;
}

double loss_and_gradient(const std::vector<Matrix>& weights, const Dataset& data,
                         const std::vector<std::size_t>& batch, std::vector<Matrix>& grads) {
    check_dims_for_data(weights, data, "loss_and_gradient");
    if (batch.empty()) throw std::invalid_argument("loss_and_gradient: empty batch");
    grads.resize(weights.size());
    for (std::size_t l = 0; l < weights.size(); ++l) {
        grads[l] = Matrix(weights[l].rows, weights[l].cols, 0.0);
    }
    Workspace ws;
    ws.resize(weights);
    double loss = 0.0;
    for (std::size_t idx : batch) {
        if (idx >= data.size()) throw std::invalid_argument("loss_and_gradient: index out of range");
        const double* x = data.x(idx);
        forward_sample(weights, x, ws);
        loss += softmax_delta(ws, data.ys[idx]);
        backward_sample(weights, x, ws,
                        [&](std::size_t l, const double* d, const double* input) {
                            Matrix& g = grads[l];
                            for (std::size_t i = 0; i < g.rows; ++i) {
                                double di = d[i];
                                if (di == 0.0) continue;
                                double* gr = g.row(i);
                                for (std::size_t j = 0; j < g.cols; ++j)
                                    gr[j] += di * input[j];
                            }
                        });
    }
    double scale = 1.0 / static_cast<double>(batch.size());
    for (Matrix& g : grads)
        for (double& v : g.a) v *= scale;
    return loss * scale;
}

double accuracy(const std::vector<Matrix>& weights, const Dataset& data) {
    check_dims_for_data(weights, data, "accuracy");
    Workspace ws;
    ws.resize(weights);
    std::size_t hits = 0;
    for (std::size_t s = 0; s < data.size(); ++s) {
        forward_sample(weights, data.x(s), ws);
        const std::vector<double>& logits = ws.act.back();
        std::size_t arg = 0;
        for (std::size_t i = 1; i < logits.size(); ++i)
            if (logits[i] > logits[arg]) arg = i;
        if (static_cast<int>(arg) == data.ys[s]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(data.size());
}

DenseNet pgd_train(const DenseNet& net, const Dataset& train, const TrainConfig& cfg,
                   const std::function<void(int, const std::vector<Matrix>&)>& observer) {
    if (net.weights.size() != net.init_weights.size())
        throw std::invalid_argument("pgd_train: snapshot layer count mismatch");
    check_dims_for_data(net.weights, train, "pgd_train");
    if (!(cfg.eps >= 0.0)) throw std::invalid_argument("pgd_train: eps must be >= 0");
    if (!(cfg.lr > 0.0)) throw std::invalid_argument("pgd_train: lr must be > 0");
    if (cfg.epochs < 0) throw std::invalid_argument("pgd_train: epochs must be >= 0");
    if (cfg.batch_size < 1) throw std::invalid_argument("pgd_train: batch_size must be >= 1");

    DenseNet out = net;
    std::size_t n_layers = out.weights.size();
    // Offsets from the snapshot; the box constraint lives here.
    std::vector<Matrix> offset(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        const Matrix& w = out.weights[l];
        const Matrix& w0 = out.init_weights[l];
        if (!w.same_shape(w0))
            throw std::invalid_argument("pgd_train: snapshot shape mismatch");
        offset[l] = Matrix(w.rows, w.cols, 0.0);
        for (std::size_t i = 0; i < w.count(); ++i) {
            double d = w.a[i] - w0.a[i];
            offset[l].a[i] = std::copysign(std::min(std::abs(d), cfg.eps), d);
            out.weights[l].a[i] = w0.a[i] + offset[l].a[i];
        }
    }

    Rng rng(cfg.seed);
    std::vector<Matrix> grads;
    int step = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::vector<std::size_t> order = epoch_order(train.size(), rng);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            std::size_t stop = std::min(order.size(), start + cfg.batch_size);
            std::vector<std::size_t> batch(order.begin() + start, order.begin() + stop);
            double loss = loss_and_gradient(out.weights, train, batch, grads);
            if (!std::isfinite(loss))
                throw std::runtime_error("pgd_train: non-finite loss " + std::to_string(loss) +
                                         " at step " + std::to_string(step));
            for (std::size_t l = 0; l < n_layers; ++l) {
                double* off = offset[l].a.data();
                double* w = out.weights[l].a.data();
                const double* w0 = out.init_weights[l].a.data();
                const double* g = grads[l].a.data();
                for (std::size_t i = 0; i < offset[l].count(); ++i) {
                    double moved = off[i] - cfg.lr * g[i];
                    // Project back into the box; this is the final write, so
                    // |w - w0| <= eps holds exactly at every step.
                    off[i] = std::copysign(std::min(std::abs(moved), cfg.eps), moved);
                    w[i] = w0[i] + off[i];
                }
            }
            ++step;
            if (observer) observer(step, out.weights);
        }
    }
    return out;
}

Matrix topk_mask(const Matrix& scores, double sparsity) {
    if (!(sparsity >= 0.0) || !(sparsity < 1.0))
        throw std::invalid_argument("topk_mask: sparsity must be in [0, 1)");
    std::size_t count = scores.count();
    std::size_t keep = static_cast<std::size_t>(std::llround((1.0 - sparsity) *
                                                             static_cast<double>(count)));
    if (keep == 0) throw std::invalid_argument("topk_mask: sparsity keeps no weights");
    Matrix mask(scores.rows, scores.cols, 0.0);
    if (keep >= count) {
        for (double& v : mask.a) v = 1.0;
        return mask;
    }
    std::vector<std::uint32_t> idx(count);
    std::iota(idx.begin(), idx.end(), 0u);
    auto better = [&scores](std::uint32_t a, std::uint32_t b) {
        double sa = std::abs(scores.a[a]);
        double sb = std::abs(scores.a[b]);
        if (sa != sb) return sa > sb;
        return a < b;  // deterministic on exact score ties
    };
    std::nth_element(idx.begin(), idx.begin() + keep, idx.end(), better);
    for (std::size_t t = 0; t < keep; ++t) mask.a[idx[t]] = 1.0;
    return mask;
}

PruneOutcome edge_popup(const DenseNet& frozen, const Dataset& train, const Dataset& test,
                        double sparsity, const PruneConfig& cfg) {
    check_dims_for_data(frozen.weights, train, "edge_popup");
    check_dims_for_data(frozen.weights, test, "edge_popup");
    if (!(cfg.lr > 0.0)) throw std::invalid_argument("edge_popup: lr must be > 0");
    if (cfg.epochs < 0) throw std::invalid_argument("edge_popup: epochs must be >= 0");
    if (cfg.batch_size < 1) throw std::invalid_argument("edge_popup: batch_size must be >= 1");

    std::size_t n_layers = frozen.weights.size();
    Rng rng(cfg.seed);
    std::vector<Matrix> scores(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        const Matrix& w = frozen.weights[l];
        scores[l] = Matrix(w.rows, w.cols);
        double scale = 1.0 / std::sqrt(static_cast<double>(w.cols));
        for (double& v : scores[l].a) v = rng.uniform(-1.0, 1.0) * scale;
    }

    std::vector<Matrix> effective(n_layers);
    std::vector<Matrix> score_grads(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        effective[l] = Matrix(frozen.weights[l].rows, frozen.weights[l].cols, 0.0);
        score_grads[l] = Matrix(frozen.weights[l].rows, frozen.weights[l].cols, 0.0);
    }
    auto rebuild_effective = [&]() {
        for (std::size_t l = 0; l < n_layers; ++l) {
            Matrix mask = topk_mask(scores[l], sparsity);
            const double* w = frozen.weights[l].a.data();
            const double* m = mask.a.data();
            double* e = effective[l].a.data();
            for (std::size_t i = 0; i < effective[l].count(); ++i) e[i] = m[i] * w[i];
        }
    };

    Workspace ws;
    ws.resize(frozen.weights);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        double lr = cfg.cosine_annealing ? cosine_lr(cfg.lr, epoch, cfg.epochs) : cfg.lr;
        std::vector<std::size_t> order = epoch_order(train.size(), rng);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            std::size_t stop = std::min(order.size(), start + cfg.batch_size);
            rebuild_effective();
            for (Matrix& g : score_grads)
                for (double& v : g.a) v = 0.0;
            for (std::size_t b = start; b < stop; ++b) {
                const double* x = train.x(order[b]);
                forward_sample(effective, x, ws);
                double loss = softmax_delta(ws, train.ys[order[b]]);
                if (!std::isfinite(loss))
                    throw std::runtime_error("edge_popup: non-finite loss in epoch " +
                                             std::to_string(epoch));
                // Straight-through score update: gradient of the masked
                // weight, times the frozen weight value, for every edge.
                backward_sample(effective, x, ws,
                                [&](std::size_t l, const double* d, const double* input) {
                                    Matrix& g = score_grads[l];
                                    const Matrix& w = frozen.weights[l];
                                    for (std::size_t i = 0; i < g.rows; ++i) {
                                        double di = d[i];
                                        if (di == 0.0) continue;
                                        double* gr = g.row(i);
                                        const double* wr = w.row(i);
                                        for (std::size_t j = 0; j < g.cols; ++j)
                                            gr[j] += di * input[j] * wr[j];
                                    }
                                });
            }
            double scale = lr / static_cast<double>(stop - start);
            // Selection is by |score|, so the straight-through gradient picks
            // up a sign(score) factor: useful edges grow in magnitude, harmful
            // ones shrink, whichever side of zero the score sits on.
            for (std::size_t l = 0; l < n_layers; ++l)
                for (std::size_t i = 0; i < scores[l].count(); ++i) {
                    double s = scores[l].a[i];
                    double sign = std::signbit(s) ? -1.0 : 1.0;
                    scores[l].a[i] = s - scale * sign * score_grads[l].a[i];
                }
        }
    }

    PruneOutcome out;
    out.masks.reserve(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) out.masks.push_back(topk_mask(scores[l], sparsity));
    for (std::size_t l = 0; l < n_layers; ++l) {
        const double* w = frozen.weights[l].a.data();
        const double* m = out.masks[l].a.data();
        double* e = effective[l].a.data();
        for (std::size_t i = 0; i < effective[l].count(); ++i) e[i] = m[i] * w[i];
    }
    out.train_accuracy = accuracy(effective, train);
    out.test_accuracy = accuracy(effective, test);
    return out;
}

SweepResult sweep(const std::vector<double>& eps_grid, const std::vector<double>& sparsity_grid,
                  const std::vector<std::size_t>& dims, const TrainConfig& train_cfg,
                  const PruneConfig& prune_cfg, const Dataset& train, const Dataset& test,
                  std::uint64_t master_seed, int workers) {
    if (eps_grid.empty() || sparsity_grid.empty())
        throw std::invalid_argument("sweep: empty grid");

    // All eps cells start from one shared initialization so the only
    // difference between columns is how far training may travel.
    DenseNet base = init_dense(dims, mix_seed(master_seed, 0, 0, kStreamInit));

    std::size_t n_eps = eps_grid.size();
    std::size_t n_s = sparsity_grid.size();
    std::vector<DenseNet> trained(n_eps);
    std::vector<bool> train_ok(n_eps, false);
    parallel_for(n_eps, workers, [&](std::size_t e) {
        TrainConfig cfg = train_cfg;
        cfg.eps = eps_grid[e];
        cfg.seed = mix_seed(master_seed, e, 0, kStreamTrain);
        try {
            trained[e] = pgd_train(base, train, cfg);
            train_ok[e] = true;
        } catch (const std::exception&) {
            train_ok[e] = false;
        }
    });

    SweepResult out;
    out.rows.assign(n_eps * n_s, SweepRow{});
    parallel_for(n_eps * n_s, workers, [&](std::size_t idx) {
        std::size_t e = idx / n_s;
        std::size_t s = idx % n_s;
        SweepRow& row = out.rows[idx];
        row.eps = eps_grid[e];
        row.sparsity = sparsity_grid[s];
        row.seed = mix_seed(master_seed, e, s, kStreamCell);
        if (!train_ok[e]) return;
        PruneConfig cfg = prune_cfg;
        cfg.seed = row.seed;
        try {
            PruneOutcome pruned = edge_popup(trained[e], train, test, sparsity_grid[s], cfg);
            row.train_acc = pruned.train_accuracy;
            row.test_acc = pruned.test_accuracy;
            row.ok = true;
        } catch (const std::exception&) {
            row.ok = false;
        }
    });

    for (std::size_t e = 0; e < n_eps; ++e) {
        BestRow best;
        best.eps = eps_grid[e];
        best.best_test_acc = std::numeric_limits<double>::quiet_NaN();
        bool seen = false;
        for (std::size_t s = 0; s < n_s; ++s) {
            const SweepRow& row = out.rows[e * n_s + s];
            if (!row.ok) continue;
            if (!seen || row.test_acc > best.best_test_acc) {
                best.best_test_acc = row.test_acc;
                best.optimal_sparsity = row.sparsity;
                seen = true;
            }
        }
        out.best_per_eps.push_back(best);
    }
    return out;
}

}  // namespace plth
