#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "plth/dataset.hpp"
#include "plth/matrix.hpp"

namespace plth {

// Bias-free ReLU classifier whose initial weights are kept alongside the
// current ones, because training is constrained to a box around them.
struct DenseNet {
    std::vector<std::size_t> dims;
    std::vector<Matrix> weights;
    std::vector<Matrix> init_weights;

    std::size_t depth() const { return weights.size(); }
};

// Fresh network with weights Unif[-1/2, 1/2]; init snapshot equals weights.
DenseNet init_dense(const std::vector<std::size_t>& dims, std::uint64_t seed);

struct TrainConfig {
    double eps = 0.0;      // per-weight travel budget; +infinity disables the box
    double lr = 0.03;
    int epochs = 5;
    int batch_size = 128;
    std::uint64_t seed = 0;
};

struct PruneConfig {
    std::vector<double> sparsity_levels{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    double lr = 0.1;
    int epochs = 10;
    int batch_size = 128;
    bool cosine_annealing = true;
    std::uint64_t seed = 0;
};

// Cosine-annealed learning rate: lr(0) = lr0, lr(total) = 0.
double cosine_lr(double lr0, int t, int total);

// Softmax cross-entropy averaged over the batch; fills `grads` (resized to
// match) with the exact loss gradient at `weights`.
double loss_and_gradient(const std::vector<Matrix>& weights, const Dataset& data,
                         const std::vector<std::size_t>& batch, std::vector<Matrix>& grads);

// Fraction of samples whose argmax logit matches the label.
double accuracy(const std::vector<Matrix>& weights, const Dataset& data);

// Projected SGD inside the box |W - W_init| <= eps (entrywise).  Each step
// takes a gradient step on the offset from the snapshot and clamps the
// offset back into the box before the weights are rewritten, so the box
// invariant holds exactly after every step.  eps = 0 returns the snapshot
// untouched; eps = +infinity is plain SGD.  Throws on non-finite loss.
// `observer`, when set, is called after every step with the current weights.
DenseNet pgd_train(const DenseNet& net, const Dataset& train, const TrainConfig& cfg,
                   const std::function<void(int step, const std::vector<Matrix>&)>& observer =
                       nullptr);

// Score-based mask search over a frozen network.  Per layer, scores start at
// Unif[-1, 1] / sqrt(fan_in); the forward pass keeps the round((1-sparsity) *
// count) weights of largest |score| per layer; score gradients flow straight
// through the mask: gradient of the masked weight, times the frozen weight
// value, times sign(score) -- the last factor because selection is by |score|.
struct PruneOutcome {
    std::vector<Matrix> masks;
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
};

PruneOutcome edge_popup(const DenseNet& frozen, const Dataset& train, const Dataset& test,
                        double sparsity, const PruneConfig& cfg);

// Builds the top-|score| mask for one layer; keep = round((1-sparsity)*count).
Matrix topk_mask(const Matrix& scores, double sparsity);

// Full eps x sparsity grid: one PGD run per eps (training seed
// mix_seed(master, eps_index, train-stream)), one edge-popup run per cell
// (seed mix_seed(master, eps_index, s_index)).  Cell failures are recorded,
// not rethrown.
struct SweepRow {
    double eps = 0.0;
    double sparsity = 0.0;
    double train_acc = 0.0;
    double test_acc = 0.0;
    std::uint64_t seed = 0;
    bool ok = false;
};

struct BestRow {
    double eps = 0.0;
    double best_test_acc = 0.0;
    double optimal_sparsity = 0.0;  // argmax over the sparsity grid; ties -> smaller
};

struct SweepResult {
    std::vector<SweepRow> rows;           // eps-major, sparsity-minor order
    std::vector<BestRow> best_per_eps;
};

SweepResult sweep(const std::vector<double>& eps_grid, const std::vector<double>& sparsity_grid,
                  const std::vector<std::size_t>& dims, const TrainConfig& train_cfg,
                  const PruneConfig& prune_cfg, const Dataset& train, const Dataset& test,
                  std::uint64_t master_seed, int workers = 0);

}  // namespace plth
