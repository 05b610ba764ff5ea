#pragma once

#include <cstdint>
#include <vector>

#include "plth/matrix.hpp"

namespace plth {

// Bias-free ReLU network: layer l maps R^{dims[l]} -> R^{dims[l+1]} via
// weights[l], with ReLU after every layer except the last.
struct Mlp {
    std::vector<std::size_t> dims;   // L+1 entries
    std::vector<Matrix> weights;     // L entries; weights[l] is dims[l+1] x dims[l]

    std::size_t depth() const { return weights.size(); }
};

// Checks structural consistency of dims vs weight shapes; throws on mismatch.
void check_shapes(const Mlp& net);

// Largest singular value by power iteration on M^T M; deterministic
// (fixed seeded start vector).
double spectral_norm(const Matrix& m, int iters = 200, double tol = 1e-8);

struct LayerNorms {
    double spectral = 0.0;
    double max_abs = 0.0;
    bool spectral_ok = false;  // <= 1 (+1e-9)
    bool max_abs_ok = false;   // <= 1/2 (+1e-12)
};

struct TargetReport {
    std::vector<LayerNorms> layers;
    bool pass = false;
};

// Verifies every layer has spectral norm <= 1 and entries in [-1/2, 1/2].
TargetReport validate_target(const Mlp& net);

// Forward pass; x must have dims.front() entries.
std::vector<double> forward(const Mlp& net, const std::vector<double>& x);

// Random target generator used by experiments: entries Unif[-a, a] with the
// matrix rescaled when needed so the spectral norm stays below 1.
Mlp random_target(const std::vector<std::size_t>& dims, std::uint64_t seed);

// Overparameterized twin-layer pool.  For each target layer l the pool holds
// a pair: an inner sign layer (hidden x dims[l]) whose top half rows are all
// +1 and bottom half all -1, and an outer mixing layer (dims[l+1] x hidden)
// with entries Unif[-1, 1].  The hidden width is d_in * block_units[l], with
// block_units[l] even: each input coordinate owns block_units[l]/2 rows of
// either sign half.
struct CandidateNet {
    std::vector<std::size_t> target_dims;   // L+1 entries (the shape it can imitate)
    std::vector<std::size_t> hidden_dims;   // L entries, hidden width per pair
    std::vector<std::size_t> block_units;   // L entries, units owned per input coord
    std::vector<double> width_real;         // L entries, pre-rounding k1+k2
    std::vector<Matrix> weights;            // 2L entries: inner, outer, inner, outer...

    std::size_t pairs() const { return hidden_dims.size(); }
    const Matrix& inner(std::size_t l) const { return weights[2 * l]; }
    const Matrix& outer(std::size_t l) const { return weights[2 * l + 1]; }
};

// Dense forward through the candidate pool (no masking, no perturbation).
std::vector<double> forward(const CandidateNet& net, const std::vector<double>& x);

// A candidate pool with a binary mask and a perturbation per weight.
// Effective weight = mask * (weight + perturbation).  Inner (sign) layers
// always carry zero perturbation; outer perturbations are capped by eps.
struct PrunedPerturbedNet {
    CandidateNet base;
    std::vector<Matrix> masks;           // 2L entries of {0,1}
    std::vector<Matrix> perturbations;   // 2L entries
    double eps = 0.0;
};

std::vector<double> forward(const PrunedPerturbedNet& net, const std::vector<double>& x);

// Consistency checks: shapes line up, masks are 0/1, perturbations vanish on
// masked-out weights and on sign layers, |perturbation| <= eps.  Throws.
void check_feasible(const PrunedPerturbedNet& net);

}  // namespace plth
