#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "plth/mlp.hpp"

namespace plth {

// Builds the overparameterized pool for a target shape.  Per pair l the
// pre-rounding unit count is k1 + k2 with
//   k1 = c1 * d_in * log(d_in * d_out * L / eta) / log(5/4 + eps/2)
//   k2 = c2 * d_in * log(d_in * d_out * L / eta) / (1 + eps)
// rounded up so every input coordinate owns an even number >= 2 of hidden
// units (half per sign).  `log_fn`, when set, receives one line per rounding
// adjustment.
CandidateNet init_candidate(const std::vector<std::size_t>& target_dims, double eta, double eps,
                            double c1, double c2, std::uint64_t seed,
                            const std::function<void(const std::string&)>& log_fn = nullptr);

// Subset-sum approximation of a single scalar weight w out of a pool of 2n
// outer coefficients: v[0..n) multiply sign(+) hidden units and v[n..2n)
// sign(-) units.  The + half is solved toward target w, the - half toward
// -w; `error` is the sum of the two solver errors (an upper bound on the
// worst-case response gap over inputs in [-1, 1], attained at the endpoints).
struct WeightApprox {
    std::vector<std::uint8_t> mask;  // 2n entries
    std::vector<double> y;           // 2n entries
    double error = 0.0;
    double plus_error = 0.0;
    double minus_error = 0.0;
};

WeightApprox approximate_weight(double w, const std::vector<double>& v, double eps, double eta);

// One target layer approximated against a candidate pair.
struct LayerApprox {
    Matrix inner_mask;          // block-diagonal selection of the sign layer
    Matrix outer_mask;
    Matrix outer_perturbation;
    double entry_budget = 0.0;  // eta_layer / (d_in * d_out)
    double max_entry_error = 0.0;
    double sum_entry_error = 0.0;
    bool pass = false;          // every entry within its budget
};

LayerApprox approximate_layer(const Matrix& w, const Matrix& inner_u, const Matrix& outer_u,
                              double eps, double eta_layer, int workers = 0);

// Whole-network construction; per-layer budget is eta / (2 * L).
struct LayerReport {
    double entry_budget = 0.0;
    double max_entry_error = 0.0;
    double sum_entry_error = 0.0;
    bool pass = false;
};

struct NetworkApprox {
    PrunedPerturbedNet net;
    std::vector<LayerReport> layers;
    bool all_pass = false;
};

NetworkApprox approximate_network(const Mlp& target, const CandidateNet& candidate, double eps,
                                  double eta, int workers = 0);

// Largest and mean l2 output gap between target and pruned network over a
// seeded sample of inputs: half the draws sit at hypercube corners (each
// coordinate is +-1), half are uniform in [-1, 1]^d.
struct SupError {
    double sup_err = 0.0;
    double mean_err = 0.0;
};

SupError measure_sup_error(const Mlp& target, const PrunedPerturbedNet& pruned, int samples,
                           std::uint64_t seed);

}  // namespace plth
