#include "plth/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <vector>

#include "plth/construct.hpp"
#include "plth/csv.hpp"
#include "plth/dataset.hpp"
#include "plth/json_io.hpp"
#include "plth/parallel.hpp"
#include "plth/rng.hpp"
#include "plth/subset_sum.hpp"
#include "plth/theory.hpp"
#include "plth/train.hpp"

namespace plth {

namespace {

using nlohmann::json;

// ---- config plumbing -------------------------------------------------------

void check_keys(const json& obj, const std::string& path,
                const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError(path + ": expected an object");
    for (const auto& item : obj.items())
        if (!allowed.count(item.key()))
            throw ConfigError(path + "." + item.key() + ": unknown field");
}

const json* find(const json& obj, const std::string& key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double get_number(const json& obj, const std::string& path, const std::string& key,
                  double fallback) {
    const json* v = find(obj, key);
    if (!v) return fallback;
    if (!v->is_number()) throw ConfigError(path + "." + key + ": expected a number");
    return v->get<double>();
}

long get_integer(const json& obj, const std::string& path, const std::string& key,
                 long fallback) {
    const json* v = find(obj, key);
    if (!v) return fallback;
    if (!v->is_number_integer()) throw ConfigError(path + "." + key + ": expected an integer");
    return v->get<long>();
}

bool get_bool(const json& obj, const std::string& path, const std::string& key, bool fallback) {
    const json* v = find(obj, key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw ConfigError(path + "." + key + ": expected a boolean");
    return v->get<bool>();
}

std::string get_string(const json& obj, const std::string& path, const std::string& key,
                       const std::string& fallback) {
    const json* v = find(obj, key);
    if (!v) return fallback;
    if (!v->is_string()) throw ConfigError(path + "." + key + ": expected a string");
    return v->get<std::string>();
}

std::vector<double> get_number_list(const json& obj, const std::string& path,
                                    const std::string& key, std::vector<double> fallback) {
    const json* v = find(obj, key);
    if (!v) return fallback;
    if (!v->is_array() || v->empty())
        throw ConfigError(path + "." + key + ": expected a nonempty array of numbers");
    std::vector<double> out;
    for (const auto& e : *v) {
        if (!e.is_number()) throw ConfigError(path + "." + key + ": expected numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

std::vector<std::size_t> get_dims(const json& obj, const std::string& path,
                                  const std::string& key, std::vector<std::size_t> fallback) {
    const json* v = find(obj, key);
    if (!v) return fallback;
    if (!v->is_array() || v->empty())
        throw ConfigError(path + "." + key + ": expected a nonempty array of integers");
    std::vector<std::size_t> out;
    for (const auto& e : *v) {
        if (!e.is_number_integer() || e.get<long>() < 1)
            throw ConfigError(path + "." + key + ": expected positive integers");
        out.push_back(e.get<std::size_t>());
    }
    return out;
}

void check_schema_version(const json& cfg, const std::string& path) {
    long v = get_integer(cfg, path, "schema_version", 1);
    if (v != 1)
        throw ConfigError(path + ".schema_version: unsupported version " + std::to_string(v) +
                          " (this build understands version 1)");
}

std::uint64_t resolve_seed(const json& cfg, const std::string& path, const RunOptions& opts) {
    if (opts.seed_override) return *opts.seed_override;
    long s = get_integer(cfg, path, "seed", 1);
    if (s < 0) throw ConfigError(path + ".seed: must be >= 0");
    return static_cast<std::uint64_t>(s);
}

std::filesystem::path prepare_out_dir(const RunOptions& opts) {
    std::filesystem::path dir(opts.out_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

void write_sidecar(const std::filesystem::path& dir, const json& resolved) {
    std::ofstream out(dir / "resolved_config.json");
    if (!out) throw std::runtime_error((dir / "resolved_config.json").string() +
                                       ": cannot open for writing");
    out << resolved.dump(2) << "\n";
}

// ---- subsetsum --------------------------------------------------------------

constexpr std::uint64_t kTargetStream = 99991;

}  // namespace

int run_subsetsum(const json& cfg, const RunOptions& opts) {
    const std::string path = "subsetsum";
    check_keys(cfg, path, {"schema_version", "eta_grid", "ratio_grid", "trials",
                           "successes_required", "n_max", "targets", "n_targets", "seed"});
    check_schema_version(cfg, path);
    std::vector<double> eta_grid = get_number_list(cfg, path, "eta_grid", {1e-2, 1e-3});
    std::vector<double> ratio_grid =
        get_number_list(cfg, path, "ratio_grid", {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    long trials = get_integer(cfg, path, "trials", 10);
    long successes_required = get_integer(cfg, path, "successes_required", 8);
    long n_max = get_integer(cfg, path, "n_max", 400);
    std::uint64_t seed = resolve_seed(cfg, path, opts);
    for (double eta : eta_grid)
        if (!(eta > 0.0)) throw ConfigError(path + ".eta_grid: entries must be > 0");
    for (double r : ratio_grid)
        if (!(r >= 0.0)) throw ConfigError(path + ".ratio_grid: entries must be >= 0");

    std::vector<double> targets;
    if (find(cfg, "targets")) {
        if (find(cfg, "n_targets"))
            throw ConfigError(path + ": give either targets or n_targets, not both");
        targets = get_number_list(cfg, path, "targets", {});
        for (double z : targets)
            if (std::abs(z) > 0.5)
                throw ConfigError(path + ".targets: entries must lie in [-1/2, 1/2]");
    } else {
        long n_targets = get_integer(cfg, path, "n_targets", 16);
        if (n_targets < 1) throw ConfigError(path + ".n_targets: must be >= 1");
        Rng rng(mix_seed(seed, kTargetStream));
        for (long i = 0; i < n_targets; ++i) targets.push_back(rng.uniform(-0.5, 0.5));
    }

    auto dir = prepare_out_dir(opts);
    json resolved{{"schema_version", 1},          {"eta_grid", eta_grid},
                  {"ratio_grid", ratio_grid},     {"trials", trials},
                  {"successes_required", successes_required},
                  {"n_max", n_max},               {"targets", targets},
                  {"seed", seed}};
    write_sidecar(dir, resolved);

    CsvWriter csv((dir / "subsetsum.csv").string(),
                  {"eta", "eps", "eps_over_eta", "seed", "min_n", "monotone_ok"});
    int violations = 0;
    for (double eta : eta_grid) {
        int prev_min_n = -1;
        for (double ratio : ratio_grid) {
            MinNResult res = min_n_search(eta, ratio * eta, targets, static_cast<int>(trials),
                                          static_cast<int>(successes_required), seed,
                                          static_cast<int>(n_max), opts.workers);
            bool monotone_ok = prev_min_n < 0 || res.min_n <= prev_min_n;
            if (!monotone_ok) ++violations;
            csv.add(eta).add(res.eps).add(ratio).add(static_cast<unsigned long long>(seed))
                .add(res.min_n).add(monotone_ok ? 1 : 0).end_row();
            prev_min_n = res.min_n;
        }
    }
    if (opts.assert_invariants && violations > 0) {
        std::cerr << "subsetsum: " << violations << " monotonicity violations\n";
        return 3;
    }
    return 0;
}

// ---- theory -----------------------------------------------------------------

namespace {

// A two-component window subset with the requested measure, used to spot-check
// the expected-growth identity away from the single-interval special case.
// Components hug the window edges so the middle gap (length 1-p) stays free.
IntervalUnion growth_state_set(double p) {
    if (!(p > 0.02 && p <= 0.9))
        throw ConfigError("theory.growth.p_grid: entries must be in (0.02, 0.9]");
    return IntervalUnion({{-0.5, -0.5 + 0.4 * p}, {0.5 - 0.6 * p, 0.5}});
}

struct TrajectoryViolations {
    long monotone = 0;
    long step_cap = 0;
    long z_range = 0;
    long psi_gain = 0;
    long domination = 0;

    long total() const { return monotone + step_cap + z_range + psi_gain + domination; }
};

void scan_trajectory(const TrajectoryRecord& rec, TrajectoryViolations& v) {
    double eps = rec.eps;
    std::size_t n = rec.x.size();
    for (std::size_t k = 0; k + 1 <= n; ++k) {
        double p = rec.p_tilde[k];
        double p_next = rec.p_tilde[k + 1];
        if (p_next < p - 1e-12) ++v.monotone;
        if (p_next > std::min(1.0, 2.0 * p + eps) + 1e-9) ++v.step_cap;
        double z = rec.z_increment[k];
        if (!std::isnan(z)) {
            if (z < -1e-9 || z > 2.0 / (1.0 + eps) + 1e-9) ++v.z_range;
            if (p >= 0.25 && p < 1.0 - 1e-6 &&
                rec.psi[k + 1] - rec.psi[k] < z - 1e-9)
                ++v.psi_gain;
        }
        if (!std::isnan(rec.p_exact[k]) && rec.p_tilde[k] > rec.p_exact[k] + 1e-9)
            ++v.domination;
    }
    if (!rec.p_exact.empty() && !std::isnan(rec.p_exact[n]) &&
        rec.p_tilde[n] > rec.p_exact[n] + 1e-9)
        ++v.domination;
}

}  // namespace

int run_theory(const json& cfg, const RunOptions& opts) {
    const std::string path = "theory";
    check_keys(cfg, path, {"schema_version", "eta", "eps_grid", "n_seeds", "n_steps",
                           "exact_up_to", "growth", "seed"});
    check_schema_version(cfg, path);
    double eta = get_number(cfg, path, "eta", 1e-3);
    std::vector<double> eps_grid = get_number_list(cfg, path, "eps_grid", {0.0, 0.01, 0.1});
    long n_seeds = get_integer(cfg, path, "n_seeds", 50);
    long n_steps = get_integer(cfg, path, "n_steps", 80);
    long exact_up_to = get_integer(cfg, path, "exact_up_to", 20);
    std::uint64_t seed = resolve_seed(cfg, path, opts);
    if (!(eta > 0.0) || !(eta < 0.5)) throw ConfigError(path + ".eta: must be in (0, 1/2)");
    if (n_seeds < 1) throw ConfigError(path + ".n_seeds: must be >= 1");
    if (n_steps < 1) throw ConfigError(path + ".n_steps: must be >= 1");
    if (exact_up_to < 0 || exact_up_to > 24)
        throw ConfigError(path + ".exact_up_to: must be in [0, 24]");
    for (double eps : eps_grid)
        if (!(eps >= 0.0)) throw ConfigError(path + ".eps_grid: entries must be >= 0");

    json growth = cfg.contains("growth") ? cfg.at("growth") : json::object();
    check_keys(growth, path + ".growth", {"p_grid", "eps_grid", "draws"});
    std::vector<double> growth_p = get_number_list(growth, path + ".growth", "p_grid",
                                                   {0.1, 0.3, 0.6, 0.9});
    std::vector<double> growth_eps = get_number_list(growth, path + ".growth", "eps_grid",
                                                     {0.0, 0.05, 0.2});
    long growth_draws = get_integer(growth, path + ".growth", "draws", 100000);
    if (growth_draws < 2) throw ConfigError(path + ".growth.draws: must be >= 2");

    auto dir = prepare_out_dir(opts);
    json resolved{{"schema_version", 1},
                  {"eta", eta},
                  {"eps_grid", eps_grid},
                  {"n_seeds", n_seeds},
                  {"n_steps", n_steps},
                  {"exact_up_to", exact_up_to},
                  {"growth", {{"p_grid", growth_p}, {"eps_grid", growth_eps},
                              {"draws", growth_draws}}},
                  {"seed", seed}};
    write_sidecar(dir, resolved);

    // Trajectories: all (eps, replicate) cells in parallel, merged in order.
    std::size_t n_cells = eps_grid.size() * static_cast<std::size_t>(n_seeds);
    std::vector<TrajectoryRecord> records(n_cells);
    parallel_for(n_cells, opts.workers, [&](std::size_t idx) {
        std::size_t e = idx / n_seeds;
        std::size_t r = idx % n_seeds;
        records[idx] = simulate_trajectory(eta, eps_grid[e], static_cast<int>(n_steps),
                                           mix_seed(seed, e, r),
                                           static_cast<int>(exact_up_to));
    });

    CsvWriter traj((dir / "trajectories.csv").string(),
                   {"eps", "seed", "k", "p_tilde", "p_exact", "z_increment", "psi"});
    TrajectoryViolations violations;
    for (const TrajectoryRecord& rec : records) {
        scan_trajectory(rec, violations);
        for (std::size_t k = 0; k < rec.p_tilde.size(); ++k) {
            traj.add(rec.eps).add(static_cast<unsigned long long>(rec.seed)).add(k)
                .add(rec.p_tilde[k])
                .add(rec.p_exact[k])
                .add(k == 0 ? std::numeric_limits<double>::quiet_NaN() : rec.z_increment[k - 1])
                .add(rec.psi[k])
                .end_row();
        }
    }

    CsvWriter growth_csv((dir / "expectation.csv").string(),
                         {"p_tilde", "eps", "empirical_mean", "predicted", "std_err",
                          "dev_over_se", "within_three_se"});
    long growth_failures = 0;
    for (std::size_t pi = 0; pi < growth_p.size(); ++pi)
        for (std::size_t ei = 0; ei < growth_eps.size(); ++ei) {
            SurrogateState state;
            state.k = 0;
            state.eta = eta;
            state.eps = growth_eps[ei];
            state.fhat = growth_state_set(growth_p[pi]);
            state.extension = epsilon_extension(state.fhat, state.eps);
            state.p_tilde = state.fhat.measure();
            GrowthCheck gc = expected_growth_check(state, static_cast<int>(growth_draws),
                                                   mix_seed(seed, pi, ei, 7));
            if (!gc.within_three_se) ++growth_failures;
            double dev_over_se = std::abs(gc.empirical_mean - gc.predicted) / gc.std_err;
            growth_csv.add(state.p_tilde).add(state.eps).add(gc.empirical_mean)
                .add(gc.predicted).add(gc.std_err).add(dev_over_se)
                .add(gc.within_three_se ? 1 : 0).end_row();
        }

    CsvWriter summary((dir / "summary.csv").string(), {"check", "violations"});
    summary.add(std::string("monotone")).add(violations.monotone).end_row();
    summary.add(std::string("step_cap")).add(violations.step_cap).end_row();
    summary.add(std::string("z_range")).add(violations.z_range).end_row();
    summary.add(std::string("psi_gain")).add(violations.psi_gain).end_row();
    summary.add(std::string("domination")).add(violations.domination).end_row();
    summary.add(std::string("growth_cells_failed")).add(growth_failures).end_row();

    if (opts.assert_invariants && violations.total() > 0) {
        std::cerr << "theory: " << violations.total() << " trajectory invariant violations\n";
        return 3;
    }
    return 0;
}

// ---- construct --------------------------------------------------------------

int run_construct(const json& cfg, const RunOptions& opts) {
    const std::string path = "construct";
    check_keys(cfg, path, {"schema_version", "target_dims", "target_seed", "eta_grid",
                           "eps_grid", "c1", "c2", "samples", "seed"});
    check_schema_version(cfg, path);
    std::vector<std::size_t> target_dims = get_dims(cfg, path, "target_dims", {4, 8, 3});
    if (target_dims.size() < 2) throw ConfigError(path + ".target_dims: need at least two dims");
    long target_seed = get_integer(cfg, path, "target_seed", 7);
    std::vector<double> eta_grid = get_number_list(cfg, path, "eta_grid", {0.05});
    std::vector<double> eps_grid = get_number_list(cfg, path, "eps_grid", {0.0, 0.05});
    double c1 = get_number(cfg, path, "c1", 1.0);
    double c2 = get_number(cfg, path, "c2", 1.0);
    long samples = get_integer(cfg, path, "samples", 10000);
    std::uint64_t seed = resolve_seed(cfg, path, opts);
    for (double eta : eta_grid)
        if (!(eta > 0.0) || !(eta < 1.0))
            throw ConfigError(path + ".eta_grid: entries must be in (0, 1)");
    for (double eps : eps_grid)
        if (!(eps >= 0.0)) throw ConfigError(path + ".eps_grid: entries must be >= 0");
    if (samples < 1) throw ConfigError(path + ".samples: must be >= 1");

    auto dir = prepare_out_dir(opts);
    json resolved{{"schema_version", 1}, {"target_dims", target_dims},
                  {"target_seed", target_seed}, {"eta_grid", eta_grid},
                  {"eps_grid", eps_grid}, {"c1", c1}, {"c2", c2},
                  {"samples", samples}, {"seed", seed}};
    write_sidecar(dir, resolved);

    Mlp target = random_target(target_dims, static_cast<std::uint64_t>(target_seed));
    TargetReport treport = validate_target(target);
    {
        json tj;
        to_json(tj, target);
        json norms = json::array();
        for (const LayerNorms& ln : treport.layers)
            norms.push_back({{"spectral", ln.spectral}, {"max_abs", ln.max_abs}});
        tj["norms"] = norms;
        tj["pass"] = treport.pass;
        std::ofstream out(dir / "target.json");
        out << tj.dump(2) << "\n";
    }
    if (!treport.pass)
        throw std::runtime_error("construct: generated target violates its norm caps");

    CsvWriter layers_csv((dir / "construct.csv").string(),
                         {"eta", "eps", "seed", "pair", "hidden_width", "block_units",
                          "width_real", "entry_budget", "max_entry_error", "sum_entry_error",
                          "layer_pass"});
    CsvWriter summary_csv((dir / "construct_summary.csv").string(),
                          {"eta", "eps", "seed", "total_hidden", "sup_err", "mean_err",
                           "all_layers_pass"});
    int violations = 0;
    for (std::size_t yi = 0; yi < eta_grid.size(); ++yi)
        for (std::size_t ei = 0; ei < eps_grid.size(); ++ei) {
            double eta = eta_grid[yi];
            double eps = eps_grid[ei];
            auto log_fn = [](const std::string& line) { std::cerr << "construct: " << line << "\n"; };
            CandidateNet cand = init_candidate(target_dims, eta, eps, c1, c2,
                                               mix_seed(seed, yi, ei), log_fn);
            NetworkApprox approx = approximate_network(target, cand, eps, eta, opts.workers);
            SupError sup = measure_sup_error(target, approx.net, static_cast<int>(samples),
                                             mix_seed(seed, yi, ei, 1));
            std::size_t total_hidden = 0;
            for (std::size_t l = 0; l < cand.pairs(); ++l) {
                total_hidden += cand.hidden_dims[l];
                const LayerReport& rep = approx.layers[l];
                layers_csv.add(eta).add(eps).add(static_cast<unsigned long long>(seed)).add(l)
                    .add(cand.hidden_dims[l]).add(cand.block_units[l]).add(cand.width_real[l])
                    .add(rep.entry_budget).add(rep.max_entry_error).add(rep.sum_entry_error)
                    .add(rep.pass ? 1 : 0).end_row();
            }
            summary_csv.add(eta).add(eps).add(static_cast<unsigned long long>(seed))
                .add(total_hidden).add(sup.sup_err).add(sup.mean_err)
                .add(approx.all_pass ? 1 : 0).end_row();
            if (!approx.all_pass || !(sup.sup_err <= eta)) ++violations;

            json net_json;
            to_json(net_json, approx.net);
            char name[64];
            std::snprintf(name, sizeof name, "net_eta%zu_eps%zu.json", yi, ei);
            std::ofstream out(dir / name);
            out << net_json.dump() << "\n";
        }

    if (opts.assert_invariants && violations > 0) {
        std::cerr << "construct: " << violations << " cells missed their certificates\n";
        return 3;
    }
    return 0;
}

// ---- train ------------------------------------------------------------------

namespace {

Dataset load_mnist_split(const std::string& data_dir, bool train_split, long subset,
                         const std::string& path) {
    std::string stem = train_split ? "train" : "t10k";
    Dataset ds = mnist_load(data_dir + "/" + stem + "-images-idx3-ubyte",
                            data_dir + "/" + stem + "-labels-idx1-ubyte");
    if (subset > 0 && static_cast<std::size_t>(subset) < ds.size()) {
        ds.xs.resize(static_cast<std::size_t>(subset) * ds.dim);
        ds.ys.resize(static_cast<std::size_t>(subset));
    }
    (void)path;
    return ds;
}

}  // namespace

int run_train(const json& cfg, const RunOptions& opts) {
    const std::string path = "train";
    check_keys(cfg, path, {"schema_version", "dataset", "data_dir", "mnist_subset", "synthetic",
                           "hidden_dims", "eps_grid", "sparsity_grid", "train", "prune",
                           "seeds", "seed", "data_seed"});
    check_schema_version(cfg, path);
    std::string dataset_kind = get_string(cfg, path, "dataset", "synthetic");
    if (dataset_kind != "synthetic" && dataset_kind != "mnist")
        throw ConfigError(path + ".dataset: expected \"synthetic\" or \"mnist\"");
    std::vector<std::size_t> hidden_dims = get_dims(cfg, path, "hidden_dims", {128, 128});
    std::vector<double> eps_grid = get_number_list(cfg, path, "eps_grid",
                                                   {0.0, 0.05, 0.1, 0.2, 0.4});
    std::vector<double> sparsity_grid = get_number_list(
        cfg, path, "sparsity_grid", {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9});
    for (double eps : eps_grid)
        if (!(eps >= 0.0)) throw ConfigError(path + ".eps_grid: entries must be >= 0");
    for (double s : sparsity_grid)
        if (!(s >= 0.0) || !(s < 1.0))
            throw ConfigError(path + ".sparsity_grid: entries must be in [0, 1)");
    long data_seed = get_integer(cfg, path, "data_seed", 12345);

    json train_obj = cfg.contains("train") ? cfg.at("train") : json::object();
    check_keys(train_obj, path + ".train", {"lr", "epochs", "batch_size"});
    TrainConfig train_cfg;
    train_cfg.lr = get_number(train_obj, path + ".train", "lr", 0.03);
    train_cfg.epochs = static_cast<int>(get_integer(train_obj, path + ".train", "epochs", 5));
    train_cfg.batch_size =
        static_cast<int>(get_integer(train_obj, path + ".train", "batch_size", 128));

    json prune_obj = cfg.contains("prune") ? cfg.at("prune") : json::object();
    check_keys(prune_obj, path + ".prune", {"lr", "epochs", "batch_size", "cosine_annealing"});
    PruneConfig prune_cfg;
    prune_cfg.lr = get_number(prune_obj, path + ".prune", "lr", 0.1);
    prune_cfg.epochs = static_cast<int>(get_integer(prune_obj, path + ".prune", "epochs", 10));
    prune_cfg.batch_size =
        static_cast<int>(get_integer(prune_obj, path + ".prune", "batch_size", 128));
    prune_cfg.cosine_annealing = get_bool(prune_obj, path + ".prune", "cosine_annealing", true);
    prune_cfg.sparsity_levels = sparsity_grid;

    std::vector<double> seeds_raw = get_number_list(cfg, path, "seeds", {1, 2, 3});
    std::vector<std::uint64_t> seeds;
    for (double s : seeds_raw) {
        if (s < 0 || s != std::floor(s)) throw ConfigError(path + ".seeds: must be integers >= 0");
        seeds.push_back(static_cast<std::uint64_t>(s));
    }
    if (opts.seed_override) seeds = {*opts.seed_override};

    Dataset train_data, test_data;
    if (dataset_kind == "synthetic") {
        json syn = cfg.contains("synthetic") ? cfg.at("synthetic") : json::object();
        check_keys(syn, path + ".synthetic",
                   {"classes", "dim", "train_per_class", "test_per_class"});
        long classes = get_integer(syn, path + ".synthetic", "classes", 10);
        long dim = get_integer(syn, path + ".synthetic", "dim", 16);
        long train_per_class = get_integer(syn, path + ".synthetic", "train_per_class", 1000);
        long test_per_class = get_integer(syn, path + ".synthetic", "test_per_class", 200);
        if (classes < 2) throw ConfigError(path + ".synthetic.classes: must be >= 2");
        if (dim < 1) throw ConfigError(path + ".synthetic.dim: must be >= 1");
        if (train_per_class < 1 || test_per_class < 1)
            throw ConfigError(path + ".synthetic: per-class counts must be >= 1");
        train_data = synthetic_dataset(static_cast<int>(classes), static_cast<std::size_t>(dim),
                                       static_cast<int>(train_per_class),
                                       mix_seed(static_cast<std::uint64_t>(data_seed), 0));
        test_data = synthetic_dataset(static_cast<int>(classes), static_cast<std::size_t>(dim),
                                      static_cast<int>(test_per_class),
                                      mix_seed(static_cast<std::uint64_t>(data_seed), 1));
    } else {
        std::string data_dir = get_string(cfg, path, "data_dir", "");
        if (data_dir.empty()) {
            const char* env = std::getenv("PERTURB_LTH_DATA");
            if (!env || !*env)
                throw ConfigError(path + ".data_dir: not set and PERTURB_LTH_DATA is undefined");
            data_dir = env;
        }
        long subset = get_integer(cfg, path, "mnist_subset", 10000);
        train_data = load_mnist_split(data_dir, true, subset, path);
        test_data = load_mnist_split(data_dir, false, 0, path);
    }

    std::vector<std::size_t> dims;
    dims.push_back(train_data.dim);
    for (std::size_t h : hidden_dims) dims.push_back(h);
    dims.push_back(static_cast<std::size_t>(train_data.classes));

    auto dir = prepare_out_dir(opts);
    json resolved{{"schema_version", 1},
                  {"dataset", dataset_kind},
                  {"hidden_dims", hidden_dims},
                  {"eps_grid", eps_grid},
                  {"sparsity_grid", sparsity_grid},
                  {"train", {{"lr", train_cfg.lr}, {"epochs", train_cfg.epochs},
                             {"batch_size", train_cfg.batch_size}}},
                  {"prune", {{"lr", prune_cfg.lr}, {"epochs", prune_cfg.epochs},
                             {"batch_size", prune_cfg.batch_size},
                             {"cosine_annealing", prune_cfg.cosine_annealing}}},
                  {"seeds", seeds},
                  {"data_seed", data_seed},
                  {"dims", dims}};
    write_sidecar(dir, resolved);

    CsvWriter rows_csv((dir / "train.csv").string(),
                       {"eps", "sparsity", "train_acc", "test_acc", "epochs", "seed"});
    CsvWriter best_csv((dir / "train_best.csv").string(),
                       {"eps", "seed", "best_test_acc", "optimal_sparsity"});
    bool any_ok = false;
    for (std::uint64_t replicate : seeds) {
        SweepResult res = sweep(eps_grid, sparsity_grid, dims, train_cfg, prune_cfg, train_data,
                                test_data, replicate, opts.workers);
        for (const SweepRow& row : res.rows) {
            rows_csv.add(row.eps).add(row.sparsity)
                .add(row.ok ? row.train_acc : std::numeric_limits<double>::quiet_NaN())
                .add(row.ok ? row.test_acc : std::numeric_limits<double>::quiet_NaN())
                .add(prune_cfg.epochs).add(static_cast<unsigned long long>(replicate)).end_row();
            any_ok = any_ok || row.ok;
        }
        for (const BestRow& best : res.best_per_eps)
            best_csv.add(best.eps).add(static_cast<unsigned long long>(replicate))
                .add(best.best_test_acc).add(best.optimal_sparsity).end_row();
    }
    if (!any_ok) throw std::runtime_error("train: every sweep cell failed");
    return 0;
}

}  // namespace plth
