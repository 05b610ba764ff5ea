#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace plth {

// Raised for malformed configs: unknown fields, wrong types, bad values.
// The CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct RunOptions {
    std::string out_dir = "out";
    int workers = 0;                          // 0 = hardware default
    bool assert_invariants = false;
    std::optional<std::uint64_t> seed_override;
};

// Each runner validates its config (throwing ConfigError), executes the
// experiment, writes CSV outputs plus a resolved_config.json sidecar into
// out_dir, and returns a process exit code: 0 on success, 3 when
// assert_invariants is set and an invariant was violated.
int run_subsetsum(const nlohmann::json& cfg, const RunOptions& opts);
int run_theory(const nlohmann::json& cfg, const RunOptions& opts);
int run_construct(const nlohmann::json& cfg, const RunOptions& opts);
int run_train(const nlohmann::json& cfg, const RunOptions& opts);

}  // namespace plth
