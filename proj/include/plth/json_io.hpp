#pragma once

#include <json.hpp>

#include "plth/interval_union.hpp"
#include "plth/mlp.hpp"

namespace plth {

using nlohmann::json;

// IntervalUnion <-> [[lo, hi], ...]
inline void to_json(json& j, const IntervalUnion& u) {
    j = json::array();
    for (const Interval& iv : u.parts()) j.push_back(json::array({iv.lo, iv.hi}));
}

inline void from_json(const json& j, IntervalUnion& u) {
    std::vector<Interval> parts;
    for (const auto& pair : j) {
        if (!pair.is_array() || pair.size() != 2)
            throw std::invalid_argument("interval union: expected [lo, hi] pairs");
        parts.push_back({pair[0].get<double>(), pair[1].get<double>()});
    }
    u = IntervalUnion(std::move(parts));
}

inline void to_json(json& j, const Matrix& m) {
    j = json{{"rows", m.rows}, {"cols", m.cols}, {"data", m.a}};
}

inline void from_json(const json& j, Matrix& m) {
    m.rows = j.at("rows").get<std::size_t>();
    m.cols = j.at("cols").get<std::size_t>();
    m.a = j.at("data").get<std::vector<double>>();
    if (m.a.size() != m.rows * m.cols)
        throw std::invalid_argument("matrix: data length does not match rows*cols");
}

inline void to_json(json& j, const Mlp& net) {
    j = json{{"dims", net.dims}, {"weights", net.weights}};
}

inline void from_json(const json& j, Mlp& net) {
    net.dims = j.at("dims").get<std::vector<std::size_t>>();
    net.weights = j.at("weights").get<std::vector<Matrix>>();
    check_shapes(net);
}

inline void to_json(json& j, const CandidateNet& net) {
    j = json{{"target_dims", net.target_dims},
             {"hidden_dims", net.hidden_dims},
             {"block_units", net.block_units},
             {"width_real", net.width_real},
             {"weights", net.weights}};
}

inline void from_json(const json& j, CandidateNet& net) {
    net.target_dims = j.at("target_dims").get<std::vector<std::size_t>>();
    net.hidden_dims = j.at("hidden_dims").get<std::vector<std::size_t>>();
    net.block_units = j.at("block_units").get<std::vector<std::size_t>>();
    net.width_real = j.at("width_real").get<std::vector<double>>();
    net.weights = j.at("weights").get<std::vector<Matrix>>();
}

inline void to_json(json& j, const PrunedPerturbedNet& net) {
    j = json{{"base", net.base},
             {"masks", net.masks},
             {"perturbations", net.perturbations},
             {"eps", net.eps}};
}

inline void from_json(const json& j, PrunedPerturbedNet& net) {
    net.base = j.at("base").get<CandidateNet>();
    net.masks = j.at("masks").get<std::vector<Matrix>>();
    net.perturbations = j.at("perturbations").get<std::vector<Matrix>>();
    net.eps = j.at("eps").get<double>();
    check_feasible(net);
}

}  // namespace plth
