#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <string>

#include <json.hpp>

#include "wristopt/errors.hpp"
#include "wristopt/nsga2.hpp"

namespace wristopt {

// Self-describing JSON checkpoint written at every generation barrier.
// Doubles round-trip exactly through the JSON layer, and the serialized RNG
// state restores the engine word-for-word, so a resumed run is bit-identical
// to an uninterrupted one.
struct Checkpoint {
    std::uint64_t config_hash = 0;
    std::string subject;
    OptimizationState state;
};

namespace detail_checkpoint {

inline nlohmann::json individual_to_json(const Individual& ind) {
    nlohmann::json j = {{"B_y", ind.gains.B_y},
                        {"K_y", ind.gains.K_y},
                        {"tau_rms", ind.fitness.tau_rms},
                        {"t_total", ind.fitness.t_total},
                        {"feasible", ind.fitness.feasible},
                        {"evaluated", ind.evaluated},
                        {"rank", ind.rank}};
    // boundary individuals carry infinite crowding, which JSON cannot hold
    if (std::isfinite(ind.crowding))
        j["crowding"] = ind.crowding;
    else
        j["crowding"] = nullptr;
    return j;
}

inline Individual individual_from_json(const nlohmann::json& j) {
    Individual ind;
    ind.gains = {j.at("B_y").get<double>(), j.at("K_y").get<double>()};
    ind.fitness = {j.at("tau_rms").get<double>(), j.at("t_total").get<double>(),
                   j.at("feasible").get<bool>()};
    ind.evaluated = j.at("evaluated").get<bool>();
    ind.rank = j.at("rank").get<int>();
    ind.crowding = j.at("crowding").is_null() ? std::numeric_limits<double>::infinity()
                                              : j.at("crowding").get<double>();
    return ind;
}

inline nlohmann::json record_to_json(const GenerationRecord& r) {
    nlohmann::json pop = nlohmann::json::array();
    for (const auto& ind : r.population) pop.push_back(individual_to_json(ind));
    return {{"generation", r.generation},
            {"population", pop},
            {"mean_damping", r.mean_damping},
            {"std_damping", r.std_damping},
            {"mean_stiffness", r.mean_stiffness},
            {"std_stiffness", r.std_stiffness},
            {"mean_tau_rms", r.mean_tau_rms},
            {"std_tau_rms", r.std_tau_rms},
            {"mean_t_total", r.mean_t_total},
            {"std_t_total", r.std_t_total}};
}

inline GenerationRecord record_from_json(const nlohmann::json& j) {
    GenerationRecord r;
    r.generation = j.at("generation").get<int>();
    for (const auto& p : j.at("population")) r.population.push_back(individual_from_json(p));
    r.mean_damping = j.at("mean_damping").get<double>();
    r.std_damping = j.at("std_damping").get<double>();
    r.mean_stiffness = j.at("mean_stiffness").get<double>();
    r.std_stiffness = j.at("std_stiffness").get<double>();
    r.mean_tau_rms = j.at("mean_tau_rms").get<double>();
    r.std_tau_rms = j.at("std_tau_rms").get<double>();
    r.mean_t_total = j.at("mean_t_total").get<double>();
    r.std_t_total = j.at("std_t_total").get<double>();
    return r;
}

} // namespace detail_checkpoint

inline void save_checkpoint(const std::string& path, const Checkpoint& cp) {
    using namespace detail_checkpoint;
    nlohmann::json j;
    j["config_hash"] = cp.config_hash;
    j["subject"] = cp.subject;
    j["generation"] = cp.state.generation;
    j["evaluations"] = cp.state.evaluations;
    j["rng_state"] = cp.state.rng_state;
    nlohmann::json pop = nlohmann::json::array();
    for (const auto& ind : cp.state.population) pop.push_back(individual_to_json(ind));
    j["population"] = pop;
    nlohmann::json recs = nlohmann::json::array();
    for (const auto& r : cp.state.records) recs.push_back(record_to_json(r));
    j["records"] = recs;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out << j.dump(2) << "\n";
}

inline Checkpoint load_checkpoint(const std::string& path) {
    using namespace detail_checkpoint;
    std::ifstream in(path);
    if (!in) throw ParseError("checkpoint file not found: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("checkpoint parse error in " + path + ": " + e.what());
    }
    Checkpoint cp;
    cp.config_hash = j.at("config_hash").get<std::uint64_t>();
    cp.subject = j.at("subject").get<std::string>();
    cp.state.generation = j.at("generation").get<int>();
    cp.state.evaluations = j.at("evaluations").get<std::uint64_t>();
    cp.state.rng_state = j.at("rng_state").get<std::string>();
    for (const auto& p : j.at("population"))
        cp.state.population.push_back(individual_from_json(p));
    for (const auto& r : j.at("records")) cp.state.records.push_back(record_from_json(r));
    return cp;
}

} // namespace wristopt
