#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wristopt/errors.hpp"
#include "wristopt/human.hpp"
#include "wristopt/nsga2.hpp"
#include "wristopt/passivity.hpp"
#include "wristopt/system.hpp"
#include "wristopt/task.hpp"

namespace wristopt {

// Gain pair comparison sets for the Z-width chart family.
struct PositionGainSet {
    double P = 0.0;
    double D = 0.0;
};

struct AnalysisConfig {
    double zwidth_k_min = 1.0;
    double zwidth_k_max = 500.0;
    int zwidth_samples = 100;
    std::vector<PositionGainSet> comparison_gains; // additional P/D sets, <= 3
    std::vector<ImpedanceGains> verdict_gains;     // gain pairs for the verdict table
};

struct ExperimentConfig {
    SystemParams system;
    std::vector<SubjectProfile> subjects;
    TaskSpec task;                // optimization evaluations
    int benchmark_movements = 5;  // flexion+extension pairs for the fixed controller
    OptimizerConfig optimizer;
    double dt = 1e-3;
    std::uint64_t seed = 1;
    std::string output_dir = "runs/out";
    AnalysisConfig analysis;

    ImpedanceGains benchmark = benchmark_gains();
};

inline ExperimentConfig default_experiment_config() {
    ExperimentConfig cfg;
    cfg.subjects = default_subject_profiles();
    cfg.analysis.comparison_gains = {{0.04, 0.5}, {0.02, 0.75}, {0.5, 0.1}};
    cfg.analysis.verdict_gains = {benchmark_gains(), {0.1, 100.0}, {2.0, 5.0}};
    return cfg;
}

namespace detail_config {

inline nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["system"] = {{"J", c.system.J}, {"k_r", c.system.k_r}, {"P", c.system.P}, {"D", c.system.D}};
    nlohmann::json subjects = nlohmann::json::array();
    for (const auto& s : c.subjects)
        subjects.push_back({{"name", s.name},
                            {"K_h", s.model.K_h},
                            {"B_h", s.model.B_h},
                            {"intent_gain", s.model.intent_gain},
                            {"torque_saturation", s.model.torque_saturation},
                            {"reaction_delay", s.model.reaction_delay},
                            {"noise_amplitude", s.model.noise_amplitude}});
    j["human"] = {{"subjects", subjects}};
    j["task"] = {{"amplitude", c.task.amplitude},
                 {"dwell_time", c.task.dwell_time},
                 {"tolerance_band", c.task.tolerance_band},
                 {"movements_per_trial", c.task.movements_per_trial},
                 {"movement_timeout", c.task.movement_timeout},
                 {"benchmark_movements", c.benchmark_movements}};
    j["optimizer"] = {
        {"population_size", c.optimizer.population_size},
        {"generations", c.optimizer.generations},
        {"damping_bounds", {c.optimizer.damping_bounds.lo, c.optimizer.damping_bounds.hi}},
        {"stiffness_bounds", {c.optimizer.stiffness_bounds.lo, c.optimizer.stiffness_bounds.hi}},
        {"constrained", c.optimizer.constrained},
        {"crossover_probability", c.optimizer.crossover_probability},
        {"crossover_eta", c.optimizer.crossover_eta},
        {"mutation_probability", c.optimizer.mutation_probability},
        {"mutation_eta", c.optimizer.mutation_eta},
        {"tournament_size", c.optimizer.tournament_size},
        {"repair", c.optimizer.repair == RepairStrategy::Resample ? "resample" : "project"}};
    j["simulation"] = {{"dt", c.dt}};
    j["benchmark"] = {{"B_y", c.benchmark.B_y}, {"K_y", c.benchmark.K_y}};
    nlohmann::json cmp = nlohmann::json::array();
    for (const auto& g : c.analysis.comparison_gains) cmp.push_back({{"P", g.P}, {"D", g.D}});
    nlohmann::json verdicts = nlohmann::json::array();
    for (const auto& g : c.analysis.verdict_gains)
        verdicts.push_back({{"B_y", g.B_y}, {"K_y", g.K_y}});
    j["analysis"] = {{"zwidth_stiffness_range", {c.analysis.zwidth_k_min, c.analysis.zwidth_k_max}},
                     {"zwidth_samples", c.analysis.zwidth_samples},
                     {"comparison_position_gains", cmp},
                     {"verdict_gains", verdicts}};
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir;
    return j;
}

// Reads j[key] into out when present, recording a violation when the value
// has the wrong type.
template <typename T>
void fetch(const nlohmann::json& j, const std::string& key, T& out,
           std::vector<std::string>& violations, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        violations.push_back(where + "." + key + ": wrong type");
    }
}

inline void fetch_bounds(const nlohmann::json& j, const std::string& key, GeneBounds& out,
                         std::vector<std::string>& violations, const std::string& where) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        violations.push_back(where + "." + key + ": expected [lo, hi]");
        return;
    }
    out.lo = v[0].get<double>();
    out.hi = v[1].get<double>();
}

} // namespace detail_config

// Step-size rule: dt must not exceed a fifth of the fastest admittance-loop
// time constant (2/10 of 1/|Re s|), checked for the benchmark gains and the
// corners of the search box.
inline std::optional<std::string> step_size_violation(const ExperimentConfig& c) {
    std::vector<std::pair<std::string, ImpedanceGains>> probes = {
        {"benchmark", c.benchmark},
        {"bounds corner (lo,lo)", {c.optimizer.damping_bounds.lo, c.optimizer.stiffness_bounds.lo}},
        {"bounds corner (lo,hi)", {c.optimizer.damping_bounds.lo, c.optimizer.stiffness_bounds.hi}},
        {"bounds corner (hi,lo)", {c.optimizer.damping_bounds.hi, c.optimizer.stiffness_bounds.lo}},
        {"bounds corner (hi,hi)", {c.optimizer.damping_bounds.hi, c.optimizer.stiffness_bounds.hi}}};
    for (const auto& [label, gains] : probes) {
        double fastest = 0.0;
        for (const auto& s : impedance_poles(c.system, gains))
            fastest = std::max(fastest, std::abs(s.real()));
        if (fastest <= 0.0) continue;
        const double limit = 2.0 * (1.0 / fastest) / 10.0;
        if (c.dt > limit) {
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "simulation.dt = %g exceeds the step-size rule dt <= 2*tau/10 = %g "
                          "for %s gains",
                          c.dt, limit, label.c_str());
            return std::string(buf);
        }
    }
    return std::nullopt;
}

// Validates every invariant and reports all violations, not just the first.
inline void validate_config(const ExperimentConfig& c) {
    std::vector<std::string> violations;
    auto require = [&](bool ok, const std::string& message) {
        if (!ok) violations.push_back(message);
    };
    require(c.system.J > 0.0, "system.J must be > 0");
    require(c.system.k_r > 0.0, "system.k_r must be > 0");
    require(c.system.P > 0.0, "system.P must be > 0");
    require(c.system.D > 0.0, "system.D must be > 0");
    require(!c.subjects.empty(), "human.subjects must not be empty");
    for (const auto& s : c.subjects) {
        const auto& m = s.model;
        require(m.K_h >= 0.0, "human." + s.name + ".K_h must be >= 0");
        require(m.B_h >= 0.0, "human." + s.name + ".B_h must be >= 0");
        require(m.torque_saturation > 0.0, "human." + s.name + ".torque_saturation must be > 0");
        require(m.reaction_delay >= 0.0, "human." + s.name + ".reaction_delay must be >= 0");
        require(m.noise_amplitude >= 0.0, "human." + s.name + ".noise_amplitude must be >= 0");
    }
    require(c.task.amplitude > 0.0, "task.amplitude must be > 0");
    require(c.task.dwell_time > 0.0, "task.dwell_time must be > 0");
    require(c.task.tolerance_band > 0.0, "task.tolerance_band must be > 0");
    require(c.task.movements_per_trial >= 1, "task.movements_per_trial must be >= 1");
    require(c.task.movement_timeout > c.task.dwell_time,
            "task.movement_timeout must exceed task.dwell_time");
    require(c.benchmark_movements >= 1, "task.benchmark_movements must be >= 1");
    require(c.optimizer.population_size >= 2, "optimizer.population_size must be >= 2");
    require(c.optimizer.generations >= 1, "optimizer.generations must be >= 1");
    require(c.optimizer.damping_bounds.lo > 0.0 &&
                c.optimizer.damping_bounds.lo < c.optimizer.damping_bounds.hi,
            "optimizer.damping_bounds must satisfy 0 < lo < hi");
    require(c.optimizer.stiffness_bounds.lo > 0.0 &&
                c.optimizer.stiffness_bounds.lo < c.optimizer.stiffness_bounds.hi,
            "optimizer.stiffness_bounds must satisfy 0 < lo < hi");
    require(c.optimizer.tournament_size >= 1, "optimizer.tournament_size must be >= 1");
    require(c.dt > 0.0, "simulation.dt must be > 0");
    require(c.benchmark.B_y > 0.0, "benchmark.B_y must be > 0");
    require(c.benchmark.K_y > 0.0, "benchmark.K_y must be > 0");
    require(c.analysis.zwidth_k_min > 0.0 && c.analysis.zwidth_k_min < c.analysis.zwidth_k_max,
            "analysis.zwidth_stiffness_range must satisfy 0 < K_min < K_max");
    require(c.analysis.zwidth_samples >= 2, "analysis.zwidth_samples must be >= 2");
    for (const auto& g : c.analysis.verdict_gains) {
        require(g.B_y > 0.0, "analysis.verdict_gains: B_y must be > 0");
        require(g.K_y > 0.0, "analysis.verdict_gains: K_y must be > 0");
    }

    if (c.system.J > 0 && c.system.k_r > 0 && c.system.P > 0 && c.system.D > 0 &&
        c.benchmark.B_y > 0 && c.benchmark.K_y > 0 && c.dt > 0) {
        if (auto v = step_size_violation(c)) violations.push_back(*v);
    }

    if (!violations.empty())
        throw ValidationError("config validation failed (" + std::to_string(violations.size()) +
                                  " violation(s))",
                              violations);
}

inline ExperimentConfig parse_config(const nlohmann::json& j) {
    using detail_config::fetch;
    using detail_config::fetch_bounds;
    ExperimentConfig c = default_experiment_config();
    std::vector<std::string> violations;

    if (j.contains("system")) {
        const auto& s = j.at("system");
        fetch(s, "J", c.system.J, violations, "system");
        fetch(s, "k_r", c.system.k_r, violations, "system");
        fetch(s, "P", c.system.P, violations, "system");
        fetch(s, "D", c.system.D, violations, "system");
    }
    if (j.contains("human")) {
        const auto& h = j.at("human");
        if (h.contains("subjects")) {
            if (!h.at("subjects").is_array()) {
                violations.push_back("human.subjects: expected an array");
            } else {
                c.subjects.clear();
                for (const auto& s : h.at("subjects")) {
                    SubjectProfile profile;
                    if (s.is_string()) {
                        profile.name = s.get<std::string>();
                        try {
                            profile.model = subject_profile(profile.name);
                        } catch (const std::invalid_argument& e) {
                            violations.push_back(std::string("human.subjects: ") + e.what());
                            continue;
                        }
                    } else if (s.is_object()) {
                        fetch(s, "name", profile.name, violations, "human.subject");
                        if (!s.contains("name")) {
                            violations.push_back("human.subjects: entry without a name");
                            continue;
                        }
                        // named profile as the base when it exists, overridden field-wise
                        try {
                            profile.model = subject_profile(profile.name);
                        } catch (const std::invalid_argument&) {
                            profile.model = HumanModel{};
                        }
                        fetch(s, "K_h", profile.model.K_h, violations, "human.subject");
                        fetch(s, "B_h", profile.model.B_h, violations, "human.subject");
                        fetch(s, "intent_gain", profile.model.intent_gain, violations,
                              "human.subject");
                        fetch(s, "torque_saturation", profile.model.torque_saturation, violations,
                              "human.subject");
                        fetch(s, "reaction_delay", profile.model.reaction_delay, violations,
                              "human.subject");
                        fetch(s, "noise_amplitude", profile.model.noise_amplitude, violations,
                              "human.subject");
                    } else {
                        violations.push_back("human.subjects: entries must be names or objects");
                        continue;
                    }
                    c.subjects.push_back(std::move(profile));
                }
            }
        }
    }
    if (j.contains("task")) {
        const auto& t = j.at("task");
        fetch(t, "amplitude", c.task.amplitude, violations, "task");
        fetch(t, "dwell_time", c.task.dwell_time, violations, "task");
        fetch(t, "tolerance_band", c.task.tolerance_band, violations, "task");
        fetch(t, "movements_per_trial", c.task.movements_per_trial, violations, "task");
        fetch(t, "movement_timeout", c.task.movement_timeout, violations, "task");
        fetch(t, "benchmark_movements", c.benchmark_movements, violations, "task");
    }
    if (j.contains("optimizer")) {
        const auto& o = j.at("optimizer");
        fetch(o, "population_size", c.optimizer.population_size, violations, "optimizer");
        fetch(o, "generations", c.optimizer.generations, violations, "optimizer");
        fetch_bounds(o, "damping_bounds", c.optimizer.damping_bounds, violations, "optimizer");
        fetch_bounds(o, "stiffness_bounds", c.optimizer.stiffness_bounds, violations, "optimizer");
        fetch(o, "constrained", c.optimizer.constrained, violations, "optimizer");
        fetch(o, "crossover_probability", c.optimizer.crossover_probability, violations,
              "optimizer");
        fetch(o, "crossover_eta", c.optimizer.crossover_eta, violations, "optimizer");
        fetch(o, "mutation_probability", c.optimizer.mutation_probability, violations,
              "optimizer");
        fetch(o, "mutation_eta", c.optimizer.mutation_eta, violations, "optimizer");
        fetch(o, "tournament_size", c.optimizer.tournament_size, violations, "optimizer");
        if (o.contains("repair")) {
            const std::string repair = o.at("repair").get<std::string>();
            if (repair == "resample")
                c.optimizer.repair = RepairStrategy::Resample;
            else if (repair == "project")
                c.optimizer.repair = RepairStrategy::Project;
            else
                violations.push_back("optimizer.repair: must be 'resample' or 'project'");
        }
    }
    if (j.contains("simulation")) fetch(j.at("simulation"), "dt", c.dt, violations, "simulation");
    if (j.contains("benchmark")) {
        fetch(j.at("benchmark"), "B_y", c.benchmark.B_y, violations, "benchmark");
        fetch(j.at("benchmark"), "K_y", c.benchmark.K_y, violations, "benchmark");
    }
    if (j.contains("analysis")) {
        const auto& a = j.at("analysis");
        GeneBounds range{c.analysis.zwidth_k_min, c.analysis.zwidth_k_max};
        fetch_bounds(a, "zwidth_stiffness_range", range, violations, "analysis");
        c.analysis.zwidth_k_min = range.lo;
        c.analysis.zwidth_k_max = range.hi;
        fetch(a, "zwidth_samples", c.analysis.zwidth_samples, violations, "analysis");
        if (a.contains("comparison_position_gains")) {
            c.analysis.comparison_gains.clear();
            for (const auto& g : a.at("comparison_position_gains"))
                c.analysis.comparison_gains.push_back(
                    {g.value("P", c.system.P), g.value("D", c.system.D)});
        }
        if (a.contains("verdict_gains")) {
            c.analysis.verdict_gains.clear();
            for (const auto& g : a.at("verdict_gains"))
                c.analysis.verdict_gains.push_back({g.value("B_y", 0.0), g.value("K_y", 0.0)});
        }
    }
    fetch(j, "seed", c.seed, violations, "");
    fetch(j, "output_dir", c.output_dir, violations, "");
    c.optimizer.seed = c.seed;

    // semantic validation runs even with structural violations present, so
    // one pass reports everything that is wrong
    try {
        validate_config(c);
    } catch (const ValidationError& e) {
        violations.insert(violations.end(), e.violations().begin(), e.violations().end());
    }
    if (!violations.empty())
        throw ValidationError("config validation failed (" + std::to_string(violations.size()) +
                                  " violation(s))",
                              violations);
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("config file not found: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("config parse error in " + path + ": " + e.what());
    }
    return parse_config(j);
}

inline void write_config(const std::string& path, const ExperimentConfig& c) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config: " + path);
    out << detail_config::to_json(c).dump(2) << "\n";
}

// FNV-1a over the canonical dump; keys are sorted by the JSON container so
// the hash is stable for a given configuration. The output directory is not
// part of the experiment identity, so resuming into a relocated directory
// stays legal.
inline std::uint64_t config_hash(const ExperimentConfig& c) {
    nlohmann::json j = detail_config::to_json(c);
    j.erase("output_dir");
    const std::string dump = j.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : dump) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace wristopt
