#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "wristopt/checkpoint.hpp"
#include "wristopt/config.hpp"
#include "wristopt/csv.hpp"
#include "wristopt/errors.hpp"
#include "wristopt/nsga2.hpp"
#include "wristopt/passivity.hpp"
#include "wristopt/simulate.hpp"

namespace wristopt {

// Experiment orchestration: the benchmark, unconstrained and constrained
// protocols, the Z-width analysis and the torque-profile export. One
// directory per run; deterministic filenames keyed by generation/individual
// indices; CSV for data, JSON for summaries and checkpoints.

namespace fs = std::filesystem;

inline constexpr std::uint64_t kBenchProtocol = 1;
inline constexpr std::uint64_t kUnconstrainedProtocol = 2;
inline constexpr std::uint64_t kConstrainedProtocol = 3;

struct SubjectBenchResult {
    std::string subject;
    FitnessVector fitness;
    std::size_t movements = 0;
};

struct SubjectOptimizationResult {
    std::string subject;
    std::vector<GenerationRecord> records;
    std::vector<Individual> front;
    std::uint64_t evaluations = 0;
};

struct RunSummary {
    std::string protocol;
    std::vector<SubjectBenchResult> bench;
    std::vector<SubjectOptimizationResult> subjects;
    // averaged metrics over subjects (first and last generation for
    // optimization protocols, the fixed controller for the benchmark)
    double mean_tau_rms = 0.0, std_tau_rms = 0.0;
    double mean_t_total = 0.0, std_t_total = 0.0;
};

namespace detail_harness {

inline void mean_std(const std::vector<double>& v, double& mean, double& std_out) {
    mean = 0.0;
    std_out = 0.0;
    if (v.empty()) return;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    std_out = std::sqrt(var / static_cast<double>(v.size()));
}

inline std::string two_digits(int v) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%02d", v);
    return buf;
}

inline nlohmann::json fitness_to_json(const FitnessVector& f) {
    return {{"tau_rms", f.tau_rms}, {"t_total", f.t_total}, {"feasible", f.feasible}};
}

inline nlohmann::json summary_to_json(const RunSummary& s) {
    nlohmann::json j;
    j["protocol"] = s.protocol;
    if (!s.bench.empty()) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& b : s.bench)
            rows.push_back({{"subject", b.subject},
                            {"movements", b.movements},
                            {"fitness", fitness_to_json(b.fitness)}});
        j["subjects"] = rows;
    }
    if (!s.subjects.empty()) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : s.subjects) {
            nlohmann::json gens = nlohmann::json::array();
            for (const auto& rec : r.records)
                gens.push_back({{"generation", rec.generation},
                                {"mean_damping", rec.mean_damping},
                                {"std_damping", rec.std_damping},
                                {"mean_stiffness", rec.mean_stiffness},
                                {"std_stiffness", rec.std_stiffness},
                                {"mean_tau_rms", rec.mean_tau_rms},
                                {"std_tau_rms", rec.std_tau_rms},
                                {"mean_t_total", rec.mean_t_total},
                                {"std_t_total", rec.std_t_total}});
            nlohmann::json front = nlohmann::json::array();
            for (const auto& ind : r.front)
                front.push_back({{"B_y", ind.gains.B_y},
                                 {"K_y", ind.gains.K_y},
                                 {"fitness", fitness_to_json(ind.fitness)}});
            rows.push_back({{"subject", r.subject},
                            {"evaluations", r.evaluations},
                            {"generations", gens},
                            {"front", front}});
        }
        j["subjects"] = rows;
    }
    j["averaged"] = {{"mean_tau_rms", s.mean_tau_rms},
                     {"std_tau_rms", s.std_tau_rms},
                     {"mean_t_total", s.mean_t_total},
                     {"std_t_total", s.std_t_total}};
    return j;
}

inline void write_generations_csv(const std::string& path,
                                  const std::vector<GenerationRecord>& records) {
    csv::Table t;
    t.header = {"generation",  "mean_B_y",     "std_B_y",     "mean_K_y",    "std_K_y",
                "mean_tau_rms", "std_tau_rms", "mean_t_total", "std_t_total"};
    for (const auto& r : records)
        t.rows.push_back({static_cast<double>(r.generation), r.mean_damping, r.std_damping,
                          r.mean_stiffness, r.std_stiffness, r.mean_tau_rms, r.std_tau_rms,
                          r.mean_t_total, r.std_t_total});
    csv::write(path, t);
}

inline void write_population_csv(const std::string& path, const std::vector<Individual>& pop,
                                 bool with_rank) {
    csv::Table t;
    t.header = {"B_y", "K_y", "tau_rms", "t_total", "feasible"};
    if (with_rank) {
        t.header.push_back("rank");
        t.header.push_back("crowding");
    }
    for (const auto& ind : pop) {
        std::vector<double> row{ind.gains.B_y, ind.gains.K_y, ind.fitness.tau_rms,
                                ind.fitness.t_total, ind.fitness.feasible ? 1.0 : 0.0};
        if (with_rank) {
            row.push_back(static_cast<double>(ind.rank));
            row.push_back(ind.crowding);
        }
        t.rows.push_back(std::move(row));
    }
    csv::write(path, t);
}

} // namespace detail_harness

// Z-width CSVs for the configured position gains plus comparison sets, and a
// passivity-verdict table for the configured gain pairs.
struct AnalyzeResult {
    std::vector<std::string> zwidth_files;
    std::vector<PassivityVerdict> verdicts;
};

inline AnalyzeResult cmd_analyze(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const fs::path dir = fs::path(cfg.output_dir) / "analyze";
    fs::create_directories(dir);
    AnalyzeResult result;

    auto write_curve = [&](const SystemParams& p, const std::string& name) {
        const auto curve =
            z_width_boundary(p, cfg.analysis.zwidth_k_min, cfg.analysis.zwidth_k_max,
                             cfg.analysis.zwidth_samples);
        csv::Table t;
        t.comments = {"P = " + csv::number(p.P) + ", D = " + csv::number(p.D) +
                      ", J = " + csv::number(p.J) + ", k_r = " + csv::number(p.k_r)};
        t.header = {"K_y", "B_y_boundary"};
        for (std::size_t k = 0; k < curve.stiffness.size(); ++k)
            t.rows.push_back({curve.stiffness[k], curve.boundary_damping[k]});
        const std::string path = (dir / name).string();
        csv::write(path, t);
        result.zwidth_files.push_back(path);
    };

    write_curve(cfg.system, "zwidth_default.csv");
    int cmp = 0;
    for (const auto& set : cfg.analysis.comparison_gains) {
        if (cmp >= 3) break;
        SystemParams p = cfg.system;
        p.P = set.P;
        p.D = set.D;
        write_curve(p, "zwidth_cmp" + std::to_string(++cmp) + ".csv");
    }

    csv::Table verdicts;
    verdicts.header = {"B_y",           "K_y",          "stable", "sufficient_criterion",
                       "positive_real", "worst_frequency", "worst_real_part"};
    for (const auto& g : cfg.analysis.verdict_gains) {
        const auto v = is_passive(cfg.system, g);
        result.verdicts.push_back(v);
        verdicts.rows.push_back({g.B_y, g.K_y, v.stable ? 1.0 : 0.0,
                                 v.sufficient_criterion ? 1.0 : 0.0, v.positive_real ? 1.0 : 0.0,
                                 v.worst_frequency, v.worst_real_part});
    }
    csv::write((dir / "verdicts.csv").string(), verdicts);
    return result;
}

// Fixed benchmark controller run per subject profile.
inline RunSummary cmd_bench(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const fs::path dir = fs::path(cfg.output_dir) / "bench";
    fs::create_directories(dir);

    RunSummary summary;
    summary.protocol = "bench";
    std::vector<double> taus, times;
    for (std::size_t s = 0; s < cfg.subjects.size(); ++s) {
        const auto& subject = cfg.subjects[s];
        const fs::path sdir = dir / subject.name;
        fs::create_directories(sdir);

        TaskSpec task = cfg.task;
        task.movements_per_trial = cfg.benchmark_movements;
        const std::uint64_t seed = Rng::derive(cfg.seed, s + 1, kBenchProtocol);
        const auto trial =
            run_trial(cfg.system, cfg.benchmark, subject.model, task, cfg.dt, seed);

        for (std::size_t r = 0; r < trial.traces.size(); ++r)
            csv::write_trace((sdir / ("trace_r" + detail_harness::two_digits(static_cast<int>(r) + 1) +
                                      ".csv")).string(),
                             trial.traces[r]);

        nlohmann::json j = {{"subject", subject.name},
                            {"gains", {{"B_y", cfg.benchmark.B_y}, {"K_y", cfg.benchmark.K_y}}},
                            {"fitness", detail_harness::fitness_to_json(trial.fitness)},
                            {"movements", cfg.benchmark_movements}};
        std::ofstream(sdir / "summary.json") << j.dump(2) << "\n";

        summary.bench.push_back({subject.name, trial.fitness,
                                 static_cast<std::size_t>(cfg.benchmark_movements)});
        taus.push_back(trial.fitness.tau_rms);
        times.push_back(trial.fitness.t_total);
    }
    detail_harness::mean_std(taus, summary.mean_tau_rms, summary.std_tau_rms);
    detail_harness::mean_std(times, summary.mean_t_total, summary.std_t_total);
    std::ofstream(dir / "summary.json") << detail_harness::summary_to_json(summary).dump(2)
                                        << "\n";
    return summary;
}

// One subject's optimization with full artifact output: per-generation CSV,
// final front, Z-width overlay, evaluation log, per-generation checkpoints
// and first/last-generation traces.
inline SubjectOptimizationResult
optimize_subject(const ExperimentConfig& cfg, std::size_t subject_index, bool constrained,
                 const fs::path& dir, const OptimizationState* resume = nullptr) {
    const auto& subject = cfg.subjects[subject_index];
    fs::create_directories(dir / "checkpoints");
    fs::create_directories(dir / "traces");

    OptimizerConfig ocfg = cfg.optimizer;
    ocfg.constrained = constrained;
    ocfg.seed = Rng::derive(cfg.seed, subject_index + 1,
                            constrained ? kConstrainedProtocol : kUnconstrainedProtocol);

    csv::Table eval_log;
    eval_log.header = {"evaluation", "generation", "slot",    "B_y",     "K_y",
                       "criterion_value", "constraint_ok", "tau_rms", "t_total", "feasible"};
    std::uint64_t counter = resume ? resume->evaluations : 0;

    const Evaluator evaluator = [&](const ImpedanceGains& gains, std::uint64_t seed) {
        const auto trial = run_trial(cfg.system, gains, subject.model, cfg.task, cfg.dt, seed);
        ++counter;
        const int generation = 1 + static_cast<int>((counter - 1) /
                                                    static_cast<std::uint64_t>(ocfg.population_size));
        const int slot = 1 + static_cast<int>((counter - 1) %
                                              static_cast<std::uint64_t>(ocfg.population_size));
        const double criterion =
            gains.B_y * gains.B_y * cfg.system.D +
            gains.K_y * (cfg.system.J * cfg.system.P - cfg.system.D * cfg.system.D * cfg.system.k_r);
        eval_log.rows.push_back({static_cast<double>(counter), static_cast<double>(generation),
                                 static_cast<double>(slot), gains.B_y, gains.K_y, criterion,
                                 constraint_satisfied(cfg.system, gains) ? 1.0 : 0.0,
                                 trial.fitness.tau_rms, trial.fitness.t_total,
                                 trial.fitness.feasible ? 1.0 : 0.0});
        if (generation == 1 || generation == ocfg.generations) {
            for (std::size_t r = 0; r < trial.traces.size(); ++r) {
                const std::string name = "gen" + detail_harness::two_digits(generation) + "_ind" +
                                         std::to_string(slot) + "_r" +
                                         std::to_string(r + 1) + ".csv";
                csv::write_trace((dir / "traces" / name).string(), trial.traces[r]);
            }
        }
        return trial.fitness;
    };

    const std::uint64_t hash = config_hash(cfg);
    const GenerationCallback on_generation = [&](const OptimizationState& state) {
        Checkpoint cp{hash, subject.name, state};
        save_checkpoint((dir / "checkpoints" /
                         ("gen" + detail_harness::two_digits(state.generation) + ".json"))
                            .string(),
                        cp);
    };

    const auto result = run_optimization(ocfg, cfg.system, evaluator, on_generation, resume);

    detail_harness::write_generations_csv((dir / "generations.csv").string(), result.records);
    detail_harness::write_population_csv((dir / "front.csv").string(), result.pareto_front, false);
    detail_harness::write_population_csv((dir / "final_population.csv").string(),
                                         result.final_population, true);
    csv::write((dir / "eval_log.csv").string(), eval_log);

    // boundary curve with the final front overlaid
    csv::Table overlay;
    overlay.header = {"kind", "K_y", "B_y"};
    overlay.comments = {"kind 0 = passivity boundary, kind 1 = final front individual"};
    const auto curve = z_width_boundary(cfg.system, cfg.analysis.zwidth_k_min,
                                        cfg.analysis.zwidth_k_max, cfg.analysis.zwidth_samples);
    for (std::size_t k = 0; k < curve.stiffness.size(); ++k)
        overlay.rows.push_back({0.0, curve.stiffness[k], curve.boundary_damping[k]});
    for (const auto& ind : result.pareto_front)
        overlay.rows.push_back({1.0, ind.gains.K_y, ind.gains.B_y});
    csv::write((dir / "zwidth_overlay.csv").string(), overlay);

    SubjectOptimizationResult out;
    out.subject = subject.name;
    out.records = result.records;
    out.front = result.pareto_front;
    out.evaluations = result.evaluations;

    nlohmann::json j = {{"subject", subject.name},
                        {"constrained", constrained},
                        {"evaluations", out.evaluations},
                        {"config_hash", hash}};
    nlohmann::json gens = nlohmann::json::array();
    for (const auto& rec : out.records)
        gens.push_back({{"generation", rec.generation},
                        {"mean_damping", rec.mean_damping},
                        {"std_damping", rec.std_damping},
                        {"mean_stiffness", rec.mean_stiffness},
                        {"std_stiffness", rec.std_stiffness},
                        {"mean_tau_rms", rec.mean_tau_rms},
                        {"std_tau_rms", rec.std_tau_rms},
                        {"mean_t_total", rec.mean_t_total},
                        {"std_t_total", rec.std_t_total}});
    j["generations"] = gens;
    std::ofstream(dir / "summary.json") << j.dump(2) << "\n";
    return out;
}

// Full optimization protocol over all configured subjects. A resume
// checkpoint applies to the subject recorded inside it; the other subjects
// rerun deterministically from scratch.
inline RunSummary cmd_optimize(const ExperimentConfig& cfg, bool constrained,
                               const std::string& resume_path = "") {
    validate_config(cfg);
    const std::string protocol = constrained ? "optimize-constrained" : "optimize-unconstrained";
    const fs::path dir = fs::path(cfg.output_dir) / (constrained ? "optimize_constrained"
                                                                 : "optimize_unconstrained");
    fs::create_directories(dir);

    Checkpoint resume_cp;
    bool have_resume = false;
    if (!resume_path.empty()) {
        resume_cp = load_checkpoint(resume_path);
        if (resume_cp.config_hash != config_hash(cfg))
            throw std::runtime_error(
                "checkpoint/config mismatch: checkpoint hash " +
                std::to_string(resume_cp.config_hash) + " vs config hash " +
                std::to_string(config_hash(cfg)) +
                "; refusing to resume with a different configuration");
        have_resume = true;
    }

    RunSummary summary;
    summary.protocol = protocol;
    std::vector<double> taus, times;
    for (std::size_t s = 0; s < cfg.subjects.size(); ++s) {
        const bool resume_here = have_resume && cfg.subjects[s].name == resume_cp.subject;
        const auto result = optimize_subject(cfg, s, constrained, dir / cfg.subjects[s].name,
                                             resume_here ? &resume_cp.state : nullptr);
        if (!result.records.empty()) {
            taus.push_back(result.records.back().mean_tau_rms);
            times.push_back(result.records.back().mean_t_total);
        }
        summary.subjects.push_back(result);
    }
    detail_harness::mean_std(taus, summary.mean_tau_rms, summary.std_tau_rms);
    detail_harness::mean_std(times, summary.mean_t_total, summary.std_t_total);
    std::ofstream(dir / "summary.json") << detail_harness::summary_to_json(summary).dump(2)
                                        << "\n";
    return summary;
}

// Aligned mean/deviation torque profiles per protocol stage, clipped to
// `clip` seconds (the paper's charts use 4 s).
inline std::vector<std::string> cmd_export_profiles(const std::string& run_dir,
                                                    double clip = 4.0) {
    const fs::path root(run_dir);
    if (!fs::exists(root)) throw MissingTraces("run directory not found: " + run_dir);
    const fs::path out = root / "profiles";

    struct Stage {
        std::string name;
        std::vector<SimulationTrace> traces;
        bool clipped_to_shortest = false;
    };
    std::vector<Stage> stages;

    auto collect = [&](const fs::path& dir, const std::string& stage_name,
                       const std::string& prefix) {
        if (!fs::exists(dir)) return;
        Stage stage;
        stage.name = stage_name;
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.path().extension() == ".csv" &&
                entry.path().filename().string().rfind(prefix, 0) == 0)
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) stage.traces.push_back(csv::read_trace(f.string()));
        if (!stage.traces.empty()) stages.push_back(std::move(stage));
    };

    for (const auto& proto : {"bench"}) {
        const fs::path pdir = root / proto;
        if (!fs::exists(pdir)) continue;
        for (const auto& entry : fs::directory_iterator(pdir))
            if (entry.is_directory())
                collect(entry.path(), std::string(proto) + "_" + entry.path().filename().string(),
                        "trace_");
    }
    for (const auto& proto : {"optimize_constrained", "optimize_unconstrained"}) {
        const fs::path pdir = root / proto;
        if (!fs::exists(pdir)) continue;
        for (const auto& entry : fs::directory_iterator(pdir)) {
            if (!entry.is_directory()) continue;
            const std::string subject = entry.path().filename().string();
            const fs::path traces = entry.path() / "traces";
            if (!fs::exists(traces)) continue;
            // discover generation prefixes present (first and last stages)
            std::set<std::string> gens;
            for (const auto& f : fs::directory_iterator(traces)) {
                const std::string name = f.path().filename().string();
                if (name.rfind("gen", 0) == 0 && name.size() >= 5) gens.insert(name.substr(0, 5));
            }
            for (const auto& gen : gens)
                collect(traces, std::string(proto) + "_" + subject + "_" + gen, gen);
        }
    }

    if (stages.empty()) throw MissingTraces("no trace files found under " + run_dir);
    fs::create_directories(out);

    std::vector<std::string> written;
    for (auto& stage : stages) {
        const auto profile = torque_profile_stats(stage.traces, clip);
        csv::Table t;
        std::size_t shortest = stage.traces.front().size();
        for (const auto& tr : stage.traces) shortest = std::min(shortest, tr.size());
        if (profile.mean.size() < static_cast<std::size_t>(std::floor(clip / profile.timestep)))
            t.comments.push_back("clip exceeded the shortest trace; profile truncated to " +
                                 csv::number(static_cast<double>(shortest) * profile.timestep) +
                                 " s");
        t.header = {"t", "mean_tau_e", "deviation_tau_e"};
        for (std::size_t k = 0; k < profile.mean.size(); ++k)
            t.rows.push_back({static_cast<double>(k + 1) * profile.timestep, profile.mean[k],
                              profile.deviation[k]});
        const std::string path = (out / (stage.name + "_profile.csv")).string();
        csv::write(path, t);
        written.push_back(path);
    }
    return written;
}

} // namespace wristopt
