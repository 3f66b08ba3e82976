#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wristopt/checkpoint.hpp"
#include "wristopt/config.hpp"
#include "wristopt/csv.hpp"
#include "wristopt/harness.hpp"

using namespace wristopt;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("wristopt_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// small, fast experiment for harness-level tests
ExperimentConfig small_config(const fs::path& out) {
    ExperimentConfig cfg = default_experiment_config();
    cfg.subjects = {default_subject_profiles()[1]}; // compliant only
    cfg.optimizer.population_size = 4;
    cfg.optimizer.generations = 3;
    cfg.benchmark_movements = 2;
    cfg.analysis.zwidth_samples = 20;
    cfg.seed = 11;
    cfg.optimizer.seed = 11;
    cfg.output_dir = out.string();
    return cfg;
}

} // namespace

TEST_CASE("JSON layer round-trips doubles exactly") {
    for (double v : {0.1 + 0.2, 1.0 / 3.0, 6.02214076e23, -1.7976931348623157e308, 5e-324}) {
        nlohmann::json j = v;
        const double back = nlohmann::json::parse(j.dump()).get<double>();
        REQUIRE(std::memcmp(&back, &v, sizeof v) == 0);
    }
}

TEST_CASE("CSV numbers round-trip exactly") {
    const auto dir = temp_dir("csv");
    csv::Table t;
    t.header = {"a", "b"};
    t.rows = {{0.1 + 0.2, 1.0 / 3.0}, {1e-300, 123456789.123456789}};
    const std::string path = (dir / "t.csv").string();
    csv::write(path, t);
    const auto back = csv::read(path);
    REQUIRE(back.header == t.header);
    REQUIRE(back.rows.size() == t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        for (std::size_t c = 0; c < t.rows[r].size(); ++c)
            REQUIRE(back.rows[r][c] == t.rows[r][c]);
}

TEST_CASE("trace CSV round-trips") {
    const auto dir = temp_dir("trace");
    SimulationTrace trace;
    trace.timestep = 1e-3;
    Rng rng(5);
    for (int k = 0; k < 50; ++k)
        trace.append(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1),
                     rng.uniform(-1, 1), rng.uniform(-1, 1), 0.6, k % 2 == 0);
    const std::string path = (dir / "trace.csv").string();
    csv::write_trace(path, trace);
    const auto back = csv::read_trace(path);
    REQUIRE(back.size() == trace.size());
    CHECK(back.timestep == Approx(trace.timestep));
    for (std::size_t k = 0; k < trace.size(); ++k) {
        REQUIRE(back.q[k] == trace.q[k]);
        REQUIRE(back.tau_e[k] == trace.tau_e[k]);
        REQUIRE(back.dwell_flag[k] == trace.dwell_flag[k]);
    }
}

TEST_CASE("default config round-trips through file and validates") {
    const auto dir = temp_dir("config");
    const auto cfg = default_experiment_config();
    const std::string path = (dir / "default.json").string();
    write_config(path, cfg);
    const auto loaded = load_config(path);
    CHECK(loaded.system.P == cfg.system.P);
    CHECK(loaded.subjects.size() == 3);
    CHECK(loaded.optimizer.generations == cfg.optimizer.generations);
    CHECK(config_hash(loaded) == config_hash(cfg));
}

TEST_CASE("shipped default config loads cleanly") {
    const auto cfg = load_config(std::string(WRISTOPT_SOURCE_DIR) + "/configs/default.json");
    CHECK(cfg.subjects.size() == 3);
    CHECK(cfg.optimizer.population_size == 5);
    CHECK(cfg.optimizer.generations == 10);
}

TEST_CASE("config validation reports every violation with field names") {
    const auto dir = temp_dir("badconfig");
    const std::string path = (dir / "bad.json").string();
    {
        std::ofstream out(path);
        out << R"({
            "system": {"J": -1.0},
            "task": {"amplitude": 0.0, "movement_timeout": 0.5},
            "optimizer": {"stiffness_bounds": [5]},
            "simulation": {"dt": 0.001}
        })";
    }
    try {
        load_config(path);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        const auto& v = e.violations();
        REQUIRE(v.size() >= 3);
        bool has_j = false, has_amp = false, has_bounds = false;
        for (const auto& msg : v) {
            if (msg.find("system.J") != std::string::npos) has_j = true;
            if (msg.find("task.amplitude") != std::string::npos) has_amp = true;
            if (msg.find("stiffness_bounds") != std::string::npos) has_bounds = true;
        }
        CHECK(has_j);
        CHECK(has_amp);
        CHECK(has_bounds);
    }
}

TEST_CASE("too coarse a timestep is rejected by the step-size rule") {
    auto cfg = default_experiment_config();
    cfg.dt = 0.05; // benchmark fast pole limits dt to ~7.6 ms
    try {
        validate_config(cfg);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        REQUIRE(e.violations().size() == 1);
        CHECK(e.violations()[0].find("step-size") != std::string::npos);
    }
}

TEST_CASE("malformed JSON raises a parse error with the filename") {
    const auto dir = temp_dir("parse");
    const std::string path = (dir / "broken.json").string();
    std::ofstream(path) << "{ not json";
    CHECK_THROWS_AS(load_config(path), ParseError);
}

TEST_CASE("checkpoints round-trip the full optimization state") {
    const auto dir = temp_dir("checkpoint");
    Checkpoint cp;
    cp.config_hash = 0xdeadbeefcafe1234ULL;
    cp.subject = "subject2-compliant";
    cp.state.generation = 5;
    cp.state.evaluations = 25;
    Rng rng(77);
    rng.uniform01();
    cp.state.rng_state = rng.serialize();
    for (int k = 0; k < 4; ++k) {
        Individual ind;
        ind.gains = {rng.uniform(0.5, 200), rng.uniform(1, 500)};
        ind.fitness = {rng.uniform01(), rng.uniform(1, 30), k != 2};
        ind.evaluated = true;
        ind.rank = k % 2;
        ind.crowding = rng.uniform01();
        cp.state.population.push_back(ind);
    }
    cp.state.records.push_back(make_generation_record(5, cp.state.population));

    const std::string path = (dir / "gen05.json").string();
    save_checkpoint(path, cp);
    const auto back = load_checkpoint(path);
    CHECK(back.config_hash == cp.config_hash);
    CHECK(back.subject == cp.subject);
    CHECK(back.state.generation == 5);
    CHECK(back.state.evaluations == 25);
    CHECK(back.state.rng_state == cp.state.rng_state);
    REQUIRE(back.state.population.size() == cp.state.population.size());
    for (std::size_t k = 0; k < cp.state.population.size(); ++k) {
        REQUIRE(back.state.population[k].gains == cp.state.population[k].gains);
        REQUIRE(back.state.population[k].fitness == cp.state.population[k].fitness);
        REQUIRE(back.state.population[k].crowding == cp.state.population[k].crowding);
    }
    REQUIRE(back.state.records.size() == 1);
    CHECK(back.state.records[0].mean_damping == cp.state.records[0].mean_damping);
}

TEST_CASE("analyze writes boundary curves and verdicts") {
    const auto out = temp_dir("analyze");
    auto cfg = small_config(out);
    const auto result = cmd_analyze(cfg);
    REQUIRE(result.zwidth_files.size() == 4); // default + 3 comparison sets

    const auto table = csv::read(result.zwidth_files[0]);
    REQUIRE(table.header == std::vector<std::string>{"K_y", "B_y_boundary"});
    for (const auto& row : table.rows) {
        const double ky = row[0], b = row[1];
        const double value = b * b * cfg.system.D +
                             ky * (cfg.system.J * cfg.system.P -
                                   cfg.system.D * cfg.system.D * cfg.system.k_r);
        REQUIRE(std::abs(value) <= 1e-9 * std::max(1.0, b * b * cfg.system.D));
    }

    // a strong-P comparison set has an identically zero boundary
    cfg.analysis.comparison_gains = {{cfg.system.D * cfg.system.D * cfg.system.k_r / cfg.system.J * 2.0,
                                      cfg.system.D}};
    cfg.output_dir = (out / "strong").string();
    const auto strong = cmd_analyze(cfg);
    const auto zero_curve = csv::read(strong.zwidth_files[1]);
    for (const auto& row : zero_curve.rows) REQUIRE(row[1] == 0.0);

    // benchmark gains listed first in the shipped verdict table: passive
    REQUIRE_FALSE(result.verdicts.empty());
    CHECK(result.verdicts[0].stable);
    CHECK(result.verdicts[0].sufficient_criterion);
    CHECK(result.verdicts[0].positive_real);
}

TEST_CASE("bench runs are deterministic and write traces") {
    const auto out_a = temp_dir("bench_a");
    const auto out_b = temp_dir("bench_b");
    auto cfg_a = small_config(out_a);
    auto cfg_b = small_config(out_b);

    const auto summary_a = cmd_bench(cfg_a);
    const auto summary_b = cmd_bench(cfg_b);
    REQUIRE(summary_a.bench.size() == 1);
    CHECK(summary_a.bench[0].fitness.feasible);
    CHECK(summary_a.bench[0].fitness == summary_b.bench[0].fitness);

    const fs::path sdir = out_a / "bench" / cfg_a.subjects[0].name;
    REQUIRE(fs::exists(sdir / "trace_r01.csv"));
    REQUIRE(fs::exists(sdir / "trace_r04.csv")); // 2 movements = 4 reaches
    CHECK(slurp(out_a / "bench" / "summary.json") == slurp(out_b / "bench" / "summary.json"));
}

TEST_CASE("optimize writes the full artifact set and honors the constraint") {
    const auto out = temp_dir("optimize");
    auto cfg = small_config(out);
    const auto summary = cmd_optimize(cfg, true);
    REQUIRE(summary.subjects.size() == 1);
    const auto& subject = summary.subjects[0];
    CHECK(subject.evaluations == 12);
    REQUIRE(subject.records.size() == 3);
    REQUIRE_FALSE(subject.front.empty());

    const fs::path sdir = out / "optimize_constrained" / cfg.subjects[0].name;
    const auto log = csv::read((sdir / "eval_log.csv").string());
    REQUIRE(log.rows.size() == 12);
    for (const auto& row : log.rows) REQUIRE(row[6] == 1.0); // constraint_ok column

    const auto gens = csv::read((sdir / "generations.csv").string());
    REQUIRE(gens.rows.size() == 3);
    REQUIRE(fs::exists(sdir / "checkpoints" / "gen01.json"));
    REQUIRE(fs::exists(sdir / "checkpoints" / "gen03.json"));
    REQUIRE(fs::exists(sdir / "front.csv"));
    REQUIRE(fs::exists(sdir / "zwidth_overlay.csv"));
    // first and last generation traces for the profile export
    REQUIRE(fs::exists(sdir / "traces" / "gen01_ind1_r1.csv"));
    REQUIRE(fs::exists(sdir / "traces" / "gen03_ind4_r2.csv"));
}

TEST_CASE("resuming a checkpoint reproduces the uninterrupted run") {
    const auto out = temp_dir("resume");
    auto cfg = small_config(out);
    const auto full = cmd_optimize(cfg, true);

    const fs::path cp_path = out / "optimize_constrained" / cfg.subjects[0].name /
                             "checkpoints" / "gen02.json";
    REQUIRE(fs::exists(cp_path));

    // a different experiment (different seed) must be refused
    auto other = cfg;
    other.seed = cfg.seed + 1;
    try {
        cmd_optimize(other, true, cp_path.string());
        FAIL("expected hash mismatch for a different seed");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("mismatch") != std::string::npos);
    }

    // with the identical config the resume must reproduce the run exactly
    const auto resumed = cmd_optimize(cfg, true, cp_path.string());
    REQUIRE(resumed.subjects.size() == 1);
    REQUIRE(resumed.subjects[0].records.size() == full.subjects[0].records.size());
    for (std::size_t g = 0; g < full.subjects[0].records.size(); ++g) {
        const auto& a = full.subjects[0].records[g];
        const auto& b = resumed.subjects[0].records[g];
        REQUIRE(a.population.size() == b.population.size());
        for (std::size_t k = 0; k < a.population.size(); ++k) {
            REQUIRE(a.population[k].gains == b.population[k].gains);
            REQUIRE(a.population[k].fitness == b.population[k].fitness);
        }
    }
}

TEST_CASE("profile export computes stage statistics from stored traces") {
    const auto out = temp_dir("profiles");
    const fs::path sdir = out / "bench" / "subjectX";
    fs::create_directories(sdir);
    for (int i = 0; i < 3; ++i) {
        SimulationTrace t;
        t.timestep = 1e-3;
        for (int k = 0; k < 100; ++k) t.append(0, 0, 1.0 + i, 0, 0, 0.6, false);
        csv::write_trace((sdir / ("trace_r0" + std::to_string(i + 1) + ".csv")).string(), t);
    }
    const auto written = cmd_export_profiles(out.string(), 0.05);
    REQUIRE(written.size() == 1);
    const auto profile = csv::read(written[0]);
    REQUIRE(profile.header ==
            std::vector<std::string>{"t", "mean_tau_e", "deviation_tau_e"});
    REQUIRE(profile.rows.size() == 50);
    for (const auto& row : profile.rows) {
        CHECK(row[1] == Approx(2.0));
        CHECK(row[2] == Approx(std::sqrt(2.0 / 3.0)));
    }

    CHECK_THROWS_AS(cmd_export_profiles((out / "nowhere").string(), 4.0), MissingTraces);
}
