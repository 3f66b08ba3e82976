// Command-line front end for the impedance tuning experiments:
//   analyze          Z-width curves and passivity verdicts
//   bench            fixed benchmark controller per subject
//   optimize         NSGA-II run per subject (--constrained, --resume PATH)
//   export-profiles  aligned torque-profile statistics from stored traces

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wristopt/config.hpp"
#include "wristopt/harness.hpp"

namespace {

void print_run_summary(const wristopt::RunSummary& summary) {
    std::printf("protocol: %s\n", summary.protocol.c_str());
    for (const auto& b : summary.bench)
        std::printf("  %-22s tau_rms %8.4f N m   t_total %7.3f s   %s\n", b.subject.c_str(),
                    b.fitness.tau_rms, b.fitness.t_total,
                    b.fitness.feasible ? "completed" : "INCOMPLETE");
    for (const auto& s : summary.subjects) {
        const auto& first = s.records.front();
        const auto& last = s.records.back();
        std::printf("  %-22s gen %2d -> %2d   tau_rms %.4f -> %.4f   t_total %.3f -> %.3f"
                    "   front size %zu\n",
                    s.subject.c_str(), first.generation, last.generation, first.mean_tau_rms,
                    last.mean_tau_rms, first.mean_t_total, last.mean_t_total, s.front.size());
    }
    std::printf("  averaged over subjects: tau_rms %.4f +/- %.4f, t_total %.3f +/- %.3f\n",
                summary.mean_tau_rms, summary.std_tau_rms, summary.mean_t_total,
                summary.std_t_total);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Passivity-constrained impedance tuning for a one-DOF wrist robot"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    app.add_option("--config", config_path, "experiment config file (JSON)");
    app.add_option("--out", out_dir, "output directory (overrides config)");
    app.add_option("--seed", seed, "master seed (overrides config)")
        ->each([&](const std::string&) { seed_set = true; });

    auto* analyze = app.add_subcommand("analyze", "Z-width curves and passivity verdicts");
    auto* bench = app.add_subcommand("bench", "fixed benchmark controller per subject");
    auto* optimize = app.add_subcommand("optimize", "NSGA-II optimization per subject");
    bool constrained = false;
    std::string resume_path;
    optimize->add_flag("--constrained", constrained, "repair offspring to the passive region");
    optimize->add_option("--resume", resume_path, "checkpoint file to resume from");
    auto* export_profiles =
        app.add_subcommand("export-profiles", "aligned torque-profile statistics");
    std::string run_dir;
    double clip = 4.0;
    export_profiles->add_option("--run", run_dir, "run directory (defaults to output dir)");
    export_profiles->add_option("--clip", clip, "clip window in seconds")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        wristopt::ExperimentConfig cfg = config_path.empty()
                                             ? wristopt::default_experiment_config()
                                             : wristopt::load_config(config_path);
        if (seed_set) {
            cfg.seed = seed;
            cfg.optimizer.seed = seed;
        }
        if (!out_dir.empty()) cfg.output_dir = out_dir;

        if (*analyze) {
            const auto result = wristopt::cmd_analyze(cfg);
            std::printf("wrote %zu Z-width curves under %s/analyze\n", result.zwidth_files.size(),
                        cfg.output_dir.c_str());
            for (std::size_t k = 0; k < cfg.analysis.verdict_gains.size(); ++k) {
                const auto& g = cfg.analysis.verdict_gains[k];
                const auto& v = result.verdicts[k];
                std::printf("  B_y %8.3f  K_y %8.3f   stable %d  criterion %d  positive_real %d"
                            "   worst Re %.3e at w %.3e\n",
                            g.B_y, g.K_y, v.stable, v.sufficient_criterion, v.positive_real,
                            v.worst_real_part, v.worst_frequency);
            }
        } else if (*bench) {
            print_run_summary(wristopt::cmd_bench(cfg));
        } else if (*optimize) {
            print_run_summary(wristopt::cmd_optimize(cfg, constrained, resume_path));
        } else if (*export_profiles) {
            const std::string dir = run_dir.empty() ? cfg.output_dir : run_dir;
            const auto written = wristopt::cmd_export_profiles(dir, clip);
            std::printf("wrote %zu profile files under %s/profiles\n", written.size(),
                        dir.c_str());
        }
    } catch (const wristopt::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        for (const auto& v : e.violations()) std::cerr << "  - " << v << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
