#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wristopt/errors.hpp"
#include "wristopt/passivity.hpp"
#include "wristopt/rng.hpp"
#include "wristopt/simulate.hpp"
#include "wristopt/system.hpp"

namespace wristopt {

// NSGA-II over individuals Z = [B_y, K_y], minimizing (tau_rms, t_total),
// with optional passivity-constraint repair applied to every offspring
// before it ever reaches the evaluator.

struct Individual {
    ImpedanceGains gains;
    FitnessVector fitness;
    bool evaluated = false;
    int rank = -1;        // set after sorting an evaluated population
    double crowding = 0.0;
};

struct GeneBounds {
    double lo = 0.0;
    double hi = 0.0;
};

enum class RepairStrategy { Resample, Project };

struct OptimizerConfig {
    int population_size = 5;
    int generations = 10;
    GeneBounds damping_bounds{0.5, 200.0};  // B_y
    GeneBounds stiffness_bounds{1.0, 500.0}; // K_y
    bool constrained = true;
    double crossover_probability = 0.9;
    double crossover_eta = 15.0;
    double mutation_probability = 0.5; // per gene (2-gene chromosome)
    double mutation_eta = 20.0;
    int tournament_size = 2;
    std::uint64_t seed = 1;
    RepairStrategy repair = RepairStrategy::Resample;

    void validate() const {
        if (population_size < 2)
            throw std::invalid_argument("OptimizerConfig: population size must be >= 2");
        if (generations < 1)
            throw std::invalid_argument("OptimizerConfig: generations must be >= 1");
        for (const auto& b : {damping_bounds, stiffness_bounds})
            if (!(b.lo > 0.0) || !(b.lo < b.hi))
                throw std::invalid_argument("OptimizerConfig: bounds must satisfy 0 < lo < hi");
        if (tournament_size < 1)
            throw std::invalid_argument("OptimizerConfig: tournament size must be >= 1");
    }
};

// Evaluator contract: gains plus a derived per-evaluation seed in, fitness
// out. run_trial-backed in production, stubs in tests.
using Evaluator = std::function<FitnessVector(const ImpedanceGains&, std::uint64_t seed)>;

// Constrained domination: every feasible individual dominates every
// infeasible one; among equals, Pareto on the two objectives (minimized).
inline bool dominates(const Individual& a, const Individual& b) {
    if (a.fitness.feasible != b.fitness.feasible) return a.fitness.feasible;
    const bool no_worse = a.fitness.tau_rms <= b.fitness.tau_rms &&
                          a.fitness.t_total <= b.fitness.t_total;
    const bool better = a.fitness.tau_rms < b.fitness.tau_rms ||
                        a.fitness.t_total < b.fitness.t_total;
    return no_worse && better;
}

// Fast non-dominated sort; returns fronts as index lists ordered by rank and
// writes rank back into the individuals.
inline std::vector<std::vector<std::size_t>> non_dominated_sort(std::vector<Individual>& pop) {
    const std::size_t n = pop.size();
    std::vector<std::vector<std::size_t>> dominated(n);
    std::vector<int> domination_count(n, 0);
    std::vector<std::vector<std::size_t>> fronts(1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (dominates(pop[i], pop[j]))
                dominated[i].push_back(j);
            else if (dominates(pop[j], pop[i]))
                ++domination_count[i];
        }
        if (domination_count[i] == 0) {
            pop[i].rank = 0;
            fronts[0].push_back(i);
        }
    }
    std::size_t f = 0;
    while (!fronts[f].empty()) {
        std::vector<std::size_t> next;
        for (std::size_t i : fronts[f]) {
            for (std::size_t j : dominated[i]) {
                if (--domination_count[j] == 0) {
                    pop[j].rank = static_cast<int>(f) + 1;
                    next.push_back(j);
                }
            }
        }
        fronts.push_back(std::move(next));
        ++f;
    }
    fronts.pop_back();
    return fronts;
}

// Crowding distance within one front: boundary individuals per objective get
// infinity, interior ones the normalized neighbor-gap sum. A zero objective
// range contributes 0.
inline void crowding_distance(std::vector<Individual>& pop, const std::vector<std::size_t>& front) {
    const double inf = std::numeric_limits<double>::infinity();
    for (std::size_t i : front) pop[i].crowding = 0.0;
    if (front.size() <= 2) {
        for (std::size_t i : front) pop[i].crowding = inf;
        return;
    }
    auto accumulate = [&](auto key) {
        std::vector<std::size_t> order(front);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return key(pop[a]) < key(pop[b]); });
        const double range = key(pop[order.back()]) - key(pop[order.front()]);
        pop[order.front()].crowding = inf;
        pop[order.back()].crowding = inf;
        if (range <= 0.0) return;
        for (std::size_t k = 1; k + 1 < order.size(); ++k) {
            if (pop[order[k]].crowding == inf) continue;
            pop[order[k]].crowding +=
                (key(pop[order[k + 1]]) - key(pop[order[k - 1]])) / range;
        }
    };
    accumulate([](const Individual& ind) { return ind.fitness.tau_rms; });
    accumulate([](const Individual& ind) { return ind.fitness.t_total; });
}

inline void assign_ranks_and_crowding(std::vector<Individual>& pop) {
    for (const auto& front : non_dominated_sort(pop)) crowding_distance(pop, front);
}

// (rank asc, crowding desc); first argument wins ties.
inline bool crowded_better(const Individual& a, const Individual& b) {
    if (a.rank != b.rank) return a.rank < b.rank;
    return a.crowding > b.crowding;
}

// Binary (or size-k) tournament with replacement over a sorted population.
inline std::size_t tournament_select(const std::vector<Individual>& pop, int tournament_size,
                                     Rng& rng) {
    std::size_t best = rng.uniform_index(pop.size());
    for (int k = 1; k < tournament_size; ++k) {
        const std::size_t challenger = rng.uniform_index(pop.size());
        if (crowded_better(pop[challenger], pop[best])) best = challenger;
    }
    return best;
}

inline std::vector<std::pair<std::size_t, std::size_t>>
select_parents(const std::vector<Individual>& pop, int pairs, int tournament_size, Rng& rng) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    out.reserve(pairs);
    for (int k = 0; k < pairs; ++k) {
        const std::size_t a = tournament_select(pop, tournament_size, rng);
        const std::size_t b = tournament_select(pop, tournament_size, rng);
        out.emplace_back(a, b);
    }
    return out;
}

namespace detail {

inline double clip(double v, const GeneBounds& b) { return std::min(b.hi, std::max(b.lo, v)); }

inline void sbx_gene(double x1, double x2, double eta, Rng& rng, double& c1, double& c2,
                     const GeneBounds& bounds) {
    if (x1 == x2 || rng.uniform01() > 0.5) {
        c1 = x1;
        c2 = x2;
        return;
    }
    const double u = rng.uniform01_open();
    const double beta = u <= 0.5 ? std::pow(2.0 * u, 1.0 / (eta + 1.0))
                                 : std::pow(1.0 / (2.0 * (1.0 - u)), 1.0 / (eta + 1.0));
    c1 = clip(0.5 * ((1.0 + beta) * x1 + (1.0 - beta) * x2), bounds);
    c2 = clip(0.5 * ((1.0 - beta) * x1 + (1.0 + beta) * x2), bounds);
}

inline double mutate_gene(double x, double eta, const GeneBounds& b, Rng& rng) {
    const double range = b.hi - b.lo;
    const double u = rng.uniform01_open();
    double delta;
    if (u <= 0.5) {
        const double d1 = (x - b.lo) / range;
        delta = std::pow(2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - d1, eta + 1.0),
                         1.0 / (eta + 1.0)) -
                1.0;
    } else {
        const double d2 = (b.hi - x) / range;
        delta = 1.0 - std::pow(2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - d2, eta + 1.0),
                               1.0 / (eta + 1.0));
    }
    return clip(x + delta * range, b);
}

} // namespace detail

// Simulated binary crossover per gene, children clipped to the search box.
inline std::pair<ImpedanceGains, ImpedanceGains>
crossover_sbx(const ImpedanceGains& a, const ImpedanceGains& b, const OptimizerConfig& cfg,
              Rng& rng) {
    ImpedanceGains c1 = a, c2 = b;
    if (rng.uniform01() <= cfg.crossover_probability) {
        detail::sbx_gene(a.B_y, b.B_y, cfg.crossover_eta, rng, c1.B_y, c2.B_y, cfg.damping_bounds);
        detail::sbx_gene(a.K_y, b.K_y, cfg.crossover_eta, rng, c1.K_y, c2.K_y,
                         cfg.stiffness_bounds);
    }
    return {c1, c2};
}

// Polynomial mutation per gene (bounded variant, so a gene at a bound can
// only move inward).
inline ImpedanceGains mutate_polynomial(const ImpedanceGains& g, const OptimizerConfig& cfg,
                                        Rng& rng) {
    ImpedanceGains out = g;
    if (rng.uniform01() < cfg.mutation_probability)
        out.B_y = detail::mutate_gene(out.B_y, cfg.mutation_eta, cfg.damping_bounds, rng);
    if (rng.uniform01() < cfg.mutation_probability)
        out.K_y = detail::mutate_gene(out.K_y, cfg.mutation_eta, cfg.stiffness_bounds, rng);
    return out;
}

// Keep a passive individual untouched; replace a non-passive one. Resample
// draws uniformly inside the search box until passive (capped, then falls
// back to projection); Project keeps K_y and lifts B_y just above the
// Z-width boundary.
inline ImpedanceGains repair_to_passive(const ImpedanceGains& g, const SystemParams& params,
                                        const OptimizerConfig& cfg, Rng& rng) {
    if (constraint_satisfied(params, g)) return g;
    if (cfg.repair == RepairStrategy::Resample) {
        for (int attempt = 0; attempt < 1000; ++attempt) {
            ImpedanceGains candidate{rng.uniform(cfg.damping_bounds.lo, cfg.damping_bounds.hi),
                                     rng.uniform(cfg.stiffness_bounds.lo, cfg.stiffness_bounds.hi)};
            if (constraint_satisfied(params, candidate)) return candidate;
        }
    }
    ImpedanceGains projected{detail::clip(z_width_boundary_at(params, g.K_y) * (1.0 + 1e-3),
                                          cfg.damping_bounds),
                             g.K_y};
    if (!constraint_satisfied(params, projected))
        throw RepairFailed("projection onto the Z-width boundary is not passive");
    return projected;
}

// Per-generation population snapshot with redundant summary statistics
// (population mean/deviation), recomputable from the individual list.
struct GenerationRecord {
    int generation = 0;
    std::vector<Individual> population;
    double mean_damping = 0.0, std_damping = 0.0;
    double mean_stiffness = 0.0, std_stiffness = 0.0;
    double mean_tau_rms = 0.0, std_tau_rms = 0.0;
    double mean_t_total = 0.0, std_t_total = 0.0;
};

inline GenerationRecord make_generation_record(int generation,
                                               const std::vector<Individual>& pop) {
    GenerationRecord rec;
    rec.generation = generation;
    rec.population = pop;
    auto stats = [&](auto key, double& mean, double& dev) {
        double sum = 0.0;
        for (const auto& ind : pop) sum += key(ind);
        mean = sum / static_cast<double>(pop.size());
        double var = 0.0;
        for (const auto& ind : pop) {
            const double d = key(ind) - mean;
            var += d * d;
        }
        dev = std::sqrt(var / static_cast<double>(pop.size()));
    };
    stats([](const Individual& i) { return i.gains.B_y; }, rec.mean_damping, rec.std_damping);
    stats([](const Individual& i) { return i.gains.K_y; }, rec.mean_stiffness,
          rec.std_stiffness);
    stats([](const Individual& i) { return i.fitness.tau_rms; }, rec.mean_tau_rms,
          rec.std_tau_rms);
    stats([](const Individual& i) { return i.fitness.t_total; }, rec.mean_t_total,
          rec.std_t_total);
    return rec;
}

// One NSGA-II iteration: produce offspring from the sorted parents, repair
// when constrained, evaluate, then (mu+lambda) truncation by
// (rank, crowding) back to the configured population size.
inline std::pair<std::vector<Individual>, GenerationRecord>
evolve_generation(std::vector<Individual> parents, const Evaluator& evaluate,
                  const OptimizerConfig& cfg, const SystemParams& params, Rng& rng,
                  int generation) {
    assign_ranks_and_crowding(parents);

    std::vector<Individual> offspring;
    offspring.reserve(cfg.population_size);
    while (static_cast<int>(offspring.size()) < cfg.population_size) {
        const std::size_t ia = tournament_select(parents, cfg.tournament_size, rng);
        const std::size_t ib = tournament_select(parents, cfg.tournament_size, rng);
        auto [c1, c2] = crossover_sbx(parents[ia].gains, parents[ib].gains, cfg, rng);
        for (ImpedanceGains child : {c1, c2}) {
            if (static_cast<int>(offspring.size()) >= cfg.population_size) break;
            child = mutate_polynomial(child, cfg, rng);
            if (cfg.constrained) child = repair_to_passive(child, params, cfg, rng);
            offspring.push_back(Individual{child});
        }
    }
    for (std::size_t k = 0; k < offspring.size(); ++k) {
        const std::uint64_t eval_seed =
            Rng::derive(cfg.seed, static_cast<std::uint64_t>(generation), k);
        offspring[k].fitness = evaluate(offspring[k].gains, eval_seed);
        offspring[k].evaluated = true;
    }

    std::vector<Individual> combined = std::move(parents);
    combined.insert(combined.end(), offspring.begin(), offspring.end());
    auto fronts = non_dominated_sort(combined);
    for (const auto& front : fronts) crowding_distance(combined, front);

    std::vector<Individual> next;
    next.reserve(cfg.population_size);
    for (const auto& front : fronts) {
        if (static_cast<int>(next.size() + front.size()) <= cfg.population_size) {
            for (std::size_t i : front) next.push_back(combined[i]);
        } else {
            std::vector<std::size_t> order(front);
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return combined[a].crowding > combined[b].crowding;
            });
            for (std::size_t i : order) {
                if (static_cast<int>(next.size()) >= cfg.population_size) break;
                next.push_back(combined[i]);
            }
        }
        if (static_cast<int>(next.size()) >= cfg.population_size) break;
    }
    assign_ranks_and_crowding(next);
    return {next, make_generation_record(generation, next)};
}

// Snapshot at a generation barrier; everything needed for exact resume.
struct OptimizationState {
    int generation = 0; // last completed generation (1-based)
    std::vector<Individual> population;
    std::vector<GenerationRecord> records;
    std::string rng_state;
    std::uint64_t evaluations = 0;
};

using GenerationCallback = std::function<void(const OptimizationState&)>;

struct OptimizationResult {
    std::vector<GenerationRecord> records;
    std::vector<Individual> pareto_front; // first front of the final population
    std::vector<Individual> final_population;
    std::uint64_t evaluations = 0;
};

// Algorithm outer loop. Generation 1 is the evaluated initial population
// (repaired first when constrained); each later generation evaluates one
// offspring batch, so generations x population_size evaluations total.
// The callback fires at every generation barrier; `resume` continues a run
// from such a snapshot bit-identically.
inline OptimizationResult run_optimization(const OptimizerConfig& cfg, const SystemParams& params,
                                           const Evaluator& evaluate,
                                           const GenerationCallback& on_generation = nullptr,
                                           const OptimizationState* resume = nullptr) {
    cfg.validate();
    params.validate();

    Rng rng(cfg.seed);
    std::vector<Individual> pop;
    std::vector<GenerationRecord> records;
    std::uint64_t evaluations = 0;
    int start_generation;

    if (resume != nullptr) {
        pop = resume->population;
        records = resume->records;
        evaluations = resume->evaluations;
        rng.deserialize(resume->rng_state);
        start_generation = resume->generation + 1;
    } else {
        pop.reserve(cfg.population_size);
        for (int k = 0; k < cfg.population_size; ++k) {
            ImpedanceGains g{rng.uniform(cfg.damping_bounds.lo, cfg.damping_bounds.hi),
                             rng.uniform(cfg.stiffness_bounds.lo, cfg.stiffness_bounds.hi)};
            if (cfg.constrained) g = repair_to_passive(g, params, cfg, rng);
            pop.push_back(Individual{g});
        }
        for (std::size_t k = 0; k < pop.size(); ++k) {
            pop[k].fitness = evaluate(pop[k].gains, Rng::derive(cfg.seed, 1, k));
            pop[k].evaluated = true;
        }
        evaluations += pop.size();
        assign_ranks_and_crowding(pop);
        records.push_back(make_generation_record(1, pop));
        if (on_generation)
            on_generation({1, pop, records, rng.serialize(), evaluations});
        start_generation = 2;
    }

    for (int gen = start_generation; gen <= cfg.generations; ++gen) {
        auto [next, record] = evolve_generation(std::move(pop), evaluate, cfg, params, rng, gen);
        pop = std::move(next);
        evaluations += cfg.population_size;
        records.push_back(std::move(record));
        if (on_generation)
            on_generation({gen, pop, records, rng.serialize(), evaluations});
    }

    OptimizationResult result;
    result.records = std::move(records);
    result.final_population = pop;
    auto fronts = non_dominated_sort(pop);
    if (!fronts.empty())
        for (std::size_t i : fronts.front()) result.pareto_front.push_back(pop[i]);
    result.evaluations = evaluations;
    return result;
}

// Exact 2-D hypervolume (minimization) by sorted sweep. The reference must
// be strictly worse than every front member in both objectives.
inline double hypervolume_2d(const std::vector<std::pair<double, double>>& front,
                             std::pair<double, double> reference) {
    if (front.empty()) return 0.0;
    for (const auto& p : front)
        if (!(p.first < reference.first) || !(p.second < reference.second))
            throw InvalidReference("hypervolume_2d: reference must strictly upper-bound the front");
    std::vector<std::pair<double, double>> pts(front);
    std::sort(pts.begin(), pts.end());
    double hv = 0.0;
    double ceiling = reference.second;
    for (const auto& [f1, f2] : pts) {
        if (f2 < ceiling) {
            hv += (reference.first - f1) * (ceiling - f2);
            ceiling = f2;
        }
    }
    return hv;
}

} // namespace wristopt
