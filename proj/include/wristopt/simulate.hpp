#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "wristopt/errors.hpp"
#include "wristopt/human.hpp"
#include "wristopt/rng.hpp"
#include "wristopt/system.hpp"
#include "wristopt/task.hpp"
#include "wristopt/trace.hpp"

namespace wristopt {

// Fixed-step simulation of the closed loop coupled to the wrist model.
//
// Robot states: handler (q, qdot) and the admittance filter node x with
// B_y xdot + K_y x = tau_e. The correction fed to the tracked position is
// the node velocity q_Y = xdot = (tau_e - K_y x)/B_y, which makes the
// loop's interaction-port impedance exactly the analysed Z(s). The filter
// is advanced by its exact discretization; the plant
//
//   J qddot = tau_M + tau_e,  tau_M = (D ed_q + P e_q) k_r,
//   e_q = q^d + q_Y - q (q^d = 0), ed_q = qdot_Y - qdot
//
// by RK4 with the filter signals evaluated in closed form at the substep
// times. The loop has a torque-rate feedthrough into qdot with gain
// D k_r/(J B_y) (the s->infinity limit of the closed-loop admittance);
// under zero-order-held tau_e it appears as a velocity increment per
// torque update, applied before the step.

struct SimulationState {
    double q = 0.0;            // handler angle, rad
    double qdot = 0.0;         // rad/s
    double tau_e = 0.0;        // applied interaction torque, N m
    double tau_M = 0.0;        // motor torque, N m
    double q_Y = 0.0;          // admittance correction on the tracked position
    double e_q = 0.0;          // position error = delta_q - q
    double delta_q = 0.0;      // tracked reference = q^d + q_Y
    double filter_state = 0.0; // admittance node position x
    double activation = 0.0;   // human neuromuscular lag state
};

struct FitnessVector {
    double tau_rms = 0.0; // N m
    double t_total = 0.0; // s, mean seconds per flexion+extension movement
    bool feasible = true; // trial completed without timeout or blowup

    bool operator==(const FitnessVector&) const = default;
};

// Fitness assigned when a trial blows up numerically.
inline constexpr double kPenaltyTauRms = 10.0; // N m
inline constexpr double kPenaltyTime = 60.0;   // s

struct ReachOutcome {
    SimulationTrace trace;
    SimulationState final_state;
    double movement_time = 0.0; // s, until dwell completion (or timeout)
    bool completed = false;
};

struct TrialResult {
    std::vector<SimulationTrace> traces; // one per reach, aligned at reach start
    std::vector<double> movement_times;  // s per flexion+extension pair
    FitnessVector fitness;
};

// Root mean square of tau_e over all samples of all traces.
inline double torque_rms(const std::vector<SimulationTrace>& traces) {
    double sum_sq = 0.0;
    std::size_t n = 0;
    for (const auto& t : traces) {
        for (double v : t.tau_e) sum_sq += v * v;
        n += t.size();
    }
    return n > 0 ? std::sqrt(sum_sq / static_cast<double>(n)) : 0.0;
}

class Simulator {
public:
    Simulator(SystemParams params, ImpedanceGains gains, HumanModel human, double dt)
        : params_(params), gains_(gains), human_(human), dt_(dt) {
        params_.validate();
        gains_.validate();
        human_.validate();
        if (!(dt > 0.0)) throw std::invalid_argument("Simulator: dt must be > 0");
        a_ = gains_.K_y / gains_.B_y;
        ea_ = std::exp(-a_ * dt_);
        eah_ = std::exp(-a_ * dt_ / 2.0);
        Pk_ = params_.P * params_.k_r;
        Dk_ = params_.D * params_.k_r;
        kick_ = Dk_ / (params_.J * gains_.B_y);
        lag_ = human_.reaction_delay > 0.0 ? std::exp(-dt_ / human_.reaction_delay) : 0.0;
    }

    double dt() const { return dt_; }
    const ImpedanceGains& gains() const { return gains_; }

    // One step with the wrist model driving the torque.
    SimulationState step(const SimulationState& s, double target, Rng& rng) const {
        double u = human_.intent_gain * human_.K_h * (target - s.q) - human_.B_h * s.qdot;
        if (human_.noise_amplitude > 0.0)
            u += human_.noise_amplitude * (2.0 * rng.uniform01() - 1.0);
        const double sat = human_.torque_saturation;
        u = std::min(sat, std::max(-sat, u));
        const double activation = u + (s.activation - u) * lag_;
        return advance(s, activation, activation);
    }

    // One step with a scripted torque, bypassing the wrist model. Used by
    // frequency-response probing and linearity checks.
    SimulationState step_with_torque(const SimulationState& s, double tau_e) const {
        return advance(s, tau_e, s.activation);
    }

    // Steps until the handler has stayed inside the tolerance band around
    // the target continuously for the dwell time, or until timeout.
    ReachOutcome run_movement(SimulationState state, double target, const TaskSpec& task,
                              Rng& rng) const {
        task.validate();
        const long dwell_needed = static_cast<long>(std::ceil(task.dwell_time / dt_ - 1e-9));
        const long max_steps = static_cast<long>(std::ceil(task.movement_timeout / dt_ - 1e-9));
        ReachOutcome out;
        out.trace.timestep = dt_;
        long dwell = 0;
        for (long k = 1; k <= max_steps; ++k) {
            state = step(state, target, rng);
            const bool in_band = std::abs(state.q - target) <= task.tolerance_band;
            dwell = in_band ? dwell + 1 : 0;
            out.trace.append(state.q, state.qdot, state.tau_e, state.tau_M, state.q_Y, target,
                             in_band);
            if (dwell >= dwell_needed) {
                out.final_state = state;
                out.movement_time = static_cast<double>(k) * dt_;
                out.completed = true;
                return out;
            }
        }
        out.final_state = state;
        out.movement_time = task.movement_timeout;
        out.completed = false;
        return out;
    }

    // Full trial: movements_per_trial flexion+extension pairs with
    // alternating targets, noise stream fixed by the seed. Numerical
    // blowups fold into penalty fitness rather than escaping.
    TrialResult run_trial(const TaskSpec& task, std::uint64_t seed) const {
        task.validate();
        Rng rng(seed);
        TrialResult result;
        SimulationState state;
        bool all_completed = true;
        try {
            for (int m = 0; m < task.movements_per_trial; ++m) {
                double pair_time = 0.0;
                for (double target : {task.amplitude, -task.amplitude}) {
                    ReachOutcome reach = run_movement(state, target, task, rng);
                    state = reach.final_state;
                    pair_time += reach.movement_time;
                    all_completed = all_completed && reach.completed;
                    result.traces.push_back(std::move(reach.trace));
                }
                result.movement_times.push_back(pair_time);
            }
        } catch (const NumericalBlowup&) {
            result.fitness = {kPenaltyTauRms, kPenaltyTime, false};
            return result;
        }
        double time_sum = 0.0;
        for (double t : result.movement_times) time_sum += t;
        result.fitness.tau_rms = torque_rms(result.traces);
        result.fitness.t_total = time_sum / static_cast<double>(result.movement_times.size());
        result.fitness.feasible = all_completed;
        return result;
    }

private:
    SimulationState advance(const SimulationState& s, double tau_e, double activation) const {
        SimulationState n;
        n.activation = activation;
        n.tau_e = tau_e;
        n.filter_state = s.filter_state;

        // torque-rate feedthrough of the held input
        double q = s.q;
        double qdot = s.qdot + kick_ * (tau_e - s.tau_e);

        const double x0 = s.filter_state;
        const double By = gains_.B_y;
        const double Ky = gains_.K_y;
        const double J = params_.J;
        // closed-form filter signals at exp(-a tau) = e
        auto correction = [&](double e) { return (tau_e - Ky * (x0 * e + (tau_e / Ky) * (1.0 - e))) / By; };
        auto accel = [&](double e, double qq, double qq_dot) {
            const double qy = correction(e);
            const double tau_M = (params_.D * (-a_ * qy - qq_dot) + params_.P * (qy - qq)) * params_.k_r;
            return (tau_M + tau_e) / J;
        };

        const double k1q = qdot, k1v = accel(1.0, q, qdot);
        const double k2q = qdot + 0.5 * dt_ * k1v, k2v = accel(eah_, q + 0.5 * dt_ * k1q, qdot + 0.5 * dt_ * k1v);
        const double k3q = qdot + 0.5 * dt_ * k2v, k3v = accel(eah_, q + 0.5 * dt_ * k2q, qdot + 0.5 * dt_ * k2v);
        const double k4q = qdot + dt_ * k3v, k4v = accel(ea_, q + dt_ * k3q, qdot + dt_ * k3v);
        n.q = q + dt_ / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
        n.qdot = qdot + dt_ / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        n.filter_state = x0 * ea_ + (tau_e / Ky) * (1.0 - ea_);

        n.q_Y = correction(ea_);
        n.delta_q = n.q_Y; // q^d = 0
        n.e_q = n.delta_q - n.q;
        n.tau_M = (params_.D * (-a_ * n.q_Y - n.qdot) + params_.P * n.e_q) * params_.k_r;

        // written so NaN also trips it
        if (!(std::abs(n.q) <= 1e6) || !(std::abs(n.qdot) <= 1e6))
            throw NumericalBlowup("simulation state exceeded 1e6");
        return n;
    }

    SystemParams params_;
    ImpedanceGains gains_;
    HumanModel human_;
    double dt_;
    double a_, ea_, eah_, Pk_, Dk_, kick_, lag_;
};

inline TrialResult run_trial(const SystemParams& params, const ImpedanceGains& gains,
                             const HumanModel& human, const TaskSpec& task, double dt,
                             std::uint64_t seed) {
    return Simulator(params, gains, human, dt).run_trial(task, seed);
}

// Robot loop driven by a scripted torque sequence from rest.
inline SimulationTrace simulate_torque_driven(const SystemParams& params,
                                              const ImpedanceGains& gains,
                                              const std::vector<double>& torque, double dt) {
    Simulator sim(params, gains, HumanModel{0.0, 0.0, 0.0, 1.0, 0.0, 0.0}, dt);
    SimulationState state;
    SimulationTrace trace;
    trace.timestep = dt;
    for (double tau : torque) {
        state = sim.step_with_torque(state, tau);
        trace.append(state.q, state.qdot, state.tau_e, state.tau_M, state.q_Y, 0.0, false);
    }
    return trace;
}

// Pointwise mean and population deviation of tau_e across traces, aligned at
// movement start and clipped to `clip` seconds (or the shortest trace).
struct TorqueProfile {
    double timestep = 1e-3;
    std::vector<double> mean;
    std::vector<double> deviation;
};

inline TorqueProfile torque_profile_stats(const std::vector<SimulationTrace>& traces,
                                          double clip) {
    if (traces.empty()) throw EmptyInput("torque_profile_stats: no traces");
    if (!(clip > 0.0)) throw std::invalid_argument("torque_profile_stats: clip must be > 0");
    const double dt = traces.front().timestep;
    std::size_t n = static_cast<std::size_t>(std::floor(clip / dt + 1e-9));
    for (const auto& t : traces) n = std::min(n, t.size());
    if (n == 0) throw EmptyInput("torque_profile_stats: empty traces");
    TorqueProfile p;
    p.timestep = dt;
    p.mean.resize(n);
    p.deviation.resize(n);
    const double m = static_cast<double>(traces.size());
    for (std::size_t k = 0; k < n; ++k) {
        double sum = 0.0;
        for (const auto& t : traces) sum += t.tau_e[k];
        const double mu = sum / m;
        double var = 0.0;
        for (const auto& t : traces) {
            const double d = t.tau_e[k] - mu;
            var += d * d;
        }
        p.mean[k] = mu;
        p.deviation[k] = std::sqrt(var / m);
    }
    return p;
}

} // namespace wristopt
