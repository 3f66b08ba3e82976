#pragma once

#include <cstddef>
#include <vector>

namespace wristopt {

// Time series of one simulated reach or trial, uniform timestep. All
// channels share the same length; time is implicit (k * timestep).
struct SimulationTrace {
    double timestep = 1e-3;
    std::vector<double> q;          // handler angle, rad
    std::vector<double> qdot;       // rad/s
    std::vector<double> tau_e;      // interaction torque, N m
    std::vector<double> tau_M;      // motor torque, N m
    std::vector<double> q_Y;        // admittance correction fed to the tracked position
    std::vector<double> target;     // current target, rad
    std::vector<double> dwell_flag; // 1 while inside the tolerance band

    std::size_t size() const { return q.size(); }
    bool empty() const { return q.empty(); }
    double time_at(std::size_t k) const { return static_cast<double>(k + 1) * timestep; }

    void append(double q_, double qdot_, double tau_e_, double tau_M_, double q_Y_,
                double target_, bool dwell_) {
        q.push_back(q_);
        qdot.push_back(qdot_);
        tau_e.push_back(tau_e_);
        tau_M.push_back(tau_M_);
        q_Y.push_back(q_Y_);
        target.push_back(target_);
        dwell_flag.push_back(dwell_ ? 1.0 : 0.0);
    }

    void extend(const SimulationTrace& other) {
        q.insert(q.end(), other.q.begin(), other.q.end());
        qdot.insert(qdot.end(), other.qdot.begin(), other.qdot.end());
        tau_e.insert(tau_e.end(), other.tau_e.begin(), other.tau_e.end());
        tau_M.insert(tau_M.end(), other.tau_M.begin(), other.tau_M.end());
        q_Y.insert(q_Y.end(), other.q_Y.begin(), other.q_Y.end());
        target.insert(target.end(), other.target.begin(), other.target.end());
        dwell_flag.insert(dwell_flag.end(), other.dwell_flag.begin(), other.dwell_flag.end());
    }
};

} // namespace wristopt
