#pragma once

#include <stdexcept>

namespace wristopt {

// Target-reaching protocol: targets alternate at +/- amplitude (flexion then
// extension), the handler must stay inside the tolerance band around the
// target for dwell_time continuously. One movement = one full flexion +
// extension pair.
struct TaskSpec {
    double amplitude = 0.6;        // rad
    double dwell_time = 2.0;       // s
    double tolerance_band = 0.1;   // rad
    int movements_per_trial = 1;   // flexion+extension pairs
    double movement_timeout = 15.0; // s, per reach

    void validate() const {
        if (!(amplitude > 0.0)) throw std::invalid_argument("TaskSpec: amplitude must be > 0");
        if (!(dwell_time > 0.0)) throw std::invalid_argument("TaskSpec: dwell time must be > 0");
        if (!(tolerance_band > 0.0))
            throw std::invalid_argument("TaskSpec: tolerance band must be > 0");
        if (movements_per_trial < 1)
            throw std::invalid_argument("TaskSpec: movements per trial must be >= 1");
        if (!(movement_timeout > dwell_time))
            throw std::invalid_argument("TaskSpec: timeout must exceed dwell time");
    }
};

} // namespace wristopt
