#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace wristopt {

// Parametric wrist model standing in for the human: a spring-damper intent
// drive toward the current target,
//
//   u = sat( intent_gain * K_h * (target - q) - B_h * qdot + noise ),
//
// passed through a first-order neuromuscular activation lag (time constant
// reaction_delay) before it acts on the handler. The lag is what keeps the
// coupled sample-rate loop well posed at low admittance damping, where the
// closed loop has a steep torque-rate feedthrough.
struct HumanModel {
    double K_h = 2.0;             // wrist stiffness, N m/rad
    double B_h = 0.1;             // wrist damping, N m s/rad
    double intent_gain = 1.0;     // scale of drive toward the target
    double torque_saturation = 4.0; // N m
    double reaction_delay = 0.06; // s, activation lag time constant (0 = direct)
    double noise_amplitude = 0.0; // N m, uniform in [-a, a]; 0 disables

    void validate() const {
        if (!(K_h >= 0.0)) throw std::invalid_argument("HumanModel: K_h must be >= 0");
        if (!(B_h >= 0.0)) throw std::invalid_argument("HumanModel: B_h must be >= 0");
        if (!(torque_saturation > 0.0))
            throw std::invalid_argument("HumanModel: torque saturation must be > 0");
        if (!(reaction_delay >= 0.0))
            throw std::invalid_argument("HumanModel: reaction delay must be >= 0");
        if (!(noise_amplitude >= 0.0))
            throw std::invalid_argument("HumanModel: noise amplitude must be >= 0");
    }
};

struct SubjectProfile {
    std::string name;
    HumanModel model;
};

// Three shipped profiles: subject 1 distinctly stiffer and slower to react,
// subjects 2 and 3 similar to each other. Values tuned so that each profile
// reaches a visibly different optimal controller region.
inline std::vector<SubjectProfile> default_subject_profiles() {
    return {
        {"subject1-stiff", HumanModel{12.0, 0.02, 1.0, 4.0, 0.13, 0.02}},
        {"subject2-compliant", HumanModel{2.0, 0.20, 1.0, 4.0, 0.06, 0.02}},
        {"subject3-mid", HumanModel{3.0, 0.15, 1.0, 4.0, 0.06, 0.02}},
    };
}

inline HumanModel subject_profile(const std::string& name) {
    for (const auto& p : default_subject_profiles())
        if (p.name == name) return p.model;
    throw std::invalid_argument("unknown subject profile: " + name);
}

} // namespace wristopt
