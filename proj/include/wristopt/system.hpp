#pragma once

#include <stdexcept>
#include <string>

namespace wristopt {

// Fixed plant and position-controller context: handler inertia J [kg m^2],
// gear ratio k_r [-], proportional gain P [N m/rad] and derivative gain
// D [N m s/rad], both pre-gear. All strictly positive.
struct SystemParams {
    double J = 0.005;
    double k_r = 3.5;
    double P = 0.02;
    double D = 0.5;

    void validate() const {
        if (!(J > 0.0)) throw std::invalid_argument("SystemParams: J must be > 0");
        if (!(k_r > 0.0)) throw std::invalid_argument("SystemParams: k_r must be > 0");
        if (!(P > 0.0)) throw std::invalid_argument("SystemParams: P must be > 0");
        if (!(D > 0.0)) throw std::invalid_argument("SystemParams: D must be > 0");
    }
};

// One optimized individual: admittance damping B_y [N m s/rad] and
// stiffness K_y [N m/rad], both strictly positive.
struct ImpedanceGains {
    double B_y = 50.0;
    double K_y = 100.0;

    void validate() const {
        if (!(B_y > 0.0)) throw std::invalid_argument("ImpedanceGains: B_y must be > 0");
        if (!(K_y > 0.0)) throw std::invalid_argument("ImpedanceGains: K_y must be > 0");
    }

    bool operator==(const ImpedanceGains&) const = default;
};

inline SystemParams default_system_params() { return SystemParams{}; }

// Fixed reference controller used by the benchmark protocol.
inline ImpedanceGains benchmark_gains() { return ImpedanceGains{50.0, 100.0}; }

} // namespace wristopt
