#pragma once

#include <utility>

#include "wristopt/polynomial.hpp"
#include "wristopt/system.hpp"
#include "wristopt/transfer_function.hpp"

namespace wristopt {

// Closed-loop model of the one-DOF admittance-controlled handler.
//
// Blocks: handler G(s) = 1/(J s^2), position controller C(s) = (D s + P) k_r,
// and the admittance path that turns measured interaction torque into a
// correction on the tracked position. With q^d = 0 the loop presents the
// interaction port impedance
//
//   Z(s) = [J s^2 + (D s + P) k_r](B_y s + K_y)
//          -------------------------------------------
//          s [D k_r s^2 + (B_y + P k_r) s + K_y]
//
// which is what the passivity analysis and the optimizer constraint run on.
// That impedance results when the correction block is s/(B_y s + K_y), i.e.
// the *velocity* of a virtual spring-damper node driven by the torque; the
// node position filter 1/(B_y s + K_y) is exposed separately.

inline RationalTransferFunction plant_tf(const SystemParams& p) {
    p.validate();
    return {{1.0}, {0.0, 0.0, p.J}};
}

inline RationalTransferFunction position_controller_tf(const SystemParams& p) {
    p.validate();
    return {{p.P * p.k_r, p.D * p.k_r}, {1.0}};
}

// Virtual spring-damper node position per unit torque: 1/(B_y s + K_y).
// DC compliance 1/K_y, high-frequency rolloff 1/(B_y w).
inline RationalTransferFunction admittance_filter_tf(const ImpedanceGains& g) {
    g.validate();
    return {{1.0}, {g.K_y, g.B_y}};
}

// Correction block feeding the tracked position: s/(B_y s + K_y), the
// spring-damper node velocity. This is the admittance Y(s) of the virtual
// spring-damper (torque to velocity).
inline RationalTransferFunction admittance_tf(const ImpedanceGains& g) {
    g.validate();
    return {{0.0, 1.0}, {g.K_y, g.B_y}};
}

// Port impedance Z(s) = -tau_e/(s q), coefficients expanded exactly.
inline RationalTransferFunction impedance_tf(const SystemParams& p, const ImpedanceGains& g) {
    p.validate();
    g.validate();
    const double Pk = p.P * p.k_r;
    const double Dk = p.D * p.k_r;
    // (J s^2 + D k_r s + P k_r)(B_y s + K_y)
    poly::Coeffs num = {Pk * g.K_y, Dk * g.K_y + Pk * g.B_y, p.J * g.K_y + Dk * g.B_y,
                        p.J * g.B_y};
    // s (D k_r s^2 + (B_y + P k_r) s + K_y)
    poly::Coeffs den = {0.0, g.K_y, g.B_y + Pk, Dk};
    return {std::move(num), std::move(den)};
}

// The two closed-loop position responses, common factors cancelled:
//   q/q^d      = GC/(1+GC)
//   q/(-tau_e) = G(1+CY)/(1+GC),  Y = s/(B_y s + K_y)
struct ClosedLoopResponses {
    RationalTransferFunction command;     // q / q^d
    RationalTransferFunction disturbance; // q / (-tau_e)
};

inline ClosedLoopResponses closed_loop_position_tf(const SystemParams& p,
                                                   const ImpedanceGains& g) {
    p.validate();
    g.validate();
    const double Pk = p.P * p.k_r;
    const double Dk = p.D * p.k_r;
    RationalTransferFunction command({Pk, Dk}, {Pk, Dk, p.J});
    // (D k_r s^2 + (B_y + P k_r) s + K_y) / [(J s^2 + D k_r s + P k_r)(B_y s + K_y)]
    RationalTransferFunction disturbance(
        {g.K_y, g.B_y + Pk, Dk},
        poly::mul({Pk, Dk, p.J}, {g.K_y, g.B_y}));
    return {std::move(command), std::move(disturbance)};
}

} // namespace wristopt
