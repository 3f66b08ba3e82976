#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "wristopt/errors.hpp"
#include "wristopt/model.hpp"
#include "wristopt/system.hpp"
#include "wristopt/trace.hpp"

namespace wristopt {

// Three-way passivity decision for a candidate controller:
//   1. pole stability of Z(s),
//   2. frequency-domain positive-realness Re[Z(jw)] >= 0 (numeric sweep),
//   3. the closed-form sufficient criterion B_y^2 D + K_y (J P - D^2 k_r) > 0.
// The optimizer constraint uses 1 and 3 (exact and cheap); the sweep is the
// verification oracle.

struct PassivityVerdict {
    bool stable = false;
    bool positive_real = false;
    bool sufficient_criterion = false;
    double worst_frequency = std::numeric_limits<double>::quiet_NaN();
    double worst_real_part = std::numeric_limits<double>::quiet_NaN();
};

struct FrequencyGrid {
    double omega_min = 1e-3; // rad/s, > 0
    double omega_max = 1e5;
    int points = 2000; // log-spaced
};

// Tolerance separating true Re[Z] violations from floating-point noise.
inline constexpr double kPassivityTolerance = 1e-9;

// Poles of Z(s): {0, s2, s3} with s2,3 the roots of
// D k_r s^2 + (B_y + P k_r) s + K_y. Complex-conjugate pair when the
// discriminant is negative.
inline std::vector<std::complex<double>> impedance_poles(const SystemParams& p,
                                                         const ImpedanceGains& g) {
    p.validate();
    g.validate();
    const double a = p.D * p.k_r;
    const double b = g.B_y + p.P * p.k_r;
    const double c = g.K_y;
    std::vector<std::complex<double>> poles;
    poles.emplace_back(0.0, 0.0);
    const double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
        // all coefficients positive, so b > 0; avoid cancellation in the small root
        const double qf = -0.5 * (b + std::sqrt(disc));
        poles.emplace_back(c / qf, 0.0); // slow pole first
        poles.emplace_back(qf / a, 0.0);
    } else {
        const double re = -b / (2.0 * a);
        const double im = std::sqrt(-disc) / (2.0 * a);
        poles.emplace_back(re, im);
        poles.emplace_back(re, -im);
    }
    return poles;
}

// Condition 1: no poles in the open right half-plane, origin pole simple.
inline bool stability_condition(const SystemParams& p, const ImpedanceGains& g) {
    const auto poles = impedance_poles(p, g);
    // the origin pole is simple as long as the quadratic's constant term K_y != 0
    if (!(g.K_y > 0.0)) return false;
    for (std::size_t k = 1; k < poles.size(); ++k)
        if (!(poles[k].real() < 0.0)) return false;
    return true;
}

// Closed-form sufficient criterion for Re[Z(jw)] >= 0, evaluated in extended
// precision to avoid cancellation near the boundary.
inline bool sufficient_criterion(const SystemParams& p, const ImpedanceGains& g) {
    p.validate();
    g.validate();
    const long double v = static_cast<long double>(g.B_y) * g.B_y * p.D +
                          static_cast<long double>(g.K_y) *
                              (static_cast<long double>(p.J) * p.P -
                               static_cast<long double>(p.D) * p.D * p.k_r);
    return v > 0.0L;
}

// The constraint the optimizer enforces per offspring.
inline bool constraint_satisfied(const SystemParams& p, const ImpedanceGains& g) {
    return stability_condition(p, g) && sufficient_criterion(p, g);
}

struct SweepResult {
    bool positive_real = false;
    double worst_frequency = 0.0;
    double worst_real_part = 0.0;
};

namespace detail {

inline double real_part_at(const RationalTransferFunction& z, double w) {
    // near-pole frequencies are skipped by nudging; the surrounding grid
    // still brackets any genuine negative-real region
    for (int attempt = 0; attempt < 8; ++attempt) {
        try {
            return evaluate_tf(z, w).value.real();
        } catch (const PoleAtFrequency&) {
            w *= 1.0 + 1e-9 * (attempt + 1);
        }
    }
    throw GridTooCoarse("could not evaluate Re[Z] near a pole");
}

} // namespace detail

// Condition 2 check: Re[Z(jw)] on a log-spaced grid, then golden-section
// refinement around the grid minimum.
inline SweepResult positive_real_sweep(const SystemParams& p, const ImpedanceGains& g,
                                       const FrequencyGrid& grid = {}) {
    if (!(grid.omega_min > 0.0) || !(grid.omega_max > grid.omega_min) || grid.points < 2)
        throw std::invalid_argument("positive_real_sweep: bad frequency grid");
    const auto z = impedance_tf(p, g);
    const double lmin = std::log(grid.omega_min);
    const double step = (std::log(grid.omega_max) - lmin) / (grid.points - 1);

    double worst_w = grid.omega_min;
    double worst_re = std::numeric_limits<double>::infinity();
    int worst_idx = 0;
    for (int i = 0; i < grid.points; ++i) {
        const double w = std::exp(lmin + step * i);
        const double re = detail::real_part_at(z, w);
        if (re < worst_re) {
            worst_re = re;
            worst_w = w;
            worst_idx = i;
        }
    }

    // refine inside the bracketing grid cells
    double lo = std::exp(lmin + step * std::max(0, worst_idx - 1));
    double hi = std::exp(lmin + step * std::min(grid.points - 1, worst_idx + 1));
    constexpr double invphi = 0.6180339887498949;
    double x1 = hi - invphi * (hi - lo);
    double x2 = lo + invphi * (hi - lo);
    double f1 = detail::real_part_at(z, x1);
    double f2 = detail::real_part_at(z, x2);
    int it = 0;
    for (; it < 100 && hi - lo > 1e-12 * hi; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = detail::real_part_at(z, x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = detail::real_part_at(z, x2);
        }
        if (std::min(f1, f2) < worst_re) {
            worst_re = std::min(f1, f2);
            worst_w = (f1 < f2) ? x1 : x2;
        }
    }
    if (it >= 100)
        throw GridTooCoarse("positive_real_sweep: refinement did not converge");

    return {worst_re >= -kPassivityTolerance, worst_w, worst_re};
}

// Combined verdict. The sweep can be skipped (with_sweep = false), in which
// case positive_real is implied from the sufficient criterion.
inline PassivityVerdict is_passive(const SystemParams& p, const ImpedanceGains& g,
                                   bool with_sweep = true, const FrequencyGrid& grid = {}) {
    PassivityVerdict v;
    v.stable = stability_condition(p, g);
    v.sufficient_criterion = sufficient_criterion(p, g);
    if (with_sweep) {
        const auto sweep = positive_real_sweep(p, g, grid);
        v.positive_real = sweep.positive_real;
        v.worst_frequency = sweep.worst_frequency;
        v.worst_real_part = sweep.worst_real_part;
    } else {
        v.positive_real = v.stable && v.sufficient_criterion;
    }
    return v;
}

// Z-width boundary of the passive region: minimal passive B_y per K_y.
// Equality case of the sufficient criterion; zero when J P >= D^2 k_r
// (the whole positive quadrant is passive).
struct ZWidthCurve {
    std::vector<double> stiffness;        // K_y samples, strictly increasing
    std::vector<double> boundary_damping; // minimal passive B_y per sample
};

inline double z_width_boundary_at(const SystemParams& p, double stiffness) {
    const double margin = p.D * p.D * p.k_r - p.J * p.P;
    if (margin <= 0.0) return 0.0;
    return std::sqrt(stiffness * margin / p.D);
}

inline ZWidthCurve z_width_boundary(const SystemParams& p, double k_min, double k_max,
                                    int samples) {
    p.validate();
    if (!(k_min > 0.0) || !(k_max > k_min) || samples < 2)
        throw std::invalid_argument("z_width_boundary: need 0 < K_min < K_max and n >= 2");
    ZWidthCurve curve;
    curve.stiffness.reserve(samples);
    curve.boundary_damping.reserve(samples);
    const double step = (k_max - k_min) / (samples - 1);
    for (int i = 0; i < samples; ++i) {
        const double k = k_min + step * i;
        curve.stiffness.push_back(k);
        curve.boundary_damping.push_back(z_width_boundary_at(p, k));
    }
    return curve;
}

// Running energy E(t_k) supplied through the interaction port (input tau_e,
// output qdot), trapezoidal rule; beta_hat = max(0, -min_k E). A passive
// port keeps beta_hat bounded no matter how long the trace runs.
struct EnergyObservation {
    std::vector<double> energy; // J, one entry per trace sample
    double beta_hat = 0.0;
};

inline EnergyObservation energy_observer(double dt, std::span<const double> tau_e,
                                         std::span<const double> qdot) {
    if (tau_e.empty() || tau_e.size() != qdot.size())
        throw EmptyTrace("energy_observer: empty or mismatched channels");
    EnergyObservation obs;
    obs.energy.reserve(tau_e.size());
    double e = 0.0;
    double min_e = 0.0;
    double prev = tau_e[0] * qdot[0];
    obs.energy.push_back(0.0);
    for (std::size_t k = 1; k < tau_e.size(); ++k) {
        const double cur = tau_e[k] * qdot[k];
        e += 0.5 * (prev + cur) * dt;
        prev = cur;
        obs.energy.push_back(e);
        min_e = std::min(min_e, e);
    }
    obs.beta_hat = std::max(0.0, -min_e);
    return obs;
}

inline EnergyObservation energy_observer(const SimulationTrace& trace) {
    if (trace.empty()) throw EmptyTrace("energy_observer: empty trace");
    return energy_observer(trace.timestep, trace.tau_e, trace.qdot);
}

} // namespace wristopt
