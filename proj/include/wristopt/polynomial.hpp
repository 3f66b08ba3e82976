#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace wristopt {

// Dense real polynomial in ascending powers: coeffs[k] multiplies s^k.
// Degrees in this project stay tiny (<= 4), so no sparse representation.
namespace poly {

using Coeffs = std::vector<double>;

inline Coeffs trimmed(Coeffs c) {
    while (c.size() > 1 && c.back() == 0.0) c.pop_back();
    return c;
}

inline bool is_zero(const Coeffs& c) {
    for (double v : c)
        if (v != 0.0) return false;
    return true;
}

inline std::size_t degree(const Coeffs& c) {
    std::size_t d = 0;
    for (std::size_t k = 0; k < c.size(); ++k)
        if (c[k] != 0.0) d = k;
    return d;
}

inline Coeffs add(const Coeffs& a, const Coeffs& b) {
    Coeffs out(std::max(a.size(), b.size()), 0.0);
    for (std::size_t k = 0; k < a.size(); ++k) out[k] += a[k];
    for (std::size_t k = 0; k < b.size(); ++k) out[k] += b[k];
    return out;
}

inline Coeffs scale(Coeffs a, double f) {
    for (double& v : a) v *= f;
    return a;
}

inline Coeffs mul(const Coeffs& a, const Coeffs& b) {
    if (a.empty() || b.empty()) return {0.0};
    Coeffs out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            out[i + j] += a[i] * b[j];
    return out;
}

inline std::complex<double> eval(const Coeffs& c, std::complex<double> s) {
    // Horner, highest power first
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t k = c.size(); k-- > 0;)
        acc = acc * s + c[k];
    return acc;
}

inline double eval(const Coeffs& c, double s) {
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 0;)
        acc = acc * s + c[k];
    return acc;
}

} // namespace poly
} // namespace wristopt
