#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "wristopt/errors.hpp"
#include "wristopt/polynomial.hpp"

namespace wristopt {

// Response of a transfer function at s = jw.
struct ComplexResponse {
    double frequency = 0.0; // rad/s, >= 0
    std::complex<double> value{0.0, 0.0};
};

// Ratio of real-coefficient polynomials in the Laplace variable, ascending
// powers. The denominator must not be the zero polynomial.
class RationalTransferFunction {
public:
    RationalTransferFunction() : num_{0.0}, den_{1.0} {}

    RationalTransferFunction(poly::Coeffs numerator, poly::Coeffs denominator)
        : num_(poly::trimmed(std::move(numerator))), den_(poly::trimmed(std::move(denominator))) {
        if (poly::is_zero(den_))
            throw std::invalid_argument("transfer function denominator is the zero polynomial");
    }

    const poly::Coeffs& numerator() const { return num_; }
    const poly::Coeffs& denominator() const { return den_; }

    std::size_t numerator_degree() const { return poly::degree(num_); }
    std::size_t denominator_degree() const { return poly::degree(den_); }

    bool is_proper() const { return numerator_degree() <= denominator_degree(); }

    // Value at s = 0; denominator roots at the origin make this meaningless,
    // callers check has_pole_at_origin() first when that matters.
    double dc_gain() const { return num_.front() / den_.front(); }

    bool has_pole_at_origin() const { return den_.front() == 0.0 && num_.front() != 0.0; }

    std::complex<double> at(std::complex<double> s) const {
        return poly::eval(num_, s) / poly::eval(den_, s);
    }

    RationalTransferFunction operator*(const RationalTransferFunction& o) const {
        return {poly::mul(num_, o.num_), poly::mul(den_, o.den_)};
    }

    RationalTransferFunction operator+(const RationalTransferFunction& o) const {
        return {poly::add(poly::mul(num_, o.den_), poly::mul(o.num_, den_)),
                poly::mul(den_, o.den_)};
    }

    RationalTransferFunction inverse() const {
        return {den_, num_};
    }

    static RationalTransferFunction constant(double k) { return {{k}, {1.0}}; }

    // s as a transfer function, for assembling block diagrams.
    static RationalTransferFunction differentiator() { return {{0.0, 1.0}, {1.0}}; }
    static RationalTransferFunction integrator() { return {{1.0}, {0.0, 1.0}}; }

private:
    poly::Coeffs num_;
    poly::Coeffs den_;
};

// Evaluates tf at s = jw via Horner on both polynomials. Throws
// PoleAtFrequency when the denominator magnitude drops below 1e-12, which
// tells a frequency sweep to skip or refine near this w.
inline ComplexResponse evaluate_tf(const RationalTransferFunction& tf, double frequency) {
    const std::complex<double> s(0.0, frequency);
    const std::complex<double> den = poly::eval(tf.denominator(), s);
    if (std::abs(den) < 1e-12)
        throw PoleAtFrequency(frequency);
    return {frequency, poly::eval(tf.numerator(), s) / den};
}

} // namespace wristopt
