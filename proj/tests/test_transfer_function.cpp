#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "wristopt/rng.hpp"
#include "wristopt/transfer_function.hpp"

using namespace wristopt;
using Catch::Approx;

TEST_CASE("polynomial evaluation is Horner on ascending coefficients") {
    // 1 + 2s + 3s^2 at s = 2
    CHECK(poly::eval({1.0, 2.0, 3.0}, 2.0) == Approx(17.0));
    const auto v = poly::eval({1.0, 2.0, 3.0}, std::complex<double>(0.0, 1.0));
    CHECK(v.real() == Approx(-2.0));
    CHECK(v.imag() == Approx(2.0));
}

TEST_CASE("evaluate_tf matches hand values") {
    SECTION("1/s at w=1 gives -j") {
        RationalTransferFunction tf({1.0}, {0.0, 1.0});
        const auto r = evaluate_tf(tf, 1.0);
        CHECK(r.value.real() == Approx(0.0).margin(1e-15));
        CHECK(r.value.imag() == Approx(-1.0));
    }
    SECTION("1/(J s^2), J=1, w=2 gives -0.25") {
        RationalTransferFunction tf({1.0}, {0.0, 0.0, 1.0});
        const auto r = evaluate_tf(tf, 2.0);
        CHECK(r.value.real() == Approx(-0.25));
        CHECK(r.value.imag() == Approx(0.0).margin(1e-15));
    }
    SECTION("constants are flat in frequency") {
        const auto tf = RationalTransferFunction::constant(3.25);
        for (double w : {0.0, 0.5, 10.0, 1e4})
            CHECK(evaluate_tf(tf, w).value == std::complex<double>(3.25, 0.0));
    }
}

TEST_CASE("evaluate_tf reports poles on the grid") {
    RationalTransferFunction tf({1.0}, {0.0, 1.0}); // 1/s
    CHECK_THROWS_AS(evaluate_tf(tf, 1e-13), PoleAtFrequency);
}

TEST_CASE("denominator must not be the zero polynomial") {
    CHECK_THROWS_AS(RationalTransferFunction({1.0}, {0.0, 0.0}), std::invalid_argument);
    // trailing zeros trim away, leading coefficient stays nonzero
    RationalTransferFunction tf({1.0, 0.0, 0.0}, {2.0, 1.0, 0.0});
    CHECK(tf.denominator().size() == 2);
    CHECK(tf.numerator_degree() == 0);
}

TEST_CASE("real-coefficient responses have even Re and odd Im in w") {
    Rng rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        RationalTransferFunction tf(
            {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)},
            {rng.uniform(0.5, 2), rng.uniform(0.5, 2), rng.uniform(0.5, 2)});
        const double w = rng.uniform(0.01, 100.0);
        const auto plus = tf.at({0.0, w});
        const auto minus = tf.at({0.0, -w});
        CHECK(plus.real() == Approx(minus.real()));
        CHECK(plus.imag() == Approx(-minus.imag()));
    }
}

TEST_CASE("rational algebra agrees with complex arithmetic at sample points") {
    Rng rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        RationalTransferFunction a({rng.uniform(-2, 2), rng.uniform(-2, 2)},
                                   {rng.uniform(0.5, 2), rng.uniform(0.5, 2)});
        RationalTransferFunction b({rng.uniform(-2, 2), rng.uniform(-2, 2)},
                                   {rng.uniform(0.5, 2), rng.uniform(0.5, 2)});
        const std::complex<double> s(rng.uniform(-1, 1), rng.uniform(0.1, 10));
        const auto prod = (a * b).at(s);
        const auto sum = (a + b).at(s);
        CHECK(std::abs(prod - a.at(s) * b.at(s)) < 1e-9 * (1.0 + std::abs(prod)));
        CHECK(std::abs(sum - (a.at(s) + b.at(s))) < 1e-9 * (1.0 + std::abs(sum)));
        CHECK(std::abs(a.inverse().at(s) - 1.0 / a.at(s)) < 1e-9 * (1.0 + std::abs(1.0 / a.at(s))));
    }
}
