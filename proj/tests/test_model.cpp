#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "wristopt/model.hpp"
#include "wristopt/rng.hpp"

using namespace wristopt;
using Catch::Approx;

namespace {

// Parameter set used throughout for hand-checked values.
SystemParams reference_params() { return {0.005, 3.5, 20.0, 0.5}; }

SystemParams random_params(Rng& rng) {
    return {rng.uniform(1e-3, 0.1), rng.uniform(0.5, 10.0), rng.uniform(0.01, 50.0),
            rng.uniform(0.01, 5.0)};
}

ImpedanceGains random_gains(Rng& rng) {
    return {rng.uniform(0.1, 200.0), rng.uniform(0.1, 500.0)};
}

// Block-diagram assembly of Eq-style loop responses with generic rational
// algebra; the oracle the expanded closed forms are checked against.
RationalTransferFunction block_diagram_impedance(const SystemParams& p, const ImpedanceGains& g) {
    const auto G = plant_tf(p);
    const auto C = position_controller_tf(p);
    const auto Y = admittance_tf(g); // s/(B_y s + K_y)
    const auto one = RationalTransferFunction::constant(1.0);
    const auto loop = G * (one + C * Y); // q/(-tau_e) numerator part
    const auto denom = one + G * C;
    // Z = -tau_e/(s q) = denom / (s * loop)
    return (RationalTransferFunction::differentiator() * loop).inverse() * denom;
}

} // namespace

TEST_CASE("plant transfer function is 1/(J s^2)") {
    SystemParams p;
    p.J = 1.0;
    auto tf = plant_tf(p);
    CHECK(tf.numerator() == poly::Coeffs{1.0});
    CHECK(tf.denominator() == poly::Coeffs{0.0, 0.0, 1.0});

    p.J = 0.005;
    CHECK(plant_tf(p).denominator()[2] == Approx(0.005));

    p.J = 2.0;
    const auto r = evaluate_tf(plant_tf(p), 1.0);
    CHECK(r.value.real() == Approx(-0.5));
    CHECK(r.value.imag() == Approx(0.0).margin(1e-15));
}

TEST_CASE("position controller is (D s + P) k_r") {
    SystemParams p{1.0, 1.0, 1.0, 1.0};
    CHECK(position_controller_tf(p).numerator() == poly::Coeffs{1.0, 1.0});

    SystemParams q{0.005, 3.5, 20.0, 0.5};
    const auto tf = position_controller_tf(q);
    CHECK(tf.numerator()[0] == Approx(70.0));
    CHECK(tf.numerator()[1] == Approx(1.75));

    // DC value P k_r regardless of D
    for (double d : {0.01, 0.5, 3.0}) {
        SystemParams v{0.01, 3.5, 2.0, d};
        CHECK(position_controller_tf(v).dc_gain() == Approx(2.0 * 3.5));
    }
}

TEST_CASE("admittance filter is the node position 1/(B_y s + K_y)") {
    ImpedanceGains unit{1.0, 1.0};
    auto tf = admittance_filter_tf(unit);
    CHECK(tf.numerator() == poly::Coeffs{1.0});
    CHECK(tf.denominator() == poly::Coeffs{1.0, 1.0});

    ImpedanceGains g{50.0, 100.0};
    CHECK(admittance_filter_tf(g).dc_gain() == Approx(0.01));

    // high-frequency magnitude approaches 1/(B_y w)
    const double w = 1e6;
    const auto r = evaluate_tf(admittance_filter_tf(g), w);
    CHECK(std::abs(r.value) * g.B_y * w == Approx(1.0).epsilon(1e-7));
}

TEST_CASE("impedance coefficients expand the closed form exactly") {
    const auto p = reference_params();
    const ImpedanceGains g{50.0, 100.0};
    const auto z = impedance_tf(p, g);

    // s (1.75 s^2 + (50 + 70) s + 100)
    REQUIRE(z.denominator().size() == 4);
    CHECK(z.denominator()[0] == 0.0);
    CHECK(z.denominator()[1] == Approx(100.0));
    CHECK(z.denominator()[2] == Approx(120.0));
    CHECK(z.denominator()[3] == Approx(1.75));

    CHECK(z.numerator_degree() == 3);
    CHECK(z.denominator_degree() == 3);
}

TEST_CASE("impedance degree is 3/3 for any positive parameters") {
    Rng rng(11);
    for (int t = 0; t < 50; ++t) {
        const auto z = impedance_tf(random_params(rng), random_gains(rng));
        CHECK(z.numerator_degree() == 3);
        CHECK(z.denominator_degree() == 3);
    }
}

TEST_CASE("block-diagram assembly matches the expanded impedance") {
    Rng rng(23);
    for (int t = 0; t < 20; ++t) {
        const auto p = random_params(rng);
        const auto g = random_gains(rng);
        const auto direct = impedance_tf(p, g);
        const auto assembled = block_diagram_impedance(p, g);
        for (int k = 0; k < 100; ++k) {
            const double w = std::pow(10.0, -2.0 + 6.0 * k / 99.0);
            const auto a = evaluate_tf(direct, w).value;
            const auto b = evaluate_tf(assembled, w).value;
            REQUIRE(std::abs(a - b) <= 1e-9 * std::abs(a));
        }
    }
}

TEST_CASE("closed-loop command path has DC gain exactly 1") {
    Rng rng(31);
    for (int t = 0; t < 20; ++t) {
        const auto cl = closed_loop_position_tf(random_params(rng), random_gains(rng));
        CHECK(cl.command.dc_gain() == 1.0);
        CHECK(cl.command.is_proper());
    }
}

TEST_CASE("closed-loop disturbance path DC gain is 1/(P k_r)") {
    // limit of the loop's q/(-tau_e) at s -> 0: the admittance correction
    // washes out and the position loop's DC stiffness P k_r remains
    const auto p = reference_params();
    const ImpedanceGains g{50.0, 100.0};
    const auto cl = closed_loop_position_tf(p, g);
    CHECK(cl.disturbance.dc_gain() == Approx(1.0 / (p.P * p.k_r)));
}

TEST_CASE("impedance equals the inverted disturbance path over s") {
    Rng rng(47);
    for (int t = 0; t < 20; ++t) {
        const auto p = random_params(rng);
        const auto g = random_gains(rng);
        const auto cl = closed_loop_position_tf(p, g);
        const auto z = impedance_tf(p, g);
        const auto path_z =
            (RationalTransferFunction::differentiator() * cl.disturbance).inverse();
        for (double w : {0.03, 0.7, 4.2, 55.0, 900.0}) {
            const auto a = evaluate_tf(z, w).value;
            const auto b = evaluate_tf(path_z, w).value;
            CHECK(std::abs(a - b) <= 1e-9 * std::abs(a));
        }
    }
}
