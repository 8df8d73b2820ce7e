#include <catch2/catch_amalgamated.hpp>

#include "tonestack/circuit_model.hpp"
#include "tonestack/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

using namespace tonestack;
using Catch::Approx;

namespace {

const ToneStackComponents kDefaults{};

double ulp(double x) { return std::nextafter(std::abs(x), std::numeric_limits<double>::infinity()) - std::abs(x); }

}  // namespace

TEST_CASE("default components are the 5F6-A values", "[circuit_model]") {
    CHECK(kDefaults.r1() == 56000.0);
    CHECK(kDefaults.rt() == 220000.0);
    CHECK(kDefaults.rm() == 25000.0);
    CHECK(kDefaults.rb() == 1000000.0);
    CHECK(kDefaults.c1() == 220e-12);
    CHECK(kDefaults.c2() == 0.022e-6);
    CHECK(kDefaults.c3() == 0.022e-6);

    const ControlSettings controls;
    CHECK(controls.treble() == 0.0);
    CHECK(controls.mid() == 0.0);
    CHECK(controls.bass() == 1.0);
}

TEST_CASE("invalid components and controls are rejected", "[circuit_model][errors]") {
    CHECK_THROWS_AS(ToneStackComponents(ComponentValues{.r1 = 0.0}), DomainError);
    CHECK_THROWS_AS(ToneStackComponents(ComponentValues{.c2 = -1e-9}), DomainError);
    CHECK_THROWS_AS(ToneStackComponents(ComponentValues{.rb = std::numeric_limits<double>::infinity()}), DomainError);
    CHECK_THROWS_AS(ToneStackComponents(ComponentValues{.c1 = std::nan("")}), DomainError);

    CHECK_THROWS_AS(ControlSettings(1.5, 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(ControlSettings(0.0, -0.01, 0.0), DomainError);
    CHECK_THROWS_AS(ControlSettings(0.0, 0.0, std::nan("")), DomainError);
    CHECK_NOTHROW(ControlSettings(0.0, 1.0, 0.0));
}

TEST_CASE("wiper resistances", "[circuit_model]") {
    SECTION("reference setting t=0 m=0 b=1") {
        const auto w = wiper_resistances(kDefaults, ControlSettings(0.0, 0.0, 1.0));
        CHECK(w.rt1 == 0.0);
        CHECK(w.rt2 == 220000.0);
        CHECK(w.rm1 == 0.0);
        CHECK(w.rm2 == 25000.0);
        CHECK(w.rb1 == 1000000.0);
    }
    SECTION("mid at centre tap") {
        const auto w = wiper_resistances(kDefaults, ControlSettings(0.0, 0.5, 1.0));
        CHECK(w.rm1 == 12500.0);
        CHECK(w.rm2 == 12500.0);
    }
    SECTION("treble at the end stop") {
        const auto w = wiper_resistances(kDefaults, ControlSettings(1.0, 0.0, 1.0));
        CHECK(w.rt1 == 220000.0);
        CHECK(w.rt2 == 0.0);
    }
    SECTION("pot legs always add up to the pot") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> pos(0.0, 1.0);
        for (int i = 0; i < 1000; ++i) {
            const ControlSettings c(pos(rng), pos(rng), pos(rng));
            const auto w = wiper_resistances(kDefaults, c);
            CHECK(std::abs(w.rt1 + w.rt2 - kDefaults.rt()) <= 2 * ulp(kDefaults.rt()));
            CHECK(std::abs(w.rm1 + w.rm2 - kDefaults.rm()) <= 2 * ulp(kDefaults.rm()));
            CHECK(w.rb1 >= 0.0);
            CHECK(w.rb1 <= kDefaults.rb());
            CHECK(w.rt1 >= 0.0);
            CHECK(w.rt2 >= 0.0);
            CHECK(w.rm1 >= 0.0);
            CHECK(w.rm2 >= 0.0);
        }
    }
}

TEST_CASE("bass taper", "[circuit_model]") {
    CHECK(bass_fraction(0.3, BassTaper::Linear) == 0.3);
    CHECK(bass_fraction(0.0, BassTaper::Audio) == 0.0);
    CHECK(bass_fraction(1.0, BassTaper::Audio) == Approx(1.0).epsilon(1e-15));
    CHECK(bass_fraction(0.5, BassTaper::Audio) == Approx(1.0 / 11.0).epsilon(1e-15));
    // audio taper sits below linear everywhere inside (0, 1)
    for (double b = 0.05; b < 1.0; b += 0.05) {
        CHECK(bass_fraction(b, BassTaper::Audio) < b);
    }
    const auto w = wiper_resistances(kDefaults, ControlSettings(0.0, 0.0, 0.5), BassTaper::Audio);
    CHECK(w.rb1 == Approx(1e6 / 11.0).epsilon(1e-15));
}

TEST_CASE("capacitive reactance", "[circuit_model]") {
    // mpmath: 1/(2*pi*1000*0.022e-6) and 1/(2*pi*1000*220e-12)
    CHECK(capacitive_reactance(1000.0, 0.022e-6) == Approx(7234.3155950861516259).epsilon(1e-14));
    CHECK(capacitive_reactance(1000.0, 220e-12) == Approx(723431.55950861516259).epsilon(1e-14));

    SECTION("inverse proportionality in frequency") {
        for (const double f : {1.0, 37.0, 1000.0, 12345.6}) {
            const double x = capacitive_reactance(f, 0.022e-6);
            CHECK(capacitive_reactance(10.0 * f, 0.022e-6) == Approx(x / 10.0).epsilon(1e-15));
        }
    }
    SECTION("strictly decreasing in frequency") {
        double previous = std::numeric_limits<double>::infinity();
        for (double f = 0.01; f < 1e6; f *= 1.37) {
            const double x = capacitive_reactance(f, 220e-12);
            CHECK(x < previous);
            previous = x;
        }
    }
    CHECK_THROWS_AS(capacitive_reactance(0.0, 1e-9), DomainError);
    CHECK_THROWS_AS(capacitive_reactance(-5.0, 1e-9), DomainError);
    CHECK_THROWS_AS(capacitive_reactance(100.0, 0.0), DomainError);
    CHECK_THROWS_AS(capacitor_impedance(100.0, -1e-9), DomainError);
}

TEST_CASE("capacitor impedance is -j Xc", "[circuit_model]") {
    const Complex z = capacitor_impedance(1000.0, 0.022e-6);
    CHECK(z.real() == 0.0);
    CHECK(z.imag() == Approx(-7234.3155950861516259).epsilon(1e-14));

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> exponent(-2.0, 7.0);
    for (int i = 0; i < 200; ++i) {
        const double f = std::pow(10.0, exponent(rng));
        const double c = std::pow(10.0, exponent(rng) - 12.0);
        const Complex zc = capacitor_impedance(f, c);
        CHECK(zc.real() == 0.0);
        // conjugate of the +j convention
        CHECK(zc == std::conj(Complex(0.0, capacitive_reactance(f, c))));
    }
}

TEST_CASE("mesh system layout", "[circuit_model]") {
    const ControlSettings reference(0.0, 0.0, 1.0);

    SECTION("loop 1 resistance and excitation") {
        for (const double f : {1.0, 1000.0, 1e5}) {
            const auto sys = build_mesh_system(kDefaults, reference, f, 5.0);
            CHECK(sys.z(0, 0).real() == 81000.0);
            CHECK(sys.v == linalg::ComplexVector{5.0, 0.0, 0.0});
            CHECK(sys.frequency == f);
        }
    }

    SECTION("physical convention entries") {
        const double f = 440.0;
        const ControlSettings c(0.3, 0.6, 0.2);
        const auto w = wiper_resistances(kDefaults, c);
        const Complex zc1 = capacitor_impedance(f, kDefaults.c1());
        const Complex zc2 = capacitor_impedance(f, kDefaults.c2());
        const Complex zc3 = capacitor_impedance(f, kDefaults.c3());
        const auto z = build_mesh_system(kDefaults, c, f, 1.0).z;
        CHECK(z(0, 0) == kDefaults.r1() + w.rm2 + zc3);
        CHECK(z(1, 1) == Complex(w.rt1 + w.rt2 + kDefaults.r1(), (zc2 + zc1).imag()));
        CHECK(z(2, 2) == Complex(w.rb1 + w.rm1, (zc2 + zc3).imag()));
        CHECK(z(0, 1) == Complex(-kDefaults.r1()));
        CHECK(z(0, 2) == -zc3);
        CHECK(z(1, 2) == -zc2);
    }

    SECTION("reference script convention entries") {
        const double f = 440.0;
        const ControlSettings c(0.3, 0.6, 0.2);
        const auto w = wiper_resistances(kDefaults, c);
        const double xc1 = capacitive_reactance(f, kDefaults.c1());
        const double xc2 = capacitive_reactance(f, kDefaults.c2());
        const double xc3 = capacitive_reactance(f, kDefaults.c3());
        const auto z = build_mesh_system(kDefaults, c, f, 5.0, SignConvention::PaperScript).z;
        // z1 = complex(r1+rm2, Xc3); z3 = complex(0, -Xc3); z5 = complex(rt1+rt2+r1, Xc2+Xc1); ...
        CHECK(z(0, 0) == Complex(kDefaults.r1() + w.rm2, xc3));
        CHECK(z(0, 1) == Complex(-kDefaults.r1()));
        CHECK(z(0, 2) == Complex(0.0, -xc3));
        CHECK(z(1, 1) == Complex(w.rt1 + w.rt2 + kDefaults.r1(), xc2 + xc1));
        CHECK(z(1, 2) == Complex(0.0, -xc2));
        CHECK(z(2, 2) == Complex(w.rb1 + w.rm1, xc2 + xc3));
    }

    SECTION("symmetric and sign-consistent for random inputs") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> pos(0.0, 1.0);
        std::uniform_real_distribution<double> exponent(-2.0, 7.0);
        for (int i = 0; i < 500; ++i) {
            const ControlSettings c(pos(rng), pos(rng), pos(rng));
            const double f = std::pow(10.0, exponent(rng));
            for (const auto conv : {SignConvention::Physical, SignConvention::PaperScript}) {
                const auto z = build_mesh_system(kDefaults, c, f, 1.0, conv).z;
                CHECK(z == z.transpose());
                if (conv == SignConvention::Physical) {
                    for (std::size_t k = 0; k < 3; ++k) {
                        CHECK(z(k, k).imag() <= 0.0);
                        CHECK(z(k, k).real() >= 0.0);
                    }
                }
            }
        }
    }

    SECTION("entries move at most pot-resistance times control change") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> pos(0.0, 1.0);
        std::uniform_real_distribution<double> nudge(-1e-3, 1e-3);
        const double pots = kDefaults.rt() + kDefaults.rm() + kDefaults.rb();
        for (int i = 0; i < 300; ++i) {
            const ControlSettings a(pos(rng), pos(rng), pos(rng));
            const ControlSettings b(std::clamp(a.treble() + nudge(rng), 0.0, 1.0),
                                    std::clamp(a.mid() + nudge(rng), 0.0, 1.0),
                                    std::clamp(a.bass() + nudge(rng), 0.0, 1.0));
            const double delta = std::max({std::abs(a.treble() - b.treble()), std::abs(a.mid() - b.mid()),
                                           std::abs(a.bass() - b.bass())});
            const auto za = build_mesh_system(kDefaults, a, 300.0, 1.0).z;
            const auto zb = build_mesh_system(kDefaults, b, 300.0, 1.0).z;
            for (std::size_t r = 0; r < 3; ++r)
                for (std::size_t col = 0; col < 3; ++col)
                    CHECK(std::abs(za(r, col) - zb(r, col)) <= pots * delta + 1e-9 * std::abs(za(r, col)));
        }
    }

    SECTION("degenerate end stops still solve") {
        for (const auto& c : {ControlSettings(1.0, 0.0, 0.0), ControlSettings(1.0, 1.0, 0.0),
                              ControlSettings(0.0, 1.0, 0.0)}) {
            for (const double f : {0.01, 1.0, 1e3, 1e7}) {
                const auto sys = build_mesh_system(kDefaults, c, f, 1.0);
                for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(sys.z(k, k)) > 0.0);
                const auto i = solve_mesh(sys);
                CHECK(linalg::residual(sys.z, i.as_vector(), sys.v) <= 1e-10);
            }
        }
    }

    SECTION("source resistance lands in loop 1 only") {
        ModelOptions options;
        options.loading.source_resistance = 1000.0;
        const auto bare = build_mesh_system(kDefaults, reference, 500.0, 1.0);
        const auto loaded = build_mesh_system(kDefaults, reference, 500.0, 1.0, options);
        CHECK(loaded.z(0, 0) - bare.z(0, 0) == Complex(1000.0, 0.0));
        for (std::size_t r = 0; r < 3; ++r)
            for (std::size_t c = 0; c < 3; ++c)
                if (r != 0 || c != 0) CHECK(loaded.z(r, c) == bare.z(r, c));
    }

    SECTION("precondition failures") {
        CHECK_THROWS_AS(build_mesh_system(kDefaults, reference, 0.0, 5.0), DomainError);
        CHECK_THROWS_AS(build_mesh_system(kDefaults, reference, -1.0, 5.0), DomainError);
        CHECK_THROWS_AS(build_mesh_system(kDefaults, reference, 100.0, 0.0), DomainError);
        ModelOptions bad;
        bad.loading.load_resistance = -1.0;
        CHECK_THROWS_AS(build_mesh_system(kDefaults, reference, 100.0, 1.0, bad), DomainError);
    }
}

TEST_CASE("non-finite reactance surfaces as a numerical failure with its frequency", "[circuit_model][errors]") {
    const double f = 1e-320;  // subnormal: 1/(2 pi f C) overflows
    const auto sys = build_mesh_system(kDefaults, ControlSettings{}, f, 1.0);
    try {
        (void)solve_mesh(sys);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        REQUIRE(e.frequency().has_value());
        CHECK(*e.frequency() == f);
    }
}
