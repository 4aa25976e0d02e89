#include <catch2/catch_amalgamated.hpp>

#include "bbm/kernel.hpp"
#include "bbm/quadrature.hpp"

using namespace bbm;

TEST_CASE("adaptive panels integrate smooth and oscillatory integrands") {
    auto cube = [](double x) { return x * x * x; };
    QuadResult r = adaptive_gk15(cube, 0.0, 1.0, 1e-12);
    REQUIRE(r.value == Catch::Approx(0.25).epsilon(1e-14));
    REQUIRE(r.evaluations == 15); // one panel is exact for cubics

    auto osc = [](double x) { return std::cos(50.0 * x); };
    QuadResult o = adaptive_gk15(osc, 0.0, 1.0, 1e-12);
    REQUIRE(o.value == Catch::Approx(std::sin(50.0) / 50.0).margin(1e-12));

    auto decay = [](double x) { return std::exp(-x); };
    QuadResult d = adaptive_gk15(decay, 0.0, 40.0, 1e-13);
    REQUIRE(d.value == Catch::Approx(1.0 - std::exp(-40.0)).epsilon(1e-12));
    REQUIRE_THROWS_AS(adaptive_gk15(decay, 0.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("static kernel values against closed forms") {
    REQUIRE(kernel_direct(0.0, -2.0, 0.0) == Catch::Approx(pi).epsilon(1e-9));
    REQUIRE(kernel_direct(0.0, -4.0, 0.0) == Catch::Approx(0.5 * pi).epsilon(1e-9));
    for (double x : {0.5, 3.0, 10.0, -2.0}) {
        const double ax = std::abs(x);
        REQUIRE(kernel_direct(0.0, -2.0, x) ==
                Catch::Approx(pi * std::exp(-ax)).epsilon(1e-8));
        REQUIRE(kernel_direct(0.0, -4.0, x) ==
                Catch::Approx(0.5 * pi * (1.0 + ax) * std::exp(-ax)).epsilon(1e-8));
    }
}

TEST_CASE("moving kernel agrees with brute-force integration") {
    struct Case {
        double t, x;
    };
    for (Case c : {Case{2.5, 0.7}, Case{5.0, 0.0}, Case{10.0, -1.3}}) {
        auto f = [&c](double xi) {
            return std::pow(1.0 + xi * xi, -2.0) * std::cos(c.x * xi - c.t * phi(xi));
        };
        const double brute = 2.0 * adaptive_gk15(f, 0.0, 1e4, 1e-10).value;
        REQUIRE(kernel_direct(c.t, -4.0, c.x) == Catch::Approx(brute).margin(1e-7));
    }
}

TEST_CASE("kernel symmetry under (t, x) -> (-t, -x)") {
    for (double t : {1.0, 7.5}) {
        REQUIRE(kernel_direct(t, -2.0, 0.9) ==
                Catch::Approx(kernel_direct(-t, -2.0, -0.9)).epsilon(1e-13));
    }
}

TEST_CASE("kernel amplitude shrinks for large times") {
    REQUIRE(std::abs(kernel_direct(40.0, -2.0, 0.0)) < pi);
    REQUIRE_THROWS_AS(kernel_direct(1.0, -0.5, 0.0), std::invalid_argument);
}

TEST_CASE("windowed group value matches the spectral grid propagator") {
    const GridSpec g(16.0 * pi, 4096);
    const double w = 0.25, t = 2.0, sigma = -2.0;
    Field u0(g);
    for (int m = 0; m < g.samples; ++m) {
        const double x = g.x(m);
        u0.values[m] = std::exp(-0.5 * x * x / (w * w)) / (w * std::sqrt(2.0 * pi));
    }
    Field ev = apply_bessel(sigma, apply_S(t, u0));
    for (int m : {2048, 2148, 2448}) {
        const double expect = windowed_group_value(t, sigma, g.x(m), w);
        REQUIRE(ev.values[m].real() == Catch::Approx(expect).margin(1e-8));
        REQUIRE(std::abs(ev.values[m].imag()) < 1e-10);
    }
}
