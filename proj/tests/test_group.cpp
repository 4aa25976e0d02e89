#include <catch2/catch_amalgamated.hpp>

#include "bbm/exponents.hpp"
#include "bbm/group.hpp"
#include "support.hpp"

using namespace bbm;

namespace {
const GridSpec g(16.0 * pi, 1024);

double max_abs_diff(const Field& a, const Field& b) {
    double e = 0.0;
    for (int m = 0; m < a.grid.samples; ++m) e = std::max(e, std::abs(a.values[m] - b.values[m]));
    return e;
}
} // namespace

TEST_CASE("dispersion relation: values, symmetry, extrema") {
    REQUIRE(phi(0.0) == 0.0);
    REQUIRE(phi(1.0) == Catch::Approx(0.5).epsilon(1e-15));
    REQUIRE(phi(-1.0) == Catch::Approx(-0.5).epsilon(1e-15));
    for (double xi : {0.13, 0.77, 2.5, 9.0, 123.0}) {
        REQUIRE(phi(1.0 / xi) == Catch::Approx(phi(xi)).epsilon(1e-15));
        REQUIRE(std::abs(phi(xi)) <= 0.5);
    }
    REQUIRE(phi_prime(0.0) == 1.0);
    REQUIRE(phi_prime(1.0) == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(phi_prime(std::sqrt(3.0)) == Catch::Approx(-0.125).epsilon(1e-14));
    testsup::Rng rng(5);
    for (int i = 0; i < 40; ++i) {
        const double xi = rng.uniform(-6.0, 6.0);
        const double h = 1e-5;
        const double fd1 = (phi(xi + h) - phi(xi - h)) / (2.0 * h);
        const double fd2 = (phi(xi + h) - 2.0 * phi(xi) + phi(xi - h)) / (h * h);
        REQUIRE(phi_prime(xi) == Catch::Approx(fd1).margin(1e-8));
        REQUIRE(phi_second(xi) == Catch::Approx(fd2).margin(1e-5));
    }
}

TEST_CASE("curvature bound |phi''(y)| <= 6 (1+y^2)^{-3/2}") {
    REQUIRE(phi_second(0.0) == 0.0);
    REQUIRE(phi_second(std::sqrt(3.0)) == Catch::Approx(0.0).margin(1e-15));
    double worst = 0.0;
    for (int i = -40000; i <= 40000; ++i) {
        const double y = i / 1000.0;
        worst = std::max(worst, std::abs(phi_second(y)) * std::pow(1.0 + y * y, 1.5));
    }
    // the stated constant is 6; the sharp one, attained at y = 1/sqrt(3), is 2
    REQUIRE(worst <= 6.0 + 1e-12);
    const double y0 = 1.0 / std::sqrt(3.0);
    REQUIRE(std::abs(phi_second(y0)) * std::pow(1.0 + y0 * y0, 1.5) ==
            Catch::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("decay rate beta: table, continuity, range") {
    REQUIRE(beta(-2.0) == Catch::Approx(-0.2).epsilon(1e-15));
    REQUIRE(beta(-4.0) == Catch::Approx(-1.0 / 3.0).epsilon(1e-15));
    REQUIRE(beta(-100.0) == Catch::Approx(-3.0 / 201.0).epsilon(1e-15));
    REQUIRE(beta(-4.0 - 1e-12) == Catch::Approx(beta(-4.0 + 1e-12)).margin(1e-11));
    for (int i = 0; i < 500; ++i) {
        const double sigma = -1.0 - 49.0 * (i + 1) / 500.0;
        REQUIRE(beta(sigma) >= -1.0 / 3.0 - 1e-15);
        REQUIRE(beta(sigma) < 0.0);
    }
    REQUIRE_THROWS_AS(beta(-1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(beta(0.5), std::invalid_argument);
}

TEST_CASE("free propagator is a unitary group preserving realness") {
    Field u = testsup::band_limited(g, 6.0, 41, true);
    REQUIRE(u.is_real());
    Field a = apply_S(0.4, apply_S(0.3, u));
    Field b = apply_S(0.7, u);
    REQUIRE(max_abs_diff(a, b) < 1e-12 * lp_norm(u, inf));
    REQUIRE(max_abs_diff(apply_S(0.0, u), u) < 1e-13 * lp_norm(u, inf));
    REQUIRE(lp_norm(b, 2.0) == Catch::Approx(lp_norm(u, 2.0)).epsilon(1e-12));
    REQUIRE(b.is_real(1e-12));
    // commutes with smoothing
    Field c = apply_bessel(-1.5, apply_S(0.7, u));
    Field d = apply_S(0.7, apply_bessel(-1.5, u));
    REQUIRE(max_abs_diff(c, d) < 1e-12 * lp_norm(u, inf));
}

TEST_CASE("free propagator on a single mode") {
    Field u(g);
    for (int m = 0; m < g.samples; ++m) u.values[m] = std::polar(1.0, g.x(m));
    const double t = 1.3;
    Field v = apply_S(t, u);
    double err = 0.0;
    for (int m = 0; m < g.samples; ++m)
        err = std::max(err, std::abs(v.values[m] - std::polar(1.0, g.x(m) - 0.5 * t)));
    REQUIRE(err < 1e-12);
}

TEST_CASE("Bessel smoothing: identity, inverse, single mode") {
    Field u = testsup::band_limited(g, 6.0, 43);
    REQUIRE(max_abs_diff(apply_bessel(0.0, u), u) < 1e-13 * lp_norm(u, inf));
    Field rt = apply_bessel(2.5, apply_bessel(-2.5, u));
    REQUIRE(max_abs_diff(rt, u) < 1e-11 * lp_norm(u, inf));
    Field mode(g);
    for (int m = 0; m < g.samples; ++m) mode.values[m] = std::polar(1.0, g.x(m));
    Field s = apply_bessel(-3.0, mode);
    REQUIRE(std::abs(s.values[0]) == Catch::Approx(std::pow(2.0, -1.5)).epsilon(1e-12));
}

TEST_CASE("phi(D) maps sin x to -(i/2) cos x") {
    Field u(g);
    for (int m = 0; m < g.samples; ++m) u.values[m] = std::sin(g.x(m));
    Field v = apply_phiD(u);
    double err = 0.0;
    for (int m = 0; m < g.samples; ++m)
        err = std::max(err, std::abs(v.values[m] - cplx{0.0, -0.5 * std::cos(g.x(m))}));
    REQUIRE(err < 1e-12);
}

TEST_CASE("runtime symbols: builtin table and polynomial evaluation") {
    SymbolSpec s;
    REQUIRE(s.eval(0.7) == phi(0.7));
    SymbolSpec sq{"poly", {0.0, 0.0, 1.0}};
    REQUIRE(sq.eval(3.0) == Catch::Approx(9.0).epsilon(1e-15));
    SymbolSpec h{"poly", {1.0, 2.0, 3.0}};
    REQUIRE(h.eval(2.0) == Catch::Approx(17.0).epsilon(1e-15));
    SymbolSpec bad{"cubic", {}};
    REQUIRE_THROWS_AS(bad.eval(1.0), std::invalid_argument);

    Field u = testsup::band_limited(g, 6.0, 47);
    Field a = apply_U(SymbolSpec{}, 0.9, u);
    Field b = apply_S(0.9, u);
    REQUIRE(max_abs_diff(a, b) == 0.0);
}

TEST_CASE("quadratic symbol reproduces the Gaussian dispersive solution") {
    // data with spectrum exactly exp(-xi^2/2); evolution under e^{-i t D^2}
    // has the closed form (1/2pi) sqrt(pi/c) exp(-x^2/(4c)), c = 1/2 + i t.
    Field u0(g);
    for (int m = 0; m < g.samples; ++m) {
        const double x = g.x(m);
        u0.values[m] = std::exp(-0.5 * x * x) / std::sqrt(2.0 * pi);
    }
    const double t = 0.7;
    Field ut = apply_U(SymbolSpec{"poly", {0.0, 0.0, 1.0}}, t, u0);
    const cplx c{0.5, t};
    double err = 0.0;
    for (int m = 0; m < g.samples; ++m) {
        const double x = g.x(m);
        const cplx expect = std::sqrt(pi / c) * std::exp(-x * x / (4.0 * c)) / (2.0 * pi);
        err = std::max(err, std::abs(ut.values[m] - expect));
    }
    REQUIRE(err < 1e-12);
}

TEST_CASE("exponent pack: reference values") {
    ExponentPack e = exponent_pack(6, -4.0, 0.25);
    REQUIRE(e.beta == Catch::Approx(-1.0 / 3.0).epsilon(1e-14));
    REQUIRE(e.p == 8.0);
    REQUIRE(e.q == 2.0);
    REQUIRE(e.mu == Catch::Approx(1.0 / 16.0).epsilon(1e-14));
    REQUIRE(e.rho == e.mu);
    REQUIRE(e.gamma == Catch::Approx(32.0).epsilon(1e-14));
    REQUIRE(e.gamma_prime == Catch::Approx(32.0 / 31.0).epsilon(1e-14));
    REQUIRE(e.delta == Catch::Approx(1.0).epsilon(1e-14));
    REQUIRE(e.r == Catch::Approx(6.4).epsilon(1e-14));

    REQUIRE(exponent_pack(1, -2.0, 0.5).r == Catch::Approx(30.0 / 29.0).epsilon(1e-14));
    REQUIRE(exponent_pack(3, -2.0, 0.5).rho == Catch::Approx(0.06).epsilon(1e-14));
}

TEST_CASE("exponent pack: internal identities on random admissible triples") {
    testsup::Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const int lambda = 1 + static_cast<int>(rng.uniform() * 9.0);
        const double sigma = rng.uniform(-30.0, -1.05);
        const double theta = rng.uniform(0.0, 1.0) * (-1.0 / sigma);
        if (theta <= 0.0) continue;
        ExponentPack e = exponent_pack(lambda, sigma, theta);
        REQUIRE(e.r * (1.0 - e.mu) == Catch::Approx(static_cast<double>(lambda)).epsilon(1e-12));
        REQUIRE(e.mu * e.gamma == Catch::Approx(2.0).epsilon(1e-12));
        REQUIRE(1.0 / e.gamma + 1.0 / e.gamma_prime == Catch::Approx(1.0).epsilon(1e-12));
        REQUIRE(e.delta == Catch::Approx(-e.sigma * e.theta).epsilon(1e-12));
        REQUIRE(e.p == static_cast<double>(lambda) + 2.0);
        REQUIRE(e.mu > 0.0);
        REQUIRE(e.mu < 1.0 / 3.0); // mu = (lambda/(lambda+2)) theta |beta| < 1/3
    }
}

TEST_CASE("exponent pack: hypothesis violations are rejected by name") {
    REQUIRE_THROWS_WITH(exponent_pack(0, -2.0, 0.5),
                        Catch::Matchers::ContainsSubstring("degree"));
    REQUIRE_THROWS_WITH(exponent_pack(2, -1.0, 0.5),
                        Catch::Matchers::ContainsSubstring("sigma < -1"));
    REQUIRE_THROWS_WITH(exponent_pack(2, -2.0, 0.0),
                        Catch::Matchers::ContainsSubstring("theta"));
    REQUIRE_THROWS_WITH(exponent_pack(2, -2.0, 0.51),
                        Catch::Matchers::ContainsSubstring("theta"));
    REQUIRE_NOTHROW(exponent_pack(2, -2.0, 0.5));
}

TEST_CASE("the two closing weight exponents") {
    auto s6 = sigma_choices(6);
    REQUIRE(s6[0] == Catch::Approx(-4.0).epsilon(1e-15));
    REQUIRE(s6[1] == Catch::Approx(-4.0).epsilon(1e-15));
    auto s5 = sigma_choices(5);
    REQUIRE(s5[0] == Catch::Approx(-7.0).epsilon(1e-15));
    REQUIRE(s5[1] == Catch::Approx(-13.0 / 4.0).epsilon(1e-15));
    REQUIRE_THROWS_AS(sigma_choices(4), std::invalid_argument);
}
