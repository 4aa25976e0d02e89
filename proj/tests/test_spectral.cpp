#include <catch2/catch_amalgamated.hpp>

#include "bbm/spectral.hpp"
#include "support.hpp"

using namespace bbm;

TEST_CASE("single mode lands on its frequency bin with value 2L") {
    GridSpec g(8.0 * pi, 256);
    Field f(g);
    for (int m = 0; m < g.samples; ++m) f.values[m] = std::polar(1.0, g.x(m));
    Spectrum s = forward_transform(f);
    const int slot = s.slot(8); // xi = pi*8/(8 pi) = 1
    REQUIRE(std::abs(s.coeffs[slot] - cplx{2.0 * g.half_width, 0.0}) <
            1e-9 * 2.0 * g.half_width);
    double off = 0.0;
    for (int u = 0; u < s.size(); ++u)
        if (u != slot) off = std::max(off, std::abs(s.coeffs[u]));
    REQUIRE(off < 1e-9 * 2.0 * g.half_width);
}

TEST_CASE("transform round trip and Parseval") {
    GridSpec g(16.0 * pi, 512);
    Field f = testsup::band_limited(g, 6.0, 42);
    Spectrum s = forward_transform(f);
    Field back = inverse_transform(s);
    double err = 0.0, scale = 0.0;
    for (int m = 0; m < g.samples; ++m) {
        err = std::max(err, std::abs(back.values[m] - f.values[m]));
        scale = std::max(scale, std::abs(f.values[m]));
    }
    REQUIRE(err < 1e-12 * scale);

    double sum_x = 0.0, sum_xi = 0.0;
    for (const cplx& v : f.values) sum_x += std::norm(v);
    for (const cplx& c : s.coeffs) sum_xi += std::norm(c);
    const double lhs = sum_x * g.dx();
    const double rhs = sum_xi / (2.0 * g.half_width);
    REQUIRE(std::abs(lhs - rhs) < 1e-12 * lhs);
}

TEST_CASE("Gaussian L2 norm matches closed form") {
    GridSpec g(64.0 * pi, 8192);
    Field f(g);
    for (int m = 0; m < g.samples; ++m)
        f.values[m] = std::exp(-g.x(m) * g.x(m));
    REQUIRE(lp_norm(f, 2.0) == Catch::Approx(std::pow(pi / 2.0, 0.25)).epsilon(1e-12));
}

TEST_CASE("lp_norm on a smoothed plateau") {
    GridSpec g(64.0 * pi, 8192);
    const double w = 0.15;
    Field f(g);
    for (int m = 0; m < g.samples; ++m) {
        const double x = g.x(m);
        f.values[m] = 0.5 * (std::tanh((x + 1.0) / w) - std::tanh((x - 1.0) / w));
    }
    // symmetric smoothing keeps the integral exactly 2
    REQUIRE(lp_norm(f, 1.0) == Catch::Approx(2.0).epsilon(1e-8));
    REQUIRE(lp_norm(f, inf) == Catch::Approx(std::tanh(1.0 / w)).epsilon(1e-12));
}

TEST_CASE("lp_norm refinement stability") {
    // |f| must stay away from zero for |f|^p to be smooth; a modulated
    // Gaussian packet has |f| = envelope > 0 everywhere.
    auto packet = [](const GridSpec& g) {
        Field f(g);
        for (int m = 0; m < g.samples; ++m) {
            const double x = g.x(m);
            f.values[m] = std::exp(-x * x / 8.0) * std::polar(1.0, 3.0 * x);
        }
        return f;
    };
    GridSpec g(32.0 * pi, 1024);
    const double a = lp_norm(packet(g), 3.0);
    const double b = lp_norm(packet(g.refined()), 3.0);
    REQUIRE(std::abs(a - b) < 1e-10 * a);
}

TEST_CASE("multiplier i*xi differentiates sin") {
    GridSpec g(4.0 * pi, 256);
    Field f(g);
    for (int m = 0; m < g.samples; ++m) f.values[m] = std::sin(g.x(m));
    Field d = apply_multiplier(f, [](double xi) { return cplx{0.0, xi}; });
    double err = 0.0;
    for (int m = 0; m < g.samples; ++m)
        err = std::max(err, std::abs(d.values[m] - cplx{std::cos(g.x(m)), 0.0}));
    REQUIRE(err < 1e-12);
}

TEST_CASE("multiplier composition equals product symbol") {
    GridSpec g(16.0 * pi, 512);
    Field f = testsup::band_limited(g, 4.0, 11);
    auto m1 = [](double xi) { return cplx{1.0 / (1.0 + xi * xi), 0.0}; };
    auto m2 = [](double xi) { return std::polar(1.0, -0.3 * xi); };
    Field lhs = apply_multiplier(apply_multiplier(f, m1), m2);
    Field rhs = apply_multiplier(f, [&](double xi) { return m1(xi) * m2(xi); });
    double err = 0.0, scale = 0.0;
    for (int m = 0; m < g.samples; ++m) {
        err = std::max(err, std::abs(lhs.values[m] - rhs.values[m]));
        scale = std::max(scale, std::abs(f.values[m]));
    }
    REQUIRE(err < 1e-12 * scale);
}

TEST_CASE("non-finite symbol is rejected with the offending frequency") {
    GridSpec g(4.0 * pi, 64);
    Field f(g);
    f.values[0] = 1.0;
    REQUIRE_THROWS_AS(apply_multiplier(f, [](double xi) { return cplx{1.0 / xi, 0.0}; }),
                      std::domain_error);
    try {
        apply_multiplier(f, [](double xi) { return cplx{1.0 / xi, 0.0}; });
    } catch (const std::domain_error& e) {
        REQUIRE(std::string(e.what()).find("0.000000") != std::string::npos);
    }
}

TEST_CASE("field construction rejects mismatched lengths") {
    GridSpec g(4.0 * pi, 64);
    std::vector<cplx> vals(63);
    REQUIRE_THROWS_AS(Field(g, vals), std::invalid_argument);
    REQUIRE_THROWS_AS(GridSpec(4.0, 100), std::invalid_argument); // not a power of two
    REQUIRE_THROWS_AS(GridSpec(-1.0, 64), std::invalid_argument);
}

TEST_CASE("time quadrature: constants, cubics, exponentials") {
    std::vector<double> t;
    std::vector<double> ones, cubes;
    for (int i = 0; i <= 8; ++i) {
        t.push_back(i / 8.0);
        ones.push_back(1.0);
        cubes.push_back(std::pow(i / 8.0, 3));
    }
    REQUIRE(time_quadrature(t, ones, QuadRule::trapezoid) == Catch::Approx(1.0).margin(1e-14));
    REQUIRE(time_quadrature(t, ones, QuadRule::simpson) == Catch::Approx(1.0).margin(1e-14));
    // composite Simpson is exact on cubics
    REQUIRE(time_quadrature(t, cubes, QuadRule::simpson) ==
            Catch::Approx(0.25).margin(1e-12));

    // odd interval count, uniform: 3/8 closure keeps cubics exact
    std::vector<double> t7, c7;
    for (int i = 0; i <= 7; ++i) {
        t7.push_back(i / 7.0);
        c7.push_back(std::pow(i / 7.0, 3));
    }
    REQUIRE(time_quadrature(t7, c7, QuadRule::simpson) == Catch::Approx(0.25).margin(1e-12));

    // non-uniform grid stays exact on quadratics
    std::vector<double> tn = {0.0, 0.13, 0.4, 0.55, 0.91, 1.0};
    std::vector<double> qn;
    for (double x : tn) qn.push_back(3.0 * x * x - x + 2.0);
    REQUIRE(time_quadrature(tn, qn, QuadRule::simpson) ==
            Catch::Approx(1.0 - 0.5 + 2.0).margin(1e-12));

    const double gauss = time_quadrature(0.0, 5.0, 8, [](double s) { return std::exp(-s); });
    REQUIRE(gauss == Catch::Approx(1.0 - std::exp(-5.0)).epsilon(1e-12));

    REQUIRE_THROWS_AS(time_quadrature(t, ones, QuadRule::gauss_subintervals),
                      std::invalid_argument);
}

TEST_CASE("trapezoid error scales quadratically") {
    auto run = [](int n) {
        std::vector<double> t, v;
        for (int i = 0; i <= n; ++i) {
            t.push_back(i * 1.0 / n);
            v.push_back(std::exp(-t.back()));
        }
        return std::abs(time_quadrature(t, v, QuadRule::trapezoid) - (1.0 - std::exp(-1.0)));
    };
    const double ratio = run(16) / run(32);
    REQUIRE(ratio > 3.5);
    REQUIRE(ratio < 4.5);
}

TEST_CASE("truncation diagnostic flags off-center mass") {
    GridSpec g(64.0 * pi, 2048);
    Field centered(g), shifted(g);
    for (int m = 0; m < g.samples; ++m) {
        const double x = g.x(m);
        centered.values[m] = std::exp(-x * x);
        const double y = x - 0.9 * g.half_width;
        shifted.values[m] = std::exp(-y * y);
    }
    REQUIRE(centered.truncation_fraction() < 1e-8);
    REQUIRE(shifted.truncation_fraction() > 0.99);
}

TEST_CASE("dealias zeroes the top third of frequencies") {
    GridSpec g(8.0 * pi, 256); // nyquist xi = 16, cutoff 2/3*16 ~ 10.67
    Field lo(g), hi(g);
    for (int m = 0; m < g.samples; ++m) {
        lo.values[m] = std::polar(1.0, 9.0 * g.x(m));
        hi.values[m] = std::polar(1.0, 12.0 * g.x(m));
    }
    Spectrum slo = forward_transform(lo);
    Spectrum shi = forward_transform(hi);
    dealias(slo);
    dealias(shi);
    double lo_mass = 0.0, hi_mass = 0.0;
    for (const cplx& c : slo.coeffs) lo_mass += std::norm(c);
    for (const cplx& c : shi.coeffs) hi_mass += std::norm(c);
    REQUIRE(lo_mass > 0.5);
    REQUIRE(hi_mass < 1e-20);
}

TEST_CASE("spectral tail fraction") {
    GridSpec g(8.0 * pi, 256);
    Field f(g);
    for (int m = 0; m < g.samples; ++m)
        f.values[m] = std::polar(1.0, 3.0 * g.x(m)) + 0.5 * std::polar(1.0, 9.0 * g.x(m));
    Spectrum s = forward_transform(f);
    const double frac = spectral_tail_fraction(s, 6.0);
    REQUIRE(frac == Catch::Approx(0.25 / 1.25).epsilon(1e-10));
}
