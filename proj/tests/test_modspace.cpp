#include <catch2/catch_amalgamated.hpp>

#include "bbm/modnorm.hpp"
#include "support.hpp"

using namespace bbm;

namespace {
const GridSpec small_grid(16.0 * pi, 1024); // nyquist 32
}

TEST_CASE("partition of unity and box lower bound") {
    for (const BumpProfile& prof : {default_bump(), raised_cosine_bump()}) {
        UniformDecomposition dec = build_decomposition(small_grid, 12, prof);
        REQUIRE(dec.partition_residual < 1e-12);
        REQUIRE(dec.box_lower_bound >= 1.0 / 3.0);
    }
    // sigma_0(0) = 1 for the default profile: neighbours vanish at distance 1
    UniformDecomposition dec = build_decomposition(small_grid, 12);
    const BlockBand& b = dec.band(0);
    const int slot0 = small_grid.samples / 2; // xi = 0
    REQUIRE(b.weights[static_cast<std::size_t>(slot0 - b.slot_begin)] ==
            Catch::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("decomposition rejects bad inputs") {
    REQUIRE_THROWS_AS(build_decomposition(small_grid, 31), std::invalid_argument);
    REQUIRE_THROWS_AS(build_decomposition(small_grid, 0), std::invalid_argument);
    BumpProfile bad{"no-plateau", [](double d) { return std::max(0.0, 1.0 - std::abs(d)); }};
    REQUIRE_THROWS_AS(build_decomposition(small_grid, 12, bad), std::invalid_argument);
}

TEST_CASE("block support and single-mode action") {
    UniformDecomposition dec = build_decomposition(small_grid, 12);
    Field u(small_grid);
    for (int m = 0; m < small_grid.samples; ++m)
        u.values[m] = std::polar(1.0, 3.0 * small_grid.x(m));
    // sigma_3(3) = 1, neighbours vanish
    Field b3 = block(u, 3, dec);
    Field b5 = block(u, 5, dec);
    double err = 0.0, mass5 = 0.0;
    for (int m = 0; m < small_grid.samples; ++m) {
        err = std::max(err, std::abs(b3.values[m] - u.values[m]));
        mass5 = std::max(mass5, std::abs(b5.values[m]));
    }
    REQUIRE(err < 1e-12);
    REQUIRE(mass5 < 1e-13);
}

TEST_CASE("blocks reconstruct band-limited fields") {
    UniformDecomposition dec = build_decomposition(small_grid, 12);
    Field u = testsup::band_limited(small_grid, 8.0, 3);
    Field sum(small_grid);
    for (int k = -dec.k_max; k <= dec.k_max; ++k) {
        Field bk = block(u, k, dec);
        for (int m = 0; m < small_grid.samples; ++m) sum.values[m] += bk.values[m];
    }
    double err = 0.0, scale = 0.0;
    for (int m = 0; m < small_grid.samples; ++m) {
        err = std::max(err, std::abs(sum.values[m] - u.values[m]));
        scale = std::max(scale, std::abs(u.values[m]));
    }
    REQUIRE(err < 1e-10 * scale);
}

TEST_CASE("block commutes with Fourier multipliers") {
    UniformDecomposition dec = build_decomposition(small_grid, 12);
    Field u = testsup::band_limited(small_grid, 6.0, 9);
    auto m = [](double xi) { return std::polar(1.0 / (1.0 + 0.3 * xi * xi), 0.7 * xi); };
    Field lhs = block(apply_multiplier(u, m), 4, dec);
    Field rhs = apply_multiplier(block(u, 4, dec), m);
    double err = 0.0, scale = lp_norm(u, inf);
    for (int i = 0; i < small_grid.samples; ++i)
        err = std::max(err, std::abs(lhs.values[i] - rhs.values[i]));
    REQUIRE(err < 1e-12 * scale);
}

TEST_CASE("mod_norm of a single integer mode has closed form") {
    UniformDecomposition dec = build_decomposition(small_grid, 12);
    Field u(small_grid);
    for (int m = 0; m < small_grid.samples; ++m)
        u.values[m] = std::polar(1.0, 3.0 * small_grid.x(m));
    const double L = small_grid.half_width;
    ModNormParams prm{0.7, 4.0, 2.0};
    const double expect = std::pow(4.0, 0.7) * std::pow(2.0 * L, 1.0 / 4.0);
    REQUIRE(mod_norm(u, prm, dec) == Catch::Approx(expect).epsilon(1e-10));
}

TEST_CASE("M^0_{2,2} is equivalent to L2 with overlap constants") {
    UniformDecomposition dec = build_decomposition(small_grid, 12);
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
        Field u = testsup::band_limited(small_grid, 8.0, seed);
        const double ratio = mod_norm(u, ModNormParams{0.0, 2.0, 2.0}, dec) / lp_norm(u, 2.0);
        REQUIRE(ratio >= 1.0 / std::sqrt(3.0) - 1e-12);
        REQUIRE(ratio <= 1.0 + 1e-12);
    }
}

TEST_CASE("embedding monotonicity in s and q") {
    UniformDecomposition dec = build_decomposition(small_grid, 12);
    testsup::Rng rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        Field u = testsup::band_limited(small_grid, 8.0, 1000 + trial);
        const double p = rng.uniform(1.0, 6.0);
        const double s2 = rng.uniform(-2.0, 2.0);
        const double s1 = s2 + rng.uniform(0.0, 2.0);
        const double q1 = rng.uniform(1.0, 4.0);
        const double q2 = q1 + rng.uniform(0.0, 4.0);
        const double lo = mod_norm(u, ModNormParams{s2, p, q2}, dec);
        const double hi = mod_norm(u, ModNormParams{s1, p, q1}, dec);
        REQUIRE(lo <= hi * (1.0 + 1e-12));
    }
}

TEST_CASE("profile robustness of the norm") {
    UniformDecomposition d1 = build_decomposition(small_grid, 12, default_bump());
    UniformDecomposition d2 = build_decomposition(small_grid, 12, raised_cosine_bump());
    UniformDecomposition r1 = build_decomposition(small_grid.refined(), 12, default_bump());
    UniformDecomposition r2 = build_decomposition(small_grid.refined(), 12, raised_cosine_bump());
    ModNormParams prm{0.5, 3.0, 2.0};
    Field u = testsup::band_limited(small_grid, 8.0, 21);
    Field ur = testsup::band_limited(small_grid.refined(), 8.0, 21);
    const double ratio = mod_norm(u, prm, d1) / mod_norm(u, prm, d2);
    REQUIRE(ratio > 0.1);
    REQUIRE(ratio < 10.0);
    const double ratio_ref = mod_norm(ur, prm, r1) / mod_norm(ur, prm, r2);
    REQUIRE(ratio_ref == Catch::Approx(ratio).epsilon(0.02));
}

TEST_CASE("block norms obey a uniform Bernstein constant") {
    UniformDecomposition dec = build_decomposition(small_grid, 12);
    auto worst_ratio = [&](std::uint64_t seed0, int count) {
        double worst = 0.0;
        for (int i = 0; i < count; ++i) {
            Field u = testsup::band_limited(small_grid, 10.0, seed0 + i);
            Spectrum s = forward_transform(u);
            for (int k = -dec.k_max; k <= dec.k_max; ++k) {
                const double l2 = detail::block_lp_from_band(s, k, dec, 2.0);
                if (l2 < 1e-12) continue;
                const double li = detail::block_lp_from_band(s, k, dec, inf);
                worst = std::max(worst, li / l2);
            }
        }
        return worst;
    };
    const double c_cal = worst_ratio(500, 8);
    const double c_val = worst_ratio(900, 8);
    REQUIRE(c_val <= 2.0 * c_cal);
}

TEST_CASE("nu1 regions, values, and boundary agreement") {
    REQUIRE(nu1(2.0, 2.0) == Catch::Approx(0.0).margin(1e-14));
    REQUIRE(nu1(1.0, 1.0) == Catch::Approx(1.0).epsilon(1e-14));
    REQUIRE(nu1(inf, 1.0) == Catch::Approx(1.0).epsilon(1e-14));
    REQUIRE(nu1(inf, inf) == Catch::Approx(0.0).margin(1e-14));
    REQUIRE(nu1(4.0, 3.0) == Catch::Approx(1.0 / 3.0 - 1.0 / 4.0).epsilon(1e-12));
    // sweep a lattice including region boundaries; agreement is asserted inside
    for (int i = 0; i <= 20; ++i)
        for (int j = 0; j <= 20; ++j) {
            const double a = i / 20.0, b = j / 20.0;
            const double p = a == 0.0 ? inf : 1.0 / a;
            const double q = b == 0.0 ? inf : 1.0 / b;
            REQUIRE_NOTHROW(nu1(p, q));
            REQUIRE(nu1(p, q) >= -1e-14);
        }
}

TEST_CASE("mixed time norms and Minkowski ordering") {
    UniformDecomposition dec = build_decomposition(small_grid, 12);
    std::vector<double> times;
    std::vector<Field> states;
    Field f = testsup::band_limited(small_grid, 6.0, 13);
    for (int i = 0; i <= 16; ++i) {
        const double t = i * 0.5;
        times.push_back(t);
        states.push_back(apply_multiplier(f, [t](double xi) {
            return std::exp(-0.05 * t) * std::polar(1.0, -t * xi * xi / (1.0 + xi * xi));
        }));
    }
    Trajectory traj(times, states);
    ModNormParams prm{0.3, 4.0, 2.0};
    const double gamma_hi = 8.0;
    const double to = mixed_time_norm(traj, prm, dec, gamma_hi, Nesting::time_outside);
    const double bo = mixed_time_norm(traj, prm, dec, gamma_hi, Nesting::blocks_outside);
    REQUIRE(to <= bo * (1.0 + 1e-12));
    // reversed ordering when gamma <= q
    const double to2 = mixed_time_norm(traj, prm, dec, 1.5, Nesting::time_outside);
    const double bo2 = mixed_time_norm(traj, prm, dec, 1.5, Nesting::blocks_outside);
    REQUIRE(bo2 <= to2 * (1.0 + 1e-12));
    // gamma = inf: sup over samples
    const double toi = mixed_time_norm(traj, prm, dec, inf, Nesting::time_outside);
    double sup = 0.0;
    for (const Field& st : states) sup = std::max(sup, mod_norm(st, prm, dec));
    REQUIRE(toi == Catch::Approx(sup).epsilon(1e-12));
}

TEST_CASE("weighted sup norm") {
    UniformDecomposition dec = build_decomposition(small_grid, 12);
    Field f = testsup::band_limited(small_grid, 4.0, 31);
    Trajectory traj({0.0, 1.0, 3.0}, {f, f, f});
    ModNormParams prm{0.0, 2.0, 2.0};
    const double base = mod_norm(f, prm, dec);
    REQUIRE(weighted_sup_norm(traj, 0.5, prm, dec) == Catch::Approx(2.0 * base).epsilon(1e-12));
}

TEST_CASE("q = inf is rejected") {
    UniformDecomposition dec = build_decomposition(small_grid, 12);
    Field f = testsup::band_limited(small_grid, 4.0, 31);
    REQUIRE_THROWS_AS(mod_norm(f, ModNormParams{0.0, 2.0, inf}, dec), std::invalid_argument);
}
