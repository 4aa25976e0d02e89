#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <utility>
#include <vector>

#include "bbm/solver.hpp"

using namespace bbm;
using Catch::Approx;

namespace {

Field gaussian(const GridSpec& g, double amp, double width) {
    Field f(g);
    for (int m = 0; m < g.samples; ++m) {
        const double x = g.x(m);
        f.values[m] = amp * std::exp(-x * x / (width * width));
    }
    return f;
}

double sup_abs_diff(const Field& a, const Field& b) {
    double sup = 0.0;
    for (int m = 0; m < a.size(); ++m) sup = std::max(sup, std::abs(a.values[m] - b.values[m]));
    return sup;
}

double l2_diff(const Field& a, const Field& b) {
    Field d(a.grid);
    for (int m = 0; m < a.size(); ++m) d.values[m] = a.values[m] - b.values[m];
    return lp_norm(d, 2.0);
}

} // namespace

TEST_CASE("nonlinearity: pointwise power with dealiasing and a realness gate") {
    const GridSpec g(8.0 * pi, 128);

    const Field zero(g);
    const Field nz = nonlinearity(zero, 3);
    for (const cplx& v : nz.values) REQUIRE(std::abs(v) == 0.0);

    Field u(g);
    for (int m = 0; m < g.samples; ++m) u.values[m] = std::cos(g.x(m));
    const Field sq = nonlinearity(u, 1);
    for (int m = 0; m < g.samples; ++m) {
        const double want = 0.5 * (1.0 + std::cos(2.0 * g.x(m)));
        REQUIRE(sq.values[m].real() == Approx(want).margin(1e-12));
        REQUIRE(std::abs(sq.values[m].imag()) < 1e-12);
    }

    Field bad(g);
    bad.values[0] = cplx{0.0, 1.0};
    REQUIRE_THROWS_AS(nonlinearity(bad, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(nonlinearity(u, 0), std::invalid_argument);
}

TEST_CASE("nonlinearity: matches a pointwise power on the refined grid") {
    const GridSpec coarse(8.0 * pi, 256);
    const GridSpec fine = coarse.refined();
    const Field cube = nonlinearity(gaussian(coarse, 1.0, std::sqrt(8.0)), 2);

    Field fw(fine);
    for (int m = 0; m < fine.samples; ++m) {
        const double x = fine.x(m);
        const double v = std::exp(-x * x / 8.0);
        fw.values[m] = v * v * v;
    }
    Spectrum fs = forward_transform(fw);
    const int cut = coarse.samples / 3; // same xi cutoff: the lattice is shared
    for (int j = fs.j_min(); j <= fs.j_max(); ++j)
        if (std::abs(j) > cut) fs.coeffs[fs.slot(j)] = cplx{0.0, 0.0};
    const Field ref = inverse_transform(fs);

    for (int m = 0; m < coarse.samples; ++m)
        REQUIRE(std::abs(cube.values[m] - ref.values[2 * m]) < 1e-10);
}

TEST_CASE("duhamel integral: zero input, zero slice at t = 0, two-mode closed form") {
    const GridSpec g(8.0 * pi, 128);
    const std::vector<double> ts = detail::uniform_grid(0.0, 2.0, 33);

    const Trajectory zt(ts, std::vector<Field>(ts.size(), Field(g)));
    const Trajectory zd = duhamel_apply(zt, 1);
    for (const Field& f : zd.states)
        for (const cplx& v : f.values) REQUIRE(std::abs(v) == 0.0);

    const double eps = 0.1;
    Field v0(g);
    for (int m = 0; m < g.samples; ++m) v0.values[m] = eps * std::cos(g.x(m));
    const Trajectory frozen(ts, std::vector<Field>(ts.size(), v0));
    const Trajectory duh = duhamel_apply(frozen, 1);

    for (const cplx& v : duh.states.front().values) REQUIRE(std::abs(v) == 0.0);

    // Frozen v: modes 0 and +-2 of v^2; phi(0) = 0 kills the mean and each
    // remaining mode integrates to -(c_xi/2)(1 - e^{-i t phi(xi)}).
    const double p2 = phi(2.0);
    const double t = ts.back();
    for (int m = 0; m < g.samples; ++m) {
        const double x = g.x(m);
        const double want =
            -(eps * eps / 4.0) * (std::cos(2.0 * x) - std::cos(2.0 * x - p2 * t));
        REQUIRE(duh.states.back().values[m].real() == Approx(want).margin(1e-9));
    }
}

TEST_CASE("reference integrator: exact linear flow and fourth-order convergence") {
    const GridSpec g(8.0 * pi, 128);

    CauchyProblem zero{1, Field(g), 1.0};
    const Trajectory zt = reference_evolve(zero, 0.1);
    for (const Field& f : zt.states)
        for (const cplx& v : f.values) REQUIRE(std::abs(v) == 0.0);

    CauchyProblem lin{1, gaussian(g, 0.05, 1.0), 2.0};
    const Trajectory lt = reference_evolve(lin, 0.01, false);
    REQUIRE(sup_abs_diff(lt.states.back(), apply_S(2.0, lin.u0)) < 1e-10);

    CauchyProblem prob{1, gaussian(g, 0.5, 2.0), 2.0};
    const Field f1 = reference_evolve(prob, 0.05).states.back();
    const Field f2 = reference_evolve(prob, 0.025).states.back();
    const Field f3 = reference_evolve(prob, 0.0125).states.back();
    const double e1 = l2_diff(f1, f2);
    const double e2 = l2_diff(f2, f3);
    REQUIRE(e1 > 1e-13);
    REQUIRE(e1 / e2 > 10.0);
    REQUIRE(e1 / e2 < 24.0);
}

TEST_CASE("conserved quantities: closed forms on cos and invariance along the flow") {
    const GridSpec g(8.0 * pi, 256);
    const double L = g.half_width;

    const Conserved cz = conserved_quantities(Field(g), 1);
    REQUIRE(cz.i1 == 0.0);
    REQUIRE(cz.i2 == 0.0);
    REQUIRE(cz.hamiltonian == 0.0);

    Field u(g);
    for (int m = 0; m < g.samples; ++m) u.values[m] = std::cos(g.x(m));
    const Conserved c = conserved_quantities(u, 1);
    REQUIRE(std::abs(c.i1) < 1e-10);
    REQUIRE(c.i2 == Approx(2.0 * L).epsilon(1e-12));
    REQUIRE(c.hamiltonian == Approx(0.5 * L).epsilon(1e-12));

    CauchyProblem prob{1, gaussian(g, 0.01, 1.0), 10.0};
    const Trajectory traj = reference_evolve(prob, 0.02);
    const Conserved c0 = conserved_quantities(traj.states.front(), 1);
    double d1 = 0.0, d2 = 0.0, dh = 0.0;
    for (const Field& f : traj.states) {
        const Conserved ct = conserved_quantities(f, 1);
        d1 = std::max(d1, std::abs(ct.i1 - c0.i1) / std::abs(c0.i1));
        d2 = std::max(d2, std::abs(ct.i2 - c0.i2) / std::abs(c0.i2));
        dh = std::max(dh, std::abs(ct.hamiltonian - c0.hamiltonian) / std::abs(c0.hamiltonian));
    }
    REQUIRE(d1 < 1e-8);
    REQUIRE(d2 < 1e-8);
    REQUIRE(dh < 1e-6);
}

TEST_CASE("solitary wave: traveling-wave equation residual, translation, rejection") {
    const GridSpec g(8.0 * pi, 256);

    for (const auto& [c, lam] : std::vector<std::pair<double, int>>{{1.5, 1}, {2.0, 1}, {2.0, 2}}) {
        const Field psi = solitary_wave(c, lam, g, 0.0);
        REQUIRE(solitary_residual(psi, c, lam) < 1e-8);
    }

    REQUIRE_THROWS_AS(solitary_wave(1.0, 1, g, 0.0), HypothesisError);
    REQUIRE_THROWS_AS(solitary_wave(0.5, 1, g, 0.0), HypothesisError);

    // Translated profile equals the spectral shift of the t = 0 profile.
    const double c = 1.5, t = 0.7;
    const Field at_t = solitary_wave(c, 1, g, t);
    Spectrum s = forward_transform(solitary_wave(c, 1, g, 0.0));
    for (int m = 0; m < s.size(); ++m)
        s.coeffs[m] *= std::polar(1.0, -s.xi_at_slot(m) * c * t);
    REQUIRE(sup_abs_diff(at_t, inverse_transform(s)) < 1e-10);

    // A mistuned amplitude is no longer a traveling wave.
    Field off = solitary_wave(c, 1, g, 0.0);
    for (cplx& v : off.values) v *= 1.05;
    REQUIRE(solitary_residual(off, c, 1) > 1e-4);
}

TEST_CASE("solitary wave: propagation and invariants under the reference integrator") {
    const GridSpec g(8.0 * pi, 256);
    const double c = 1.5, T = 10.0;
    CauchyProblem prob{1, solitary_wave(c, 1, g, 0.0), T};
    const Trajectory traj = reference_evolve(prob, 0.005);

    const Field want = solitary_wave(c, 1, g, T);
    REQUIRE(l2_diff(traj.states.back(), want) / lp_norm(want, 2.0) < 1e-3);

    const Conserved c0 = conserved_quantities(traj.states.front(), 1);
    double d1 = 0.0, d2 = 0.0;
    for (const Field& f : traj.states) {
        const Conserved ct = conserved_quantities(f, 1);
        d1 = std::max(d1, std::abs(ct.i1 - c0.i1) / std::abs(c0.i1));
        d2 = std::max(d2, std::abs(ct.i2 - c0.i2) / std::abs(c0.i2));
    }
    REQUIRE(d1 < 1e-8);
    REQUIRE(d2 < 1e-8);
}

TEST_CASE("picard iteration: zero data and the small-data contraction regime") {
    const GridSpec g(8.0 * pi, 256);

    CauchyProblem zero{1, Field(g), 1.0};
    const SolveReport zr = picard_solve(zero, PicardConfig{});
    REQUIRE(zr.converged);
    REQUIRE(zr.final_residual == 0.0);
    for (const Field& f : zr.trajectory.states)
        for (const cplx& v : f.values) REQUIRE(std::abs(v) == 0.0);

    CauchyProblem prob{1, gaussian(g, 0.01, 1.0), 1.0};
    PicardConfig cfg;
    cfg.tol = 1e-12;
    const SolveReport rep = picard_solve(prob, cfg);
    REQUIRE(rep.converged);
    REQUIRE(!rep.contraction_ratios.empty());
    for (double r : rep.contraction_ratios) REQUIRE(r < 0.1);
    REQUIRE(rep.final_residual < cfg.tol);
    REQUIRE(rep.drift.i1 < 1e-8);
    REQUIRE(rep.drift.i2 < 1e-6);
    for (const Field& f : rep.trajectory.states) REQUIRE(f.is_real(1e-10));
}

TEST_CASE("picard iteration: the integral-equation defect detects a wrong solution") {
    const GridSpec g(8.0 * pi, 256);
    const Field u0 = gaussian(g, 0.01, 1.0);
    const std::vector<double> ts = detail::uniform_grid(0.0, 1.0, 17);
    const Trajectory frozen(ts, std::vector<Field>(ts.size(), u0));
    REQUIRE(residual(frozen, 1) > 1e-6);
}

TEST_CASE("picard iteration: agreement with the reference integrator") {
    const GridSpec g(8.0 * pi, 256);
    CauchyProblem prob{1, gaussian(g, 0.01, 1.0), 1.0};
    PicardConfig cfg;
    cfg.tol = 1e-12;
    const SolveReport rep = picard_solve(prob, cfg);
    const Trajectory ref = reference_evolve(prob, 1.0 / 256.0, true, 33);
    REQUIRE(l2_diff(rep.trajectory.states.back(), ref.states.back()) < 1e-5);
    REQUIRE(residual(ref, 1) < 1e-5);
}

TEST_CASE("picard iteration: divergence for large data carries a partial report") {
    const GridSpec g(8.0 * pi, 256);
    CauchyProblem prob{1, gaussian(g, 30.0, 1.0), 1.0};
    PicardConfig cfg;
    cfg.time_samples = 17;
    cfg.max_iter = 30;
    try {
        picard_solve(prob, cfg);
        FAIL("expected divergence");
    } catch (const PicardDivergence& e) {
        REQUIRE(e.partial.iterate_distances.size() >= 4);
        REQUIRE(e.partial.iterate_distances.back() > e.partial.iterate_distances.front());
        REQUIRE(e.partial.trajectory.size() == 17);
    }
}

TEST_CASE("picard iteration: overflow past representable range is still divergence") {
    // Iterates jump to inf/NaN within a step or two; the breakdown must be
    // classified as divergence, not reported as convergence on a NaN
    // trajectory (accumulators built on max would silently drop NaN norms).
    const GridSpec g(8.0 * pi, 256);
    for (const auto& [lam, amp] : std::vector<std::pair<int, double>>{
             {3, 500.0}, {3, 1e6}, {6, 1e8}, {2, 1e150}}) {
        PicardConfig cfg;
        cfg.time_samples = 9;
        cfg.max_iter = 12;
        CAPTURE(lam, amp);
        REQUIRE_THROWS_AS(picard_solve(CauchyProblem{lam, gaussian(g, amp, 1.0), 1.0}, cfg),
                          PicardDivergence);
    }
}

TEST_CASE("field diagnostics: imaginary mass fraction survives extreme scales") {
    const GridSpec g(4.0, 8);
    Field f(g);
    for (int m = 0; m < f.size(); ++m) f.values[m] = cplx{1e200, 1e188};
    REQUIRE(f.imag_mass_fraction() == Approx(1e-24).epsilon(1e-12));
    REQUIRE(f.is_real(1e-10));

    f.values[3] = cplx{std::numeric_limits<double>::infinity(), 0.0};
    REQUIRE(std::isnan(f.imag_mass_fraction()));
    REQUIRE_FALSE(f.is_real(1e-10));

    f.values[3] = cplx{std::numeric_limits<double>::quiet_NaN(), 0.0};
    REQUIRE(std::isnan(f.imag_mass_fraction()));
    REQUIRE_FALSE(f.is_real(1e-10));
}

TEST_CASE("picard iteration: contraction ratios scale like the data power") {
    const GridSpec g(8.0 * pi, 256);
    const std::vector<std::pair<int, double>> cases{{1, 0.1}, {2, 0.4}, {3, 0.6}};
    for (const auto& [lam, alpha] : cases) {
        PicardConfig cfg;
        cfg.tol = 1e-12;
        cfg.max_iter = 40;
        const SolveReport full =
            picard_solve(CauchyProblem{lam, gaussian(g, alpha, 1.0), 1.0}, cfg);
        const SolveReport half =
            picard_solve(CauchyProblem{lam, gaussian(g, 0.5 * alpha, 1.0), 1.0}, cfg);
        REQUIRE(!full.contraction_ratios.empty());
        REQUIRE(!half.contraction_ratios.empty());
        const double scale = full.contraction_ratios.front() / half.contraction_ratios.front();
        const double want = std::pow(2.0, lam);
        REQUIRE(scale > 0.5 * want);
        REQUIRE(scale < 2.0 * want);
    }
}

TEST_CASE("picard iteration: both seeds reach the same fixed point for small data") {
    const GridSpec g(8.0 * pi, 256);
    CauchyProblem prob{1, gaussian(g, 0.01, 1.0), 1.0};
    PicardConfig a;
    a.tol = 1e-10;
    PicardConfig b = a;
    b.seed = PicardSeed::frozen_data;
    const SolveReport ra = picard_solve(prob, a);
    const SolveReport rb = picard_solve(prob, b);
    REQUIRE(ra.converged);
    REQUIRE(rb.converged);
    double sup = 0.0;
    for (std::size_t j = 0; j < ra.trajectory.size(); ++j)
        sup = std::max(sup, l2_diff(ra.trajectory.states[j], rb.trajectory.states[j]));
    REQUIRE(sup <= 2.0 * a.tol);
}

TEST_CASE("picard iteration: time-continuity modulus shrinks with the sampling step") {
    const GridSpec g(8.0 * pi, 256);
    const UniformDecomposition dec = build_decomposition(g, 12);
    const ModNormParams prm{0.0, 2.0, 2.0};
    CauchyProblem prob{1, gaussian(g, 0.01, 1.0), 1.0};

    const auto modulus = [&](int samples) {
        PicardConfig cfg;
        cfg.tol = 1e-12;
        cfg.time_samples = samples;
        const Trajectory traj = picard_solve(prob, cfg).trajectory;
        double sup = 0.0;
        for (std::size_t j = 1; j < traj.size(); ++j) {
            Field d(g);
            for (int m = 0; m < d.size(); ++m)
                d.values[m] = traj.states[j].values[m] - traj.states[j - 1].values[m];
            sup = std::max(sup, mod_norm(d, prm, dec));
        }
        return sup;
    };

    const double coarse = modulus(17);
    const double fine = modulus(33);
    REQUIRE(fine > 0.0);
    REQUIRE(fine < 0.7 * coarse);
}

TEST_CASE("picard iteration: quadrature under-resolution flag") {
    const GridSpec g(8.0 * pi, 256);

    CauchyProblem rough{1, gaussian(g, 0.2, 2.0), 4.0};
    PicardConfig coarse;
    coarse.time_samples = 9;
    coarse.max_iter = 40;
    coarse.check_quadrature = true;
    REQUIRE(picard_solve(rough, coarse).quadrature_flagged);

    CauchyProblem mild{1, gaussian(g, 0.01, 1.0), 1.0};
    PicardConfig dense;
    dense.time_samples = 65;
    dense.check_quadrature = true;
    const SolveReport rep = picard_solve(mild, dense);
    REQUIRE(!rep.quadrature_flagged);
    REQUIRE(rep.quadrature_delta < 1e-11);
}

TEST_CASE("x-space membership: weighted sup, window stability, hypothesis gate") {
    const GridSpec g(8.0 * pi, 256);
    const UniformDecomposition dec = build_decomposition(g, 12);

    const ExponentPack pack3 = exponent_pack(3, -2.0, 0.5);
    const std::vector<double> zt{0.0, 1.0, 2.0};
    const Trajectory zero(zt, std::vector<Field>(zt.size(), Field(g)));
    const XMembershipReport zr = x_space_membership(zero, pack3, 0.0, dec);
    REQUIRE(zr.weighted_sup == 0.0);
    REQUIRE(zr.finite);

    CauchyProblem prob{3, gaussian(g, 0.3, 1.0), 2.0};
    PicardConfig cfg;
    cfg.tol = 1e-12;
    const SolveReport rep = picard_solve(prob, cfg);
    REQUIRE(rep.converged);
    const XMembershipReport xr = x_space_membership(rep.trajectory, pack3, 0.0, dec);
    REQUIRE(xr.finite);
    REQUIRE(xr.weighted_sup > 0.0);
    REQUIRE(xr.window_drift < 0.05);

    const ExponentPack pack1 = exponent_pack(1, -2.0, 0.5);
    REQUIRE_THROWS_WITH(x_space_membership(rep.trajectory, pack1, 0.0, dec),
                        Catch::Matchers::ContainsSubstring("lambda >= 3"));
}
