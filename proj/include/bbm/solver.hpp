#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bbm/estimates.hpp"

namespace bbm {

// Cauchy data for u_t + u_x - u_{xxt} + u^lambda u_x = 0 on [0, T], posed on
// the periodic grid carried by u0 (periodicity is a numerical device; data
// must be localized well inside the box).
struct CauchyProblem {
    int lambda = 1;
    Field u0;
    double T = 1.0;

    const GridSpec& grid() const { return u0.grid; }

    void validate() const {
        if (lambda < 1) throw std::invalid_argument("CauchyProblem: lambda must be >= 1");
        if (!(T > 0.0)) throw std::invalid_argument("CauchyProblem: T must be positive");
        if (u0.size() == 0) throw std::invalid_argument("CauchyProblem: empty initial data");
        if (!u0.is_real(1e-10))
            throw std::invalid_argument("CauchyProblem: initial data must be real-valued");
        if (u0.truncation_fraction() > 1e-4)
            throw std::invalid_argument(
                "CauchyProblem: initial data is not localized inside the box");
    }
};

enum class PicardSeed { group_orbit, frozen_data };

struct PicardConfig {
    int max_iter = 25;
    double tol = 1e-10; // sup-in-time L2 distance between successive iterates
    int time_samples = 33;
    QuadRule rule = QuadRule::simpson;
    PicardSeed seed = PicardSeed::group_orbit;
    // After convergence, re-solve with halved time step and flag the run if
    // the trajectories differ by more than tol/10.
    bool check_quadrature = false;

    void validate() const {
        if (!(tol > 0.0)) throw std::invalid_argument("PicardConfig: tol must be positive");
        if (time_samples < 9)
            throw std::invalid_argument("PicardConfig: time_samples must be >= 9");
        if (max_iter < 1) throw std::invalid_argument("PicardConfig: max_iter must be >= 1");
    }
};

struct Conserved {
    double i1 = 0.0;
    double i2 = 0.0;
    double hamiltonian = 0.0;
};

struct SolveReport {
    std::vector<double> iterate_distances;
    std::vector<double> contraction_ratios;
    double final_residual = 0.0;
    Trajectory trajectory;
    bool converged = false;
    int iterations = 0;
    Conserved initial;
    Conserved drift; // max relative drift of each invariant along the trajectory
    bool quadrature_flagged = false;
    double quadrature_delta = 0.0;
};

// Iterates drifted apart for three consecutive steps: the data sits outside
// the contraction regime. Carries whatever was computed before the abort.
struct PicardDivergence : std::runtime_error {
    SolveReport partial;
    PicardDivergence(const std::string& msg, SolveReport rep)
        : std::runtime_error(msg), partial(std::move(rep)) {}
};

namespace detail {

inline double sech(double z) {
    const double a = std::abs(z);
    const double e = std::exp(-a);
    return 2.0 * e / (1.0 + e * e);
}

// A field left the representable range (overflow to inf/NaN); no invariant
// can be judged on it. Distinct from realness loss so iteration drivers can
// classify it as divergence instead of an internal error.
struct NumericBreakdown : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Checks the realness invariant and strips the residual imaginary roundoff so
// it cannot compound across iterations or time steps.
inline Field realized(Field f, const char* where) {
    const double frac = f.imag_mass_fraction();
    if (std::isnan(frac))
        throw NumericBreakdown(std::string(where) +
                               ": non-finite values (floating-point overflow)");
    if (!(frac < 1e-10))
        throw std::runtime_error(std::string(where) +
                                 ": realness lost (imaginary mass above 1e-10)");
    for (cplx& v : f.values) v = cplx{v.real(), 0.0};
    return f;
}

inline double sup_state_l2_distance(const std::vector<Field>& a, const std::vector<Field>& b) {
    double sup = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        Field d(a[j].grid);
        for (int m = 0; m < d.size(); ++m) d.values[m] = a[j].values[m] - b[j].values[m];
        const double v = lp_norm(d, 2.0);
        if (std::isnan(v)) return v;
        sup = std::max(sup, v);
    }
    return sup;
}

} // namespace detail

// Pointwise power u^{lambda+1} followed by a 2/3-rule spectral truncation:
// repeated products spread the spectrum, so the top third of frequencies is
// discarded to keep the power alias-free.
inline Field nonlinearity(const Field& u, int lambda) {
    if (lambda < 1) throw std::invalid_argument("nonlinearity: lambda must be >= 1");
    const double frac = u.imag_mass_fraction();
    if (std::isnan(frac))
        throw detail::NumericBreakdown("nonlinearity: non-finite input field");
    if (!(frac < 1e-10))
        throw std::invalid_argument("nonlinearity: requires a real-valued field");
    Field w(u.grid);
    for (int m = 0; m < u.size(); ++m)
        w.values[m] = std::pow(u.values[m].real(), lambda + 1);
    Spectrum s = forward_transform(w);
    const int cut = u.grid.samples / 3;
    for (int j = s.j_min(); j <= s.j_max(); ++j)
        if (std::abs(j) > cut) s.coeffs[s.slot(j)] = cplx{0.0, 0.0};
    return detail::realized(inverse_transform(s), "nonlinearity");
}

namespace detail {

// Spectrum of -i/(lambda+1) phi(D) [u^{lambda+1}] given the spectrum of u.
inline Spectrum nonlinear_rhs(const Spectrum& uhat, int lambda) {
    Spectrum s = forward_transform(nonlinearity(inverse_transform(uhat), lambda));
    const double scale = -1.0 / (lambda + 1);
    for (int m = 0; m < s.size(); ++m)
        s.coeffs[m] *= cplx{0.0, scale * phi(s.xi_at_slot(m))};
    return s;
}

} // namespace detail

// Integral term of the Duhamel formulation evaluated on the trajectory's own
// time grid:  -i/(lambda+1) int_0^t S(t - tau) phi(D) [v^{lambda+1}(tau)] dtau.
// The multiplier -i phi(xi) has Hermitian symmetry, so the output is real.
inline Trajectory duhamel_apply(const Trajectory& v, int lambda,
                                QuadRule rule = QuadRule::simpson) {
    if (v.size() == 0) throw std::invalid_argument("duhamel_apply: empty trajectory");
    if (v.times.front() != 0.0)
        throw std::invalid_argument("duhamel_apply: time grid must start at 0");
    const SymbolSpec sym{};
    const double scale = -1.0 / (lambda + 1);
    std::vector<Spectrum> src;
    src.reserve(v.size());
    for (const Field& f : v.states) {
        Spectrum s = forward_transform(nonlinearity(f, lambda));
        for (int m = 0; m < s.size(); ++m)
            s.coeffs[m] *= cplx{0.0, scale * phi(s.xi_at_slot(m))};
        src.push_back(std::move(s));
    }
    std::vector<Spectrum> ints = detail::retarded_integrals(sym, src, v.times, rule);
    std::vector<Field> states;
    states.reserve(ints.size());
    for (Spectrum& s : ints)
        states.push_back(detail::realized(inverse_transform(s), "duhamel_apply"));
    return Trajectory(v.times, std::move(states));
}

// Sup-in-time L2 defect of the integral equation
//   u(t) = S(t) u0 - i/(lambda+1) int_0^t S(t - tau) phi(D) u^{lambda+1} dtau,
// relative to max(1, ||u0||_2).
inline double residual(const Trajectory& traj, int lambda, QuadRule rule = QuadRule::simpson) {
    if (traj.size() == 0) throw std::invalid_argument("residual: empty trajectory");
    if (traj.times.front() != 0.0)
        throw std::invalid_argument("residual: trajectory must start at t = 0");
    const Field& u0 = traj.states.front();
    const Trajectory duh = duhamel_apply(traj, lambda, rule);
    const double den = std::max(1.0, lp_norm(u0, 2.0));
    double sup = 0.0;
    for (std::size_t j = 0; j < traj.size(); ++j) {
        const Field orbit = apply_S(traj.times[j], u0);
        Field defect(u0.grid);
        for (int m = 0; m < defect.size(); ++m)
            defect.values[m] =
                traj.states[j].values[m] - orbit.values[m] - duh.states[j].values[m];
        sup = std::max(sup, lp_norm(defect, 2.0));
    }
    return sup / den;
}

// I1 = int u, I2 = int (u^2 + u_x^2), H = int (u^2/2 + u^{lambda+2}/((lambda+1)(lambda+2))),
// with the derivative taken spectrally.
inline Conserved conserved_quantities(const Field& u, int lambda) {
    if (lambda < 1) throw std::invalid_argument("conserved_quantities: lambda must be >= 1");
    if (!u.is_real(1e-10))
        throw std::invalid_argument("conserved_quantities: requires a real-valued field");
    Spectrum s = forward_transform(u);
    for (int m = 0; m < s.size(); ++m) s.coeffs[m] *= cplx{0.0, s.xi_at_slot(m)};
    const Field ux = inverse_transform(s);
    const double dx = u.grid.dx();
    const double denom = static_cast<double>((lambda + 1) * (lambda + 2));
    Conserved c;
    for (int m = 0; m < u.size(); ++m) {
        const double v = u.values[m].real();
        const double vx = ux.values[m].real();
        c.i1 += v;
        c.i2 += v * v + vx * vx;
        c.hamiltonian += 0.5 * v * v + std::pow(v, lambda + 2) / denom;
    }
    c.i1 *= dx;
    c.i2 *= dx;
    c.hamiltonian *= dx;
    return c;
}

// Traveling wave psi(x - ct) with psi = A sech^{2/lambda}(B y). Substituting
// u = psi(x - ct) into the equation and integrating once gives
//   (1 - c) psi + psi^{lambda+1}/(lambda+1) + c psi'' = 0,
// and matching the sech^{2/lambda} and sech^{2/lambda + 2} coefficients fixes
//   A^lambda = (c - 1)(lambda+1)(lambda+2)/2,   B = (lambda/2) sqrt((c-1)/c).
// The profile is periodized by summing a few box images.
inline Field solitary_wave(double c, int lambda, const GridSpec& grid, double t) {
    if (!(c > 1.0))
        throw HypothesisError("solitary_wave: requires wave speed c > 1");
    if (lambda < 1) throw std::invalid_argument("solitary_wave: lambda must be >= 1");
    const double A = std::pow(0.5 * (c - 1.0) * (lambda + 1) * (lambda + 2), 1.0 / lambda);
    const double B = 0.5 * lambda * std::sqrt((c - 1.0) / c);
    const double L = grid.half_width;
    Field out(grid);
    for (int m = 0; m < grid.samples; ++m) {
        const double y = grid.x(m) - c * t;
        double acc = 0.0;
        for (int img = -3; img <= 3; ++img)
            acc += std::pow(detail::sech(B * (y + 2.0 * L * img)), 2.0 / lambda);
        out.values[m] = A * acc;
    }
    return out;
}

// Relative L2 defect of the once-integrated traveling-wave equation.
inline double solitary_residual(const Field& u, double c, int lambda) {
    Spectrum s = forward_transform(u);
    for (int m = 0; m < s.size(); ++m) {
        const double xi = s.xi_at_slot(m);
        s.coeffs[m] *= -xi * xi;
    }
    const Field uxx = inverse_transform(s);
    Field r(u.grid);
    for (int m = 0; m < u.size(); ++m) {
        const double v = u.values[m].real();
        r.values[m] = (1.0 - c) * v + std::pow(v, lambda + 1) / (lambda + 1) +
                      c * uxx.values[m].real();
    }
    return lp_norm(r, 2.0) / std::max(lp_norm(u, 2.0), 1e-300);
}

// Independent cross-check integrator: classical RK4 on the integrating-factor
// form of the spectral ODE  uhat_t = -i phi uhat - i/(lambda+1) phi (u^{lambda+1})^.
// The linear flow is handled exactly by the exponential, so with the
// nonlinearity switched off the stepper reproduces S(t) to roundoff.
inline Trajectory reference_evolve(const CauchyProblem& prob, double dt,
                                   bool include_nonlinearity = true, int max_states = 129) {
    prob.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("reference_evolve: dt must be positive");
    if (max_states < 2) throw std::invalid_argument("reference_evolve: max_states must be >= 2");

    const int nsteps = std::max(1, static_cast<int>(std::ceil(prob.T / dt - 1e-12)));
    const double h = prob.T / nsteps;
    const GridSpec& g = prob.grid();

    std::vector<cplx> e2(g.samples), e1(g.samples);
    for (int m = 0; m < g.samples; ++m) {
        const double xi = g.xi(m - g.samples / 2);
        e2[m] = std::polar(1.0, -0.5 * h * phi(xi));
        e1[m] = e2[m] * e2[m];
    }

    const auto spec_l2 = [](const Spectrum& s) {
        double acc = 0.0;
        for (const cplx& v : s.coeffs) acc += std::norm(v);
        return std::sqrt(acc);
    };
    const auto rhs = [&](const Spectrum& s) {
        if (!include_nonlinearity) return Spectrum(s.grid);
        return detail::nonlinear_rhs(s, prob.lambda);
    };
    const auto mul = [](const std::vector<cplx>& mult, const Spectrum& s) {
        Spectrum out(s.grid);
        for (int m = 0; m < out.size(); ++m) out.coeffs[m] = mult[m] * s.coeffs[m];
        return out;
    };
    const auto axpy = [](Spectrum base, double w, const Spectrum& incr) {
        for (int m = 0; m < base.size(); ++m) base.coeffs[m] += w * incr.coeffs[m];
        return base;
    };

    Spectrum cur = forward_transform(prob.u0);
    const double guard = 1e6 * std::max(spec_l2(cur), 1e-300);

    const int stride = (nsteps + max_states - 2) / (max_states - 1);
    std::vector<double> times{0.0};
    std::vector<Field> states{detail::realized(inverse_transform(cur), "reference_evolve")};

    for (int step = 1; step <= nsteps; ++step) {
        const Spectrum a = rhs(cur);
        const Spectrum b = rhs(mul(e2, axpy(cur, 0.5 * h, a)));
        const Spectrum c = rhs(axpy(mul(e2, cur), 0.5 * h, b));
        const Spectrum d = rhs(axpy(mul(e1, cur), h, mul(e2, c)));
        Spectrum nxt = mul(e1, cur);
        nxt = axpy(std::move(nxt), h / 6.0, mul(e1, a));
        nxt = axpy(std::move(nxt), h / 3.0, mul(e2, b));
        nxt = axpy(std::move(nxt), h / 3.0, mul(e2, c));
        nxt = axpy(std::move(nxt), h / 6.0, d);
        cur = std::move(nxt);
        if (spec_l2(cur) > guard)
            throw std::runtime_error(
                "reference_evolve: instability detected (norm grew beyond 1e6x)");
        if (step % stride == 0 || step == nsteps) {
            const double t = (step == nsteps) ? prob.T : step * h;
            if (t > times.back()) {
                times.push_back(t);
                states.push_back(detail::realized(inverse_transform(cur), "reference_evolve"));
            }
        }
    }

    return Trajectory(std::move(times), std::move(states));
}

// Picard iteration on the Duhamel formulation:
//   u^(0)(t) = S(t) u0 (or u0 frozen),   u^(n+1) = S(t) u0 + duhamel_apply(u^(n)).
// Stops when the sup-in-time L2 distance between successive iterates falls
// below tol; three consecutive distance increases abort with the partial
// report attached, signalling data outside the contraction regime.
inline SolveReport picard_solve(const CauchyProblem& prob, const PicardConfig& cfg) {
    prob.validate();
    cfg.validate();
    const std::vector<double> ts = detail::uniform_grid(0.0, prob.T, cfg.time_samples);

    std::vector<Field> orbit;
    orbit.reserve(ts.size());
    {
        const SymbolSpec sym{};
        const Spectrum s0 = forward_transform(prob.u0);
        for (double t : ts)
            orbit.push_back(detail::realized(
                inverse_transform(detail::advance(sym, -t, s0)), "picard_solve"));
    }

    std::vector<Field> cur;
    if (cfg.seed == PicardSeed::group_orbit) {
        cur = orbit;
    } else {
        cur.assign(ts.size(), prob.u0);
    }

    SolveReport rep;
    rep.initial = conserved_quantities(prob.u0, prob.lambda);
    int growth_streak = 0;
    double prev = -1.0;
    for (int it = 0; it < cfg.max_iter; ++it) {
        Trajectory duh;
        try {
            duh = duhamel_apply(Trajectory(ts, cur), prob.lambda, cfg.rule);
        } catch (const detail::NumericBreakdown& e) {
            rep.trajectory = Trajectory(ts, std::move(cur));
            throw PicardDivergence(std::string("picard_solve: iterate overflow, data far "
                                               "outside the contraction regime (") +
                                       e.what() + ")",
                                   std::move(rep));
        }
        std::vector<Field> nxt;
        nxt.reserve(ts.size());
        for (std::size_t j = 0; j < ts.size(); ++j) {
            Field f(prob.grid());
            for (int m = 0; m < f.size(); ++m)
                f.values[m] = orbit[j].values[m] + duh.states[j].values[m];
            nxt.push_back(std::move(f));
        }
        const double d = detail::sup_state_l2_distance(nxt, cur);
        rep.iterate_distances.push_back(d);
        if (prev > 0.0) rep.contraction_ratios.push_back(d / prev);
        cur = std::move(nxt);
        rep.iterations = it + 1;

        if (!std::isfinite(d) || (prev >= 0.0 && d > prev && ++growth_streak >= 3)) {
            rep.trajectory = Trajectory(ts, std::move(cur));
            throw PicardDivergence(
                "picard_solve: iterates diverging, data too large for the "
                "contraction regime",
                std::move(rep));
        }
        if (prev >= 0.0 && d <= prev) growth_streak = 0;
        prev = d;
        if (d < cfg.tol) {
            rep.converged = true;
            break;
        }
    }

    rep.trajectory = Trajectory(ts, std::move(cur));
    rep.final_residual = residual(rep.trajectory, prob.lambda, cfg.rule);

    const double tiny = 1e-300;
    for (const Field& f : rep.trajectory.states) {
        const Conserved c = conserved_quantities(f, prob.lambda);
        rep.drift.i1 = std::max(rep.drift.i1, std::abs(c.i1 - rep.initial.i1) /
                                                  std::max(std::abs(rep.initial.i1), tiny));
        rep.drift.i2 = std::max(rep.drift.i2, std::abs(c.i2 - rep.initial.i2) /
                                                  std::max(std::abs(rep.initial.i2), tiny));
        rep.drift.hamiltonian =
            std::max(rep.drift.hamiltonian,
                     std::abs(c.hamiltonian - rep.initial.hamiltonian) /
                         std::max(std::abs(rep.initial.hamiltonian), tiny));
    }

    if (cfg.check_quadrature) {
        PicardConfig fine = cfg;
        fine.check_quadrature = false;
        fine.time_samples = 2 * (cfg.time_samples - 1) + 1;
        const SolveReport ref = picard_solve(prob, fine);
        double delta = 0.0;
        for (std::size_t j = 0; j < rep.trajectory.size(); ++j) {
            Field d(prob.grid());
            for (int m = 0; m < d.size(); ++m)
                d.values[m] = rep.trajectory.states[j].values[m] -
                              ref.trajectory.states[2 * j].values[m];
            delta = std::max(delta, lp_norm(d, 2.0));
        }
        rep.quadrature_delta = delta;
        rep.quadrature_flagged = delta > cfg.tol / 10.0;
    }

    return rep;
}

struct XMembershipReport {
    double weighted_sup = 0.0;
    // Relative change of the weighted sup when the window shrinks to its
    // first half; small values mean the sup has stabilized well inside [0, T].
    double window_drift = 0.0;
    bool finite = false;
};

// Measures sup_t (1 + |t|)^rho ||u(t)||_{M^s_{p,q}} over the computed
// trajectory, with (rho, p, q) taken from the exponent pack. The time-weighted
// persistence space only enters the theory for lambda >= 3.
inline XMembershipReport x_space_membership(const Trajectory& traj, const ExponentPack& pack,
                                            double s, const UniformDecomposition& dec) {
    if (pack.lambda < 3)
        throw HypothesisError(
            "x_space_membership: requires lambda >= 3 (time-weighted space regime)");
    if (traj.size() == 0)
        throw std::invalid_argument("x_space_membership: empty trajectory");
    const ModNormParams prm{s, pack.p, pack.q};
    XMembershipReport rep;
    rep.weighted_sup = weighted_sup_norm(traj, pack.rho, prm, dec);
    rep.finite = std::isfinite(rep.weighted_sup);

    const double half = 0.5 * traj.times.back();
    std::vector<double> ht;
    std::vector<Field> hs;
    for (std::size_t j = 0; j < traj.size(); ++j) {
        if (traj.times[j] > half && j > 0) break;
        ht.push_back(traj.times[j]);
        hs.push_back(traj.states[j]);
    }
    const double sup_half = weighted_sup_norm(Trajectory(ht, hs), pack.rho, prm, dec);
    rep.window_drift =
        std::abs(rep.weighted_sup - sup_half) / std::max(rep.weighted_sup, 1e-300);
    return rep;
}

} // namespace bbm
