#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bbm/decomposition.hpp"
#include "bbm/exponents.hpp"
#include "bbm/families.hpp"
#include "bbm/group.hpp"
#include "bbm/modnorm.hpp"
#include "bbm/quadrature.hpp"
#include "bbm/reports.hpp"
#include "bbm/spectral.hpp"

namespace bbm {

// L^p norm of (1 + D^2)^{sigma/2} u.
inline double sobolev_norm(const Field& u, double sigma, double p) {
    return lp_norm(apply_bessel(sigma, u), p);
}

namespace detail {

inline std::vector<double> log_grid(double a, double b, int n) {
    if (!(a > 0.0) || !(b > a) || n < 2)
        throw std::invalid_argument("log_grid: need 0 < a < b and n >= 2");
    std::vector<double> t(static_cast<std::size_t>(n));
    const double la = std::log(a), lb = std::log(b);
    for (int i = 0; i < n; ++i)
        t[static_cast<std::size_t>(i)] = std::exp(la + (lb - la) * i / (n - 1));
    t.front() = a;
    t.back() = b;
    return t;
}

inline std::vector<double> uniform_grid(double t0, double t1, int n) {
    if (!(t1 > t0) || n < 2) throw std::invalid_argument("uniform_grid: need t1 > t0 and n >= 2");
    std::vector<double> t(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        t[static_cast<std::size_t>(i)] = t0 + (t1 - t0) * i / (n - 1);
    t.back() = t1;
    return t;
}

inline BumpProfile profile_by_name(const std::string& name) {
    if (name == "smooth-bump") return default_bump();
    if (name == "raised-cosine") return raised_cosine_bump();
    throw std::invalid_argument("profile_by_name: unknown profile '" + name + "'");
}

} // namespace detail

// Quotients of the dispersive decay bound on the free group smoothed by
// J^sigma: |J^sigma S(t) f|_p against |t|^{2(1/2 - 1/p) beta(sigma)} |f|_p'.
inline QuotientReport decay_quotients(const TestFamily& fam, double sigma, double p,
                                      const std::vector<double>& t_grid, const GridSpec& grid) {
    if (!(sigma < -1.0)) throw HypothesisError("decay_quotients: requires sigma < -1");
    if (!(p >= 2.0)) throw HypothesisError("decay_quotients: requires 2 <= p <= inf");
    for (double t : t_grid)
        if (!(t > 0.0)) throw std::invalid_argument("decay_quotients: t grid must be positive");

    const double expo = 2.0 * (0.5 - (p == inf ? 0.0 : 1.0 / p)) * beta(sigma);
    const double pc = conjugate_exponent(p);
    QuotientReport rep;
    rep.kind = "decay";
    for (int i = 0; i < fam.count; ++i) {
        const Field f = make_member(fam, i, grid);
        const double base = lp_norm(f, pc);
        if (!(base > 0.0)) continue;
        for (double t : t_grid) {
            const double num = sobolev_norm(apply_S(t, f), sigma, p);
            const double den = std::pow(t, expo) * base;
            rep.samples.push_back({i, t, num / den, num, den});
            rep.sup_quotient = std::max(rep.sup_quotient, num / den);
        }
    }
    return rep;
}

// Least-squares slope of log(value) against log(t) over [t_min, t_max].
inline DecayFit fit_decay_slope(const std::vector<double>& ts, const std::vector<double>& values,
                                double t_min, double t_max, double target_exponent) {
    if (ts.size() != values.size())
        throw std::invalid_argument("fit_decay_slope: t and value arrays differ in length");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] < t_min || ts[i] > t_max) continue;
        if (!(ts[i] > 0.0) || !(values[i] > 0.0))
            throw std::invalid_argument("fit_decay_slope: samples must be positive");
        lx.push_back(std::log(ts[i]));
        ly.push_back(std::log(values[i]));
    }
    if (lx.size() < 8)
        throw std::invalid_argument("fit_decay_slope: needs at least 8 samples in the window");
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    DecayFit fit;
    fit.t_min = t_min;
    fit.t_max = t_max;
    fit.target_exponent = target_exponent;
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    double rss = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
        rss += r * r;
    }
    fit.residual = std::sqrt(rss / n);
    return fit;
}

namespace detail {

inline double envelope_value(double t, double eps, double N, double sigma) {
    const double root = 1.0 / std::sqrt(std::abs(t));
    const double big = std::max(std::pow(N, 1.5), 1.0 / std::sqrt(eps));
    return eps + (1.0 - sigma) * root / std::sqrt(eps) +
           root * big * (std::pow(N, sigma) + std::pow(std::sqrt(3.0) + eps, sigma)) -
           std::pow(N, sigma + 1.0) / (sigma + 1.0);
}

} // namespace detail

// Explicit decay envelope for J^sigma S(t) from L^1 to L^inf, split into a
// stationary-band term, a curvature term, and frequency tails.
inline double decay_envelope(double t, double eps, double N, double sigma) {
    if (!(eps > 0.0) || !(eps < 0.125))
        throw HypothesisError("decay_envelope: requires 0 < eps < 1/8");
    if (!(N > 2.0)) throw HypothesisError("decay_envelope: requires N > 2");
    if (!(sigma < 0.0) || sigma == -1.0)
        throw HypothesisError("decay_envelope: requires sigma < 0, sigma != -1");
    if (t == 0.0) throw HypothesisError("decay_envelope: requires t != 0");
    return detail::envelope_value(t, eps, N, sigma);
}

struct EnvelopeParams {
    double theta = 0.0, N = 0.0, eps = 0.0;
};

// The balance N = 2 t^theta, eps = N^{-3} with theta = 1/(1 - 2 sigma) makes
// every envelope term decay at the common rate t^{beta(sigma)}.
inline EnvelopeParams calibrated_envelope_params(double t, double sigma) {
    if (!(t >= 1.0))
        throw std::invalid_argument("calibrated_envelope_params: requires t >= 1");
    if (!(sigma < -1.0))
        throw std::invalid_argument("calibrated_envelope_params: requires sigma < -1");
    EnvelopeParams prm;
    prm.theta = 1.0 / (1.0 - 2.0 * sigma);
    prm.N = 2.0 * std::pow(t, prm.theta);
    prm.eps = std::pow(prm.N, -3.0);
    return prm;
}

// At t = 1 the balanced parameters land exactly on the boundary N = 2,
// eps = 1/8. The envelope expression is continuous there, so the calibrated
// path evaluates it directly instead of routing through the strict-domain
// entry point.
inline double calibrated_envelope(double t, double sigma) {
    const EnvelopeParams prm = calibrated_envelope_params(t, sigma);
    return detail::envelope_value(t, prm.eps, prm.N, sigma);
}

// Quotients of the weighted time convolution against its claimed bound:
//   int_0^t (1 + |t - tau|)^{-rho} (1 + tau)^{-rho (lambda + 1)} dtau
// against (1 + t)^{-rho}. Integrable uniformly only when rho (lambda + 1) > 1.
inline QuotientReport weighted_convolution_bound(double rho, int lambda,
                                                 const std::vector<double>& t_grid) {
    if (!(rho > 0.0)) throw HypothesisError("weighted_convolution_bound: requires rho > 0");
    if (!(rho * (lambda + 1) > 1.0))
        throw HypothesisError(
            "weighted_convolution_bound: hypothesis rho * (lambda + 1) > 1 "
            "(the lambda >= 3 regime) violated");
    const double power = rho * (lambda + 1);
    auto one = [rho, power](double t) {
        if (t == 0.0) return 0.0;
        auto f = [rho, power, t](double tau) {
            return std::pow(1.0 + std::abs(t - tau), -rho) * std::pow(1.0 + tau, -power);
        };
        QuadResult q = adaptive_gk15(f, 0.0, 0.5 * t, 1e-14);
        q += adaptive_gk15(f, 0.5 * t, t, 1e-14);
        return q.value;
    };
    QuotientReport rep;
    rep.kind = "convolution";
    std::vector<double> sorted = t_grid;
    std::sort(sorted.begin(), sorted.end());
    for (double t : sorted) {
        if (t < 0.0)
            throw std::invalid_argument("weighted_convolution_bound: t grid must be nonnegative");
        const double num = one(t);
        const double den = std::pow(1.0 + t, -rho);
        rep.samples.push_back({0, t, num / den, num, den});
        rep.sup_quotient = std::max(rep.sup_quotient, num / den);
    }
    // refinement: insert midpoints and compare the sup
    if (sorted.size() >= 2) {
        double sup2 = rep.sup_quotient;
        for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
            const double t = 0.5 * (sorted[i] + sorted[i + 1]);
            sup2 = std::max(sup2, one(t) / std::pow(1.0 + t, -rho));
        }
        rep.refinement_drift = (sup2 - rep.sup_quotient) / std::max(rep.sup_quotient, 1e-300);
    }
    return rep;
}

struct NestingPair {
    double time_outside = 0.0, blocks_outside = 0.0;
};

inline NestingPair nesting_pair(const Trajectory& traj, const ModNormParams& prm,
                                const UniformDecomposition& dec, double gamma,
                                QuadRule rule = QuadRule::simpson) {
    return {mixed_time_norm(traj, prm, dec, gamma, Nesting::time_outside, rule),
            mixed_time_norm(traj, prm, dec, gamma, Nesting::blocks_outside, rule)};
}

enum class QuotientKind {
    mod_decay,
    compact_interval,
    phiD_growth,
    phiD_smooth,
    product_bilinear,
    product_power,
    product_m,
    strichartz_hom,
    strichartz_inhom_smooth,
    strichartz_inhom_L1,
    strichartz_retarded,
    duhamel_nonlinear,
};

inline QuotientKind quotient_kind_from_name(const std::string& name) {
    if (name == "mod_decay") return QuotientKind::mod_decay;
    if (name == "compact_interval") return QuotientKind::compact_interval;
    if (name == "phiD_growth") return QuotientKind::phiD_growth;
    if (name == "phiD_smooth") return QuotientKind::phiD_smooth;
    if (name == "product_bilinear") return QuotientKind::product_bilinear;
    if (name == "product_power") return QuotientKind::product_power;
    if (name == "product_m") return QuotientKind::product_m;
    if (name == "strichartz_hom") return QuotientKind::strichartz_hom;
    if (name == "strichartz_inhom_smooth") return QuotientKind::strichartz_inhom_smooth;
    if (name == "strichartz_inhom_L1") return QuotientKind::strichartz_inhom_L1;
    if (name == "strichartz_retarded") return QuotientKind::strichartz_retarded;
    if (name == "duhamel_nonlinear") return QuotientKind::duhamel_nonlinear;
    throw std::invalid_argument("quotient_kind_from_name: unknown kind '" + name + "'");
}

inline std::string quotient_kind_name(QuotientKind k) {
    switch (k) {
        case QuotientKind::mod_decay: return "mod_decay";
        case QuotientKind::compact_interval: return "compact_interval";
        case QuotientKind::phiD_growth: return "phiD_growth";
        case QuotientKind::phiD_smooth: return "phiD_smooth";
        case QuotientKind::product_bilinear: return "product_bilinear";
        case QuotientKind::product_power: return "product_power";
        case QuotientKind::product_m: return "product_m";
        case QuotientKind::strichartz_hom: return "strichartz_hom";
        case QuotientKind::strichartz_inhom_smooth: return "strichartz_inhom_smooth";
        case QuotientKind::strichartz_inhom_L1: return "strichartz_inhom_L1";
        case QuotientKind::strichartz_retarded: return "strichartz_retarded";
        case QuotientKind::duhamel_nonlinear: return "duhamel_nonlinear";
    }
    throw std::logic_error("quotient_kind_name: unreachable");
}

struct EstimateWindow {
    double t_min = 1.0, t_max = 100.0; // decay-style grids, log spaced
    int t_count = 16;
    double T = 40.0; // space-time horizon [0, T]
    int time_samples = 33;
};

// Propagator selection for the space-time kinds. The built-in relation takes
// its decay rate and smoothing order from the exponent pack; a custom "poly"
// symbol must bring its own pair, which is range-checked and then trusted.
struct GroupSpec {
    SymbolSpec symbol{};
    double mu = 0.0;
    double delta = 0.0;
};

struct ProductIndices { // |uv|_{M^s_{p,q0}} vs |u|_{M^s_{p1,q1}} |v|_{M^s_{p2,q2}}
    double s = 0.25;
    double p = 2.0, p1 = 4.0, p2 = 4.0;
    double q0 = 2.0, q1 = 4.0 / 3.0, q2 = 4.0 / 3.0;
};

struct PowerIndices { // |u^m|_{M^s_{q,mu}} vs |u|^m_{M^s_{m q, nu}}
    int m = 2;
    double s = 0.4;
    double q = 1.5;
    double mu = 1.5, nu = 1.5; // mu = nu = q needs 1 - 1/q <= s < 1/q
};

struct MProductIndices { // m-fold product with dual-side Hoelder counting
    double s = 0.0;
    double p0 = 1.0, q0 = 2.0;
    std::vector<double> p_list{2.0, 2.0};
    std::vector<double> q_list{1.0, 2.0};
};

struct QuotientOptions {
    double s = 0.0;  // left-hand regularity where the kind takes one
    double p = 0.0;  // 0 = inherit the pack's Lebesgue index
    double q = 0.0;  // 0 = inherit the pack's block-sum index
    GroupSpec group{};
    ProductIndices bilinear{};
    PowerIndices power{};
    MProductIndices mfold{};
    QuadRule rule = QuadRule::simpson;
};

namespace detail {

struct ResolvedGroup {
    SymbolSpec symbol;
    double mu, delta, gamma, gamma_prime;
};

inline ResolvedGroup resolve_group(const GroupSpec& g, const ExponentPack& pack) {
    ResolvedGroup r;
    r.symbol = g.symbol;
    if (g.symbol.name == "bbm-phi") {
        r.mu = pack.mu;
        r.delta = pack.delta;
    } else {
        if (!(g.mu > 0.0) || !(g.mu < 1.0))
            throw HypothesisError("custom symbol requires a decay rate mu in (0, 1)");
        if (!(g.delta >= 0.0))
            throw HypothesisError("custom symbol requires a smoothing order delta >= 0");
        r.mu = g.mu;
        r.delta = g.delta;
    }
    r.gamma = 2.0 / r.mu;
    r.gamma_prime = conjugate_exponent(r.gamma);
    return r;
}

inline double eff_p(const ExponentPack& pack, const QuotientOptions& opts) {
    return opts.p > 0.0 ? opts.p : pack.p;
}
inline double eff_q(const ExponentPack& pack, const QuotientOptions& opts) {
    return opts.q > 0.0 ? opts.q : pack.q;
}

inline void check_quotient_hypotheses(QuotientKind kind, const ExponentPack& pack,
                                      const QuotientOptions& opts) {
    const double s = opts.s, p = eff_p(pack, opts), q = eff_q(pack, opts);
    switch (kind) {
        case QuotientKind::mod_decay:
            if (!(pack.theta >= 0.0) || !(pack.theta <= 1.0))
                throw HypothesisError("mod_decay requires theta in [0, 1]");
            if (!(p >= 2.0) || p == inf)
                throw HypothesisError("mod_decay requires 2 <= p < inf");
            if (!(q > 0.0) || q == inf) throw HypothesisError("mod_decay requires 0 < q < inf");
            return;
        case QuotientKind::compact_interval:
            return;
        case QuotientKind::phiD_growth:
            if (!(p >= 2.0)) throw HypothesisError("phiD_growth requires p >= 2");
            return;
        case QuotientKind::phiD_smooth:
            if (!(p > 1.0)) throw HypothesisError("phiD_smooth requires p > 1");
            return;
        case QuotientKind::product_bilinear: {
            const auto& ix = opts.bilinear;
            if (!(ix.p >= 1.0) || !(ix.p1 >= 1.0) || !(ix.p2 >= 1.0))
                throw HypothesisError("product_bilinear requires Lebesgue indices >= 1");
            const double invp = ix.p == inf ? 0.0 : 1.0 / ix.p;
            const double invp1 = ix.p1 == inf ? 0.0 : 1.0 / ix.p1;
            const double invp2 = ix.p2 == inf ? 0.0 : 1.0 / ix.p2;
            if (std::abs(invp - invp1 - invp2) > 2e-12)
                throw HypothesisError("product_bilinear requires 1/p = 1/p1 + 1/p2");
            if (!(ix.q0 > 1.0) || !(ix.q1 > 1.0) || !(ix.q2 > 1.0) || ix.q0 == inf ||
                ix.q1 == inf || ix.q2 == inf)
                throw HypothesisError("product_bilinear requires 1 < q, q1, q2 < inf");
            const double lower = 1.0 / ix.q0 - 1.0 / ix.q1 - 1.0 / ix.q2 + 1.0;
            if (!(ix.s >= lower - 1e-12) || !(ix.s < 1.0 / ix.q0))
                throw HypothesisError("product_bilinear requires 1/q - 1/q1 - 1/q2 + 1 <= s < 1/q");
            return;
        }
        case QuotientKind::product_power: {
            const auto& ix = opts.power;
            if (ix.m < 1) throw HypothesisError("product_power requires an integer power m >= 1");
            if (!(ix.q >= 1.0)) throw HypothesisError("product_power requires q >= 1");
            if (!(ix.nu >= 1.0) || !(ix.nu <= ix.mu) || ix.mu == inf)
                throw HypothesisError("product_power requires 1 <= nu <= mu < inf");
            if (!(ix.s >= 0.0) || !(ix.s < 1.0 / ix.nu))
                throw HypothesisError("product_power requires 0 <= s < 1/nu");
            const double lhs = 1.0 / ix.nu - (ix.m - 1) * ix.s;
            const double rhs = ix.m / ix.mu - ix.m + 1.0;
            if (!(lhs <= rhs + 1e-12))
                throw HypothesisError("product_power requires 1/nu - (m - 1) s <= m/mu - m + 1");
            return;
        }
        case QuotientKind::product_m: {
            const auto& ix = opts.mfold;
            const std::size_t m = ix.p_list.size();
            if (m < 1 || ix.q_list.size() != m)
                throw HypothesisError("product_m requires matching factor index lists");
            if (!(ix.s >= 0.0)) throw HypothesisError("product_m requires s >= 0");
            double ip = 0.0, iq = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                if (!(ix.p_list[i] >= 1.0))
                    throw HypothesisError("product_m requires factor Lebesgue indices >= 1");
                if (!(ix.q_list[i] >= 1.0) || ix.q_list[i] == inf)
                    throw HypothesisError("product_m requires 1 <= q_i < inf");
                ip += ix.p_list[i] == inf ? 0.0 : 1.0 / ix.p_list[i];
                iq += 1.0 / ix.q_list[i];
            }
            const double ip0 = ix.p0 == inf ? 0.0 : 1.0 / ix.p0;
            if (std::abs(ip - ip0) > 2e-12)
                throw HypothesisError("product_m requires sum 1/p_i = 1/p0");
            if (std::abs(iq - (static_cast<double>(m) - 1.0 + 1.0 / ix.q0)) > 2e-12)
                throw HypothesisError("product_m requires sum 1/q_i = m - 1 + 1/q0");
            return;
        }
        case QuotientKind::strichartz_hom: {
            const ResolvedGroup g = resolve_group(opts.group, pack);
            if (!(g.gamma >= q)) throw HypothesisError("strichartz_hom requires gamma >= q");
            return;
        }
        case QuotientKind::strichartz_inhom_smooth: {
            const ResolvedGroup g = resolve_group(opts.group, pack);
            if (!(g.gamma_prime <= q))
                throw HypothesisError("strichartz_inhom_smooth requires gamma' <= q");
            return;
        }
        case QuotientKind::strichartz_inhom_L1: {
            const ResolvedGroup g = resolve_group(opts.group, pack);
            if (!(g.gamma >= q)) throw HypothesisError("strichartz_inhom_L1 requires gamma >= q");
            return;
        }
        case QuotientKind::strichartz_retarded: {
            const ResolvedGroup g = resolve_group(opts.group, pack);
            if (!(g.gamma_prime <= q) || !(q <= g.gamma))
                throw HypothesisError("strichartz_retarded requires q in [gamma', gamma]");
            return;
        }
        case QuotientKind::duhamel_nonlinear:
            if (q == 1.0) {
                if (!(s >= 0.0))
                    throw HypothesisError("duhamel_nonlinear requires s >= 0 when q = 1");
            } else if (q < 1.0 || q == inf || !(s >= 1.0 - 1.0 / q) || !(s < 1.0 / q)) {
                throw HypothesisError(
                    "duhamel_nonlinear requires q = 1 with s >= 0, or 1 - 1/q <= s < 1/q");
            }
            return;
    }
}

struct WindowPlan {
    bool window_applicable = false;
    bool doubles_t_grid = false; // otherwise doubles T
};

inline WindowPlan window_plan(QuotientKind k) {
    switch (k) {
        case QuotientKind::mod_decay:
        case QuotientKind::phiD_growth: return {true, true};
        case QuotientKind::strichartz_hom:
        case QuotientKind::strichartz_inhom_smooth:
        case QuotientKind::strichartz_inhom_L1:
        case QuotientKind::strichartz_retarded:
        case QuotientKind::duhamel_nonlinear: return {true, false};
        default: return {false, false};
    }
}

// e^{+i tau P} src, the prefix factor of the retarded propagator
inline Spectrum advance(const SymbolSpec& sym, double tau, Spectrum s) {
    for (int j = s.j_min(); j <= s.j_max(); ++j)
        s.coeffs[static_cast<std::size_t>(s.slot(j))] *=
            std::polar(1.0, tau * sym.eval(s.grid.xi(j)));
    return s;
}

// N(t_j) = sum_{l <= j} w_l U(t_j - tau_l) src_l on the sample grid itself
inline std::vector<Spectrum> retarded_integrals(const SymbolSpec& sym,
                                                const std::vector<Spectrum>& src,
                                                const std::vector<double>& ts, QuadRule rule) {
    const std::size_t nt = ts.size();
    std::vector<Spectrum> pref;
    pref.reserve(nt);
    for (std::size_t l = 0; l < nt; ++l) pref.push_back(advance(sym, ts[l], src[l]));
    std::vector<Spectrum> out;
    out.reserve(nt);
    for (std::size_t j = 0; j < nt; ++j) {
        std::vector<double> head(ts.begin(), ts.begin() + static_cast<long>(j) + 1);
        const std::vector<double> w = quadrature_weights(head, rule);
        Spectrum acc(src[0].grid);
        for (std::size_t l = 0; l <= j; ++l) {
            if (w[l] == 0.0) continue;
            for (std::size_t m = 0; m < acc.coeffs.size(); ++m)
                acc.coeffs[m] += w[l] * pref[l].coeffs[m];
        }
        out.push_back(advance(sym, -ts[j], std::move(acc)));
    }
    return out;
}

inline Trajectory materialize(const std::vector<double>& ts, const std::vector<Spectrum>& specs) {
    Trajectory traj;
    traj.times = ts;
    traj.states.reserve(specs.size());
    for (const Spectrum& s : specs) traj.states.push_back(inverse_transform(s));
    return traj;
}

inline double time_lp_norm(const TimeProfile& e, double T, double gamma) {
    if (gamma == inf) {
        double sup = 0.0;
        for (int i = 0; i <= 4096; ++i) sup = std::max(sup, std::abs(e(T * i / 4096.0)));
        return sup;
    }
    auto f = [&e, gamma](double t) { return std::pow(std::abs(e(t)), gamma); };
    return std::pow(adaptive_gk15(f, 0.0, T, 1e-13).value, 1.0 / gamma);
}

// Re-assert the mixed-norm nesting direction on concrete trajectory data.
inline void enforce_nesting(const Trajectory& traj, const ModNormParams& prm,
                            const UniformDecomposition& dec, double gamma, QuadRule rule) {
    const NestingPair np = nesting_pair(traj, prm, dec, gamma, rule);
    const double scale = std::max({np.time_outside, np.blocks_outside, 1e-300});
    if (gamma >= prm.q && np.time_outside > np.blocks_outside + 1e-9 * scale)
        throw std::logic_error("mixed norm nesting violated: time-outside exceeds blocks-outside");
    if (gamma <= prm.q && np.blocks_outside > np.time_outside + 1e-9 * scale)
        throw std::logic_error("mixed norm nesting violated: blocks-outside exceeds time-outside");
}

struct QuotientJob {
    QuotientKind kind;
    ExponentPack pack;
    TestFamily fam;
    EstimateWindow win;
    const UniformDecomposition* dec;
    QuotientOptions opts;
    double profile_T;                  // horizon for time profiles, fixed across reruns
    bool assert_nesting;
    std::vector<double> t_override{};  // custom decay t grid (window rerun)
};

inline std::vector<QuotientSample> run_quotient_samples(const QuotientJob& job) {
    const UniformDecomposition& dec = *job.dec;
    const GridSpec& grid = dec.grid;
    const ExponentPack& pack = job.pack;
    const QuotientOptions& opts = job.opts;
    const double s = opts.s;
    const double p = eff_p(pack, opts);
    const double q = eff_q(pack, opts);
    std::vector<QuotientSample> out;
    auto push = [&out](int id, double t, double num, double den) {
        if (!(den > 0.0) || !std::isfinite(den)) return; // 0/0 treated as absent
        out.push_back({id, t, num / den, num, den});
    };
    auto decay_grid = [&job]() {
        return job.t_override.empty()
                   ? log_grid(job.win.t_min, job.win.t_max, job.win.t_count)
                   : job.t_override;
    };

    switch (job.kind) {
        case QuotientKind::mod_decay: {
            const std::vector<double> ts = decay_grid();
            const ModNormParams left{s, p, q};
            const ModNormParams right{s - pack.sigma * pack.theta, conjugate_exponent(p), q};
            const double expo = 2.0 * pack.theta * (0.5 - 1.0 / p) * pack.beta;
            for (int i = 0; i < job.fam.count; ++i) {
                const Field f = make_member(job.fam, i, grid);
                const double base = mod_norm(f, right, dec);
                for (double t : ts)
                    push(i, t, mod_norm(apply_S(t, f), left, dec),
                         std::pow(1.0 + t, expo) * base);
            }
            return out;
        }
        case QuotientKind::compact_interval: {
            const std::vector<double> ts = uniform_grid(0.0, job.win.T, job.win.time_samples);
            const ModNormParams left{s, p, q};
            const ModNormParams right{s - pack.theta * pack.sigma, conjugate_exponent(p), q};
            for (int i = 0; i < job.fam.count; ++i) {
                const Field f = make_member(job.fam, i, grid);
                Trajectory traj;
                traj.times = ts;
                for (double t : ts) traj.states.push_back(apply_S(t, f));
                const double num =
                    mixed_time_norm(traj, left, dec, pack.r, Nesting::time_outside, opts.rule);
                push(i, job.win.T, num, mod_norm(f, right, dec));
            }
            return out;
        }
        case QuotientKind::phiD_growth: {
            const std::vector<double> ts = decay_grid();
            const ModNormParams prm{s, p, q};
            const double expo = 2.0 * (0.5 - (p == inf ? 0.0 : 1.0 / p));
            for (int i = 0; i < job.fam.count; ++i) {
                const Field f = make_member(job.fam, i, grid);
                const Field pf = apply_phiD(f);
                const double base = mod_norm(f, prm, dec);
                for (double t : ts)
                    push(i, t, mod_norm(apply_S(t, pf), prm, dec),
                         std::pow(1.0 + t * t, 0.5 * expo) * base);
            }
            return out;
        }
        case QuotientKind::phiD_smooth: {
            const ModNormParams left{s, p, q};
            const ModNormParams right{s - 1.0, p, q};
            for (int i = 0; i < job.fam.count; ++i) {
                const Field f = make_member(job.fam, i, grid);
                push(i, 0.0, mod_norm(apply_phiD(f), left, dec), mod_norm(f, right, dec));
            }
            return out;
        }
        case QuotientKind::product_bilinear: {
            const auto& ix = opts.bilinear;
            const ModNormParams lprm{ix.s, ix.p, ix.q0};
            const ModNormParams rprm1{ix.s, ix.p1, ix.q1};
            const ModNormParams rprm2{ix.s, ix.p2, ix.q2};
            for (int i = 0; 2 * i + 1 < job.fam.count; ++i) {
                const Field u = make_member(job.fam, 2 * i, grid);
                const Field v = make_member(job.fam, 2 * i + 1, grid);
                Field uv(grid);
                for (int m = 0; m < grid.samples; ++m) uv.values[m] = u.values[m] * v.values[m];
                push(i, 0.0, mod_norm(uv, lprm, dec),
                     mod_norm(u, rprm1, dec) * mod_norm(v, rprm2, dec));
            }
            return out;
        }
        case QuotientKind::product_power: {
            const auto& ix = opts.power;
            const ModNormParams lprm{ix.s, ix.q, ix.mu};
            const ModNormParams rprm{ix.s, static_cast<double>(ix.m) * ix.q, ix.nu};
            for (int i = 0; i < job.fam.count; ++i) {
                const Field u = make_member(job.fam, i, grid);
                Field um(grid);
                for (int m = 0; m < grid.samples; ++m)
                    um.values[m] = std::pow(u.values[m], ix.m);
                push(i, 0.0, mod_norm(um, lprm, dec),
                     std::pow(mod_norm(u, rprm, dec), static_cast<double>(ix.m)));
            }
            return out;
        }
        case QuotientKind::product_m: {
            const auto& ix = opts.mfold;
            const int m = static_cast<int>(ix.p_list.size());
            const ModNormParams lprm{ix.s, ix.p0, ix.q0};
            for (int i = 0; m * (i + 1) <= job.fam.count; ++i) {
                Field prod(grid);
                std::fill(prod.values.begin(), prod.values.end(), cplx{1.0, 0.0});
                double den = 1.0;
                for (int j = 0; j < m; ++j) {
                    const Field u = make_member(job.fam, m * i + j, grid);
                    for (int n = 0; n < grid.samples; ++n) prod.values[n] *= u.values[n];
                    den *= mod_norm(u,
                                    ModNormParams{ix.s, ix.p_list[static_cast<std::size_t>(j)],
                                                  ix.q_list[static_cast<std::size_t>(j)]},
                                    dec);
                }
                push(i, 0.0, mod_norm(prod, lprm, dec), den);
            }
            return out;
        }
        case QuotientKind::strichartz_hom: {
            const ResolvedGroup g = resolve_group(opts.group, pack);
            const std::vector<double> ts = uniform_grid(0.0, job.win.T, job.win.time_samples);
            const ModNormParams left{s, p, q};
            const ModNormParams right{s + 0.5 * g.delta, 2.0, q};
            for (int i = 0; i < job.fam.count; ++i) {
                const Field f = make_member(job.fam, i, grid);
                Trajectory traj;
                traj.times = ts;
                for (double t : ts) traj.states.push_back(apply_U(g.symbol, t, f));
                if (job.assert_nesting) enforce_nesting(traj, left, dec, g.gamma, opts.rule);
                const double num =
                    mixed_time_norm(traj, left, dec, g.gamma, Nesting::time_outside, opts.rule);
                push(i, job.win.T, num, mod_norm(f, right, dec));
            }
            return out;
        }
        case QuotientKind::strichartz_inhom_smooth:
        case QuotientKind::strichartz_inhom_L1:
        case QuotientKind::strichartz_retarded: {
            const ResolvedGroup g = resolve_group(opts.group, pack);
            const std::vector<double> ts = uniform_grid(0.0, job.win.T, job.win.time_samples);
            for (int i = 0; i < job.fam.count; ++i) {
                const Field f = make_member(job.fam, i, grid);
                const TimeProfile e = make_profile(job.fam, i, job.profile_T);
                const Spectrum fhat = forward_transform(f);
                std::vector<Spectrum> src;
                src.reserve(ts.size());
                for (double t : ts) {
                    Spectrum scaled = fhat;
                    const double et = e(t);
                    for (cplx& c : scaled.coeffs) c *= et;
                    src.push_back(std::move(scaled));
                }
                const Trajectory traj =
                    materialize(ts, retarded_integrals(g.symbol, src, ts, opts.rule));
                double num = 0.0, den = 0.0;
                if (job.kind == QuotientKind::strichartz_inhom_smooth) {
                    const ModNormParams left{s, 2.0, q};
                    const ModNormParams right{s + 0.5 * g.delta, conjugate_exponent(p), q};
                    if (job.assert_nesting) enforce_nesting(traj, left, dec, inf, opts.rule);
                    num = mixed_time_norm(traj, left, dec, inf, Nesting::time_outside, opts.rule);
                    den = time_lp_norm(e, job.win.T, g.gamma_prime) * mod_norm(f, right, dec);
                } else if (job.kind == QuotientKind::strichartz_inhom_L1) {
                    const ModNormParams left{s, p, q};
                    const ModNormParams right{s + 0.5 * g.delta, 2.0, q};
                    if (job.assert_nesting) enforce_nesting(traj, left, dec, g.gamma, opts.rule);
                    num = mixed_time_norm(traj, left, dec, g.gamma, Nesting::time_outside,
                                          opts.rule);
                    den = time_lp_norm(e, job.win.T, 1.0) * mod_norm(f, right, dec);
                } else {
                    const ModNormParams left{s, p, q};
                    const ModNormParams right{s + g.delta, conjugate_exponent(p), q};
                    if (job.assert_nesting) enforce_nesting(traj, left, dec, g.gamma, opts.rule);
                    num = mixed_time_norm(traj, left, dec, g.gamma, Nesting::time_outside,
                                          opts.rule);
                    den = time_lp_norm(e, job.win.T, g.gamma_prime) * mod_norm(f, right, dec);
                }
                push(i, job.win.T, num, den);
            }
            return out;
        }
        case QuotientKind::duhamel_nonlinear: {
            const std::vector<double> ts = uniform_grid(0.0, job.win.T, job.win.time_samples);
            const ModNormParams prm{s, p, q};
            const int power = pack.lambda + 1;
            const SymbolSpec bbm{};
            for (int i = 0; i < job.fam.count; ++i) {
                const Field f = make_member(job.fam, i, grid);
                const TimeProfile e = make_profile(job.fam, i, job.profile_T);
                std::vector<Spectrum> src;
                src.reserve(ts.size());
                for (double t : ts) {
                    Field w(grid);
                    const double et = e(t);
                    for (int m = 0; m < grid.samples; ++m)
                        w.values[m] = std::pow(et * f.values[m].real(), power);
                    Spectrum what = forward_transform(w);
                    for (int j = what.j_min(); j <= what.j_max(); ++j)
                        what.coeffs[static_cast<std::size_t>(what.slot(j))] *= phi(grid.xi(j));
                    src.push_back(std::move(what));
                }
                const Trajectory traj =
                    materialize(ts, retarded_integrals(bbm, src, ts, opts.rule));
                const double num =
                    mixed_time_norm(traj, prm, dec, pack.r, Nesting::time_outside, opts.rule);
                const double den = std::pow(time_lp_norm(e, job.win.T, pack.r) *
                                                mod_norm(f, prm, dec),
                                            static_cast<double>(power));
                push(i, job.win.T, num, den);
            }
            return out;
        }
    }
    throw std::logic_error("run_quotient_samples: unreachable");
}

} // namespace detail

// Empirical quotient table for one estimate kind over a member family,
// together with its grid-refinement and window-doubling stability.
inline QuotientReport estimate_quotient(QuotientKind kind, const ExponentPack& pack,
                                        const TestFamily& fam, const EstimateWindow& win,
                                        const UniformDecomposition& dec,
                                        const QuotientOptions& opts = {}) {
    detail::check_quotient_hypotheses(kind, pack, opts);

    detail::QuotientJob job{kind, pack, fam, win, &dec, opts, win.T, true, {}};
    std::vector<QuotientSample> base = detail::run_quotient_samples(job);
    auto sup_of = [](const std::vector<QuotientSample>& v) {
        double s = 0.0;
        for (const auto& smp : v) s = std::max(s, smp.quotient);
        return s;
    };
    const double sup1 = sup_of(base);

    QuotientReport rep;
    rep.kind = quotient_kind_name(kind);
    rep.samples = std::move(base);
    rep.sup_quotient = sup1;

    const UniformDecomposition fine = build_decomposition(
        dec.grid.refined(), dec.k_max, detail::profile_by_name(dec.profile_name));
    detail::QuotientJob fine_job = job;
    fine_job.dec = &fine;
    fine_job.assert_nesting = false;
    const double sup_fine = sup_of(detail::run_quotient_samples(fine_job));
    rep.refinement_drift = std::abs(sup_fine - sup1) / std::max(sup1, 1e-300);

    const detail::WindowPlan plan = detail::window_plan(kind);
    rep.window_drift_applicable = plan.window_applicable;
    if (plan.window_applicable) {
        detail::QuotientJob wide_job = job;
        wide_job.assert_nesting = false;
        if (plan.doubles_t_grid) {
            // keep the base grid and append points out to 2 t_max, so the
            // wide sup can only pick up genuinely new contributions
            std::vector<double> wide =
                detail::log_grid(win.t_min, win.t_max, win.t_count);
            const std::vector<double> ext =
                detail::log_grid(win.t_max, 2.0 * win.t_max, std::max(4, win.t_count / 3));
            wide.insert(wide.end(), ext.begin() + 1, ext.end());
            wide_job.t_override = std::move(wide);
        } else {
            wide_job.win.T = 2.0 * win.T;
            wide_job.win.time_samples = 2 * (win.time_samples - 1) + 1;
        }
        const double sup_wide = sup_of(detail::run_quotient_samples(wide_job));
        rep.window_drift = std::abs(sup_wide - sup1) / std::max(sup1, 1e-300);
    }
    return rep;
}

} // namespace bbm
