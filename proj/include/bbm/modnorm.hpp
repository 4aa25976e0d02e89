#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "bbm/decomposition.hpp"

namespace bbm {

// Indices for the modulation norm  ( sum_k (1+|k|)^{sq} |Box_k u|_p^q )^{1/q}.
// q = inf (sup over blocks) is deliberately not implemented.
struct ModNormParams {
    double s = 0.0;
    double p = 2.0;
    double q = 1.0;

    void validate() const {
        if (!(p >= 1.0))
            throw std::invalid_argument("ModNormParams: p must satisfy 1 <= p <= inf");
        if (!(q >= 1.0) || q == inf)
            throw std::invalid_argument("ModNormParams: q must satisfy 1 <= q < inf "
                                        "(q = inf not implemented)");
        if (!std::isfinite(s)) throw std::invalid_argument("ModNormParams: s must be finite");
    }
};

namespace detail {

// Overflow-guarded (sum_i w_i a_i^e)^{1/e} for a_i >= 0, w_i >= 0.
inline double scaled_power_sum(const std::vector<double>& a, const std::vector<double>& w,
                               double e) {
    double peak = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (w[i] > 0.0) peak = std::max(peak, a[i]);
    if (peak == 0.0) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (w[i] > 0.0) acc += w[i] * std::pow(a[i] / peak, e);
    return peak * std::pow(acc, 1.0 / e);
}

inline double scaled_lq(const std::vector<double>& a, double q) {
    const std::vector<double> ones(a.size(), 1.0);
    return scaled_power_sum(a, ones, q);
}

// L^p norm of one block straight from its banded coefficients. p = 2 uses
// Parseval; otherwise the block is materialized in x-space.
inline double block_lp_from_band(const Spectrum& s, int k, const UniformDecomposition& dec,
                                 double p) {
    const BlockBand& b = dec.band(k);
    double mass = 0.0;
    for (std::size_t i = 0; i < b.weights.size(); ++i) {
        const cplx c = s.coeffs[static_cast<std::size_t>(b.slot_begin) + i];
        mass += b.weights[i] * b.weights[i] * std::norm(c);
    }
    if (mass == 0.0) return 0.0;
    if (p == 2.0) return std::sqrt(mass / (2.0 * s.grid.half_width));
    return lp_norm(inverse_transform(block_spectrum(s, k, dec)), p);
}

} // namespace detail

struct ModNormDiag {
    double value = 0.0;
    double tail_fraction = 0.0; // spectral mass beyond |xi| > k_max - 2
};

inline ModNormDiag mod_norm_diag(const Spectrum& s, const ModNormParams& prm,
                                 const UniformDecomposition& dec) {
    prm.validate();
    if (!(s.grid == dec.grid))
        throw std::invalid_argument("mod_norm: spectrum grid differs from decomposition");
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(2 * dec.k_max + 1));
    for (int k = -dec.k_max; k <= dec.k_max; ++k) {
        const double lp = detail::block_lp_from_band(s, k, dec, prm.p);
        terms.push_back(std::pow(1.0 + std::abs(static_cast<double>(k)), prm.s) * lp);
    }
    ModNormDiag d;
    d.value = detail::scaled_lq(terms, prm.q);
    d.tail_fraction = spectral_tail_fraction(s, dec.k_max - 2.0);
    return d;
}

inline double mod_norm(const Spectrum& s, const ModNormParams& prm,
                       const UniformDecomposition& dec) {
    return mod_norm_diag(s, prm, dec).value;
}

inline double mod_norm(const Field& u, const ModNormParams& prm,
                       const UniformDecomposition& dec) {
    return mod_norm(forward_transform(u), prm, dec);
}

inline ModNormDiag mod_norm_diag(const Field& u, const ModNormParams& prm,
                                 const UniformDecomposition& dec) {
    return mod_norm_diag(forward_transform(u), prm, dec);
}

// Sharp weight exponent for |Box_k|_{L^p -> L^q}-type embeddings, by region
// in the (1/p, 1/q) square. On region boundaries the branch formulas must
// agree; disagreement indicates a broken table and throws.
inline double nu1(double p, double q) {
    if (!(p >= 1.0) || !(q >= 1.0))
        throw std::invalid_argument("nu1: indices must satisfy 1 <= p, q <= inf");
    const double a = (p == inf) ? 0.0 : 1.0 / p;
    const double b = (q == inf) ? 0.0 : 1.0 / q;
    const double slack = 1e-12;
    std::vector<double> vals;
    if (b <= a + slack && b <= 1.0 - a + slack) vals.push_back(0.0);
    if (a >= 0.5 - slack && b >= 1.0 - a - slack) vals.push_back(a + b - 1.0);
    if (a <= 0.5 + slack && b >= a - slack) vals.push_back(-a + b);
    if (vals.empty()) throw std::logic_error("nu1: region table failed to cover index point");
    for (double v : vals)
        if (std::abs(v - vals.front()) > 2e-12)
            throw std::logic_error("nu1: branch formulas disagree on a region boundary");
    return vals.front();
}

enum class Nesting { time_outside, blocks_outside };

// Mixed space-time norms over a sampled trajectory.
//   time_outside:   | t -> |u(t)|_{M^s_{p,q}} |_{L^gamma}
//   blocks_outside: ( sum_k (1+|k|)^{sq} | t -> |Box_k u(t)|_p |_{L^gamma}^q )^{1/q}
// For gamma >= q Minkowski gives time_outside <= blocks_outside.
inline double mixed_time_norm(const Trajectory& traj, const ModNormParams& prm,
                              const UniformDecomposition& dec, double gamma,
                              Nesting nesting, QuadRule rule = QuadRule::simpson) {
    prm.validate();
    if (!(gamma >= 1.0))
        throw std::invalid_argument("mixed_time_norm: gamma must satisfy 1 <= gamma <= inf");
    if (traj.size() == 0) throw std::invalid_argument("mixed_time_norm: empty trajectory");
    const std::size_t nt = traj.size();
    std::vector<Spectrum> spectra;
    spectra.reserve(nt);
    for (const Field& f : traj.states) spectra.push_back(forward_transform(f));

    const std::vector<double> w =
        (gamma == inf) ? std::vector<double>(nt, 1.0) : quadrature_weights(traj.times, rule);

    if (nesting == Nesting::time_outside) {
        std::vector<double> a(nt);
        for (std::size_t i = 0; i < nt; ++i) a[i] = mod_norm(spectra[i], prm, dec);
        if (gamma == inf) return *std::max_element(a.begin(), a.end());
        return detail::scaled_power_sum(a, w, gamma);
    }

    std::vector<double> per_block;
    per_block.reserve(static_cast<std::size_t>(2 * dec.k_max + 1));
    std::vector<double> a(nt);
    for (int k = -dec.k_max; k <= dec.k_max; ++k) {
        for (std::size_t i = 0; i < nt; ++i)
            a[i] = detail::block_lp_from_band(spectra[i], k, dec, prm.p);
        double tk;
        if (gamma == inf)
            tk = *std::max_element(a.begin(), a.end());
        else
            tk = detail::scaled_power_sum(a, w, gamma);
        per_block.push_back(std::pow(1.0 + std::abs(static_cast<double>(k)), prm.s) * tk);
    }
    return detail::scaled_lq(per_block, prm.q);
}

// sup_t (1+|t|)^rho |u(t)|_{M^s_{p,q}} over the sampled window.
inline double weighted_sup_norm(const Trajectory& traj, double rho, const ModNormParams& prm,
                                const UniformDecomposition& dec) {
    prm.validate();
    double sup = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double w = std::pow(1.0 + std::abs(traj.times[i]), rho);
        sup = std::max(sup, w * mod_norm(traj.states[i], prm, dec));
    }
    return sup;
}

} // namespace bbm
