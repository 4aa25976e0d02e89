#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bbm/spectral.hpp"

namespace bbm {

// Window generator for the frequency-uniform decomposition. Admissible
// profiles take values in [0,1], equal 1 on |d| <= 1/2 and 0 on |d| >= 1;
// sigma_k(xi) = rho(xi - k) / sum_l rho(xi - l) then forms a partition of
// unity with supp sigma_k inside {|xi - k| <= 1}.
struct BumpProfile {
    std::string name;
    std::function<double(double)> rho;
};

inline BumpProfile default_bump() {
    return {"smooth-bump", [](double d) {
                const double a = std::abs(d);
                if (a <= 0.5) return 1.0;
                if (a >= 1.0) return 0.0;
                const double s = 2.0 * a - 1.0; // (0,1) on the ramp
                return std::exp(1.0 - 1.0 / (1.0 - s * s));
            }};
}

inline BumpProfile raised_cosine_bump() {
    return {"raised-cosine", [](double d) {
                const double a = std::abs(d);
                if (a <= 0.5) return 1.0;
                if (a >= 1.0) return 0.0;
                const double c = std::cos(pi * (a - 0.5));
                return c * c;
            }};
}

// sigma_k sampled on the grid: weights w[i] multiply spectrum slot
// slot_begin + i.
struct BlockBand {
    int slot_begin = 0;
    std::vector<double> weights;
};

struct UniformDecomposition {
    GridSpec grid;
    int k_max = 0;
    std::string profile_name;
    std::vector<BlockBand> bands; // indexed k + k_max
    double partition_residual = 0.0; // max |1 - sum sigma_k| on |xi| <= k_max - 2
    double box_lower_bound = 0.0;    // min of sigma_k over Q_k = k + [-1/2, 1/2)

    const BlockBand& band(int k) const {
        if (k < -k_max || k > k_max)
            throw std::out_of_range("UniformDecomposition: block index out of range");
        return bands[static_cast<std::size_t>(k + k_max)];
    }
};

inline UniformDecomposition build_decomposition(const GridSpec& grid, int k_max,
                                                const BumpProfile& profile = default_bump()) {
    if (k_max < 1)
        throw std::invalid_argument("build_decomposition: k_max must be >= 1");
    if (!(k_max <= grid.nyquist() - 2.0))
        throw std::invalid_argument(
            "build_decomposition: k_max must sit at least 2 below the Nyquist frequency");

    // admissibility gate on a fine offset lattice plus the plateau edges
    auto check = [&](double d) {
        const double v = profile.rho(d);
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("build_decomposition: profile leaves [0,1] at offset " +
                                        std::to_string(d));
        if (std::abs(d) <= 0.5 && v != 1.0)
            throw std::invalid_argument("build_decomposition: profile plateau violated at offset " +
                                        std::to_string(d));
        if (std::abs(d) >= 1.0 && v != 0.0)
            throw std::invalid_argument("build_decomposition: profile support violated at offset " +
                                        std::to_string(d));
    };
    for (int i = -1200; i <= 1200; ++i) check(i / 1000.0);

    UniformDecomposition dec;
    dec.grid = grid;
    dec.k_max = k_max;
    dec.profile_name = profile.name;
    dec.bands.resize(2 * k_max + 1);

    const int n = grid.samples;
    auto denom = [&](double xi) {
        double s = 0.0;
        const int lo = static_cast<int>(std::ceil(xi - 1.0));
        const int hi = static_cast<int>(std::floor(xi + 1.0));
        for (int l = lo; l <= hi; ++l) s += profile.rho(xi - l);
        return s;
    };

    for (int k = -k_max; k <= k_max; ++k) {
        BlockBand band;
        // support of sigma_k on the grid: |xi - k| < 1
        const double lo_xi = k - 1.0, hi_xi = k + 1.0;
        int u_lo = static_cast<int>(std::ceil(lo_xi / grid.dxi())) + n / 2;
        int u_hi = static_cast<int>(std::floor(hi_xi / grid.dxi())) + n / 2;
        u_lo = std::max(u_lo, 0);
        u_hi = std::min(u_hi, n - 1);
        band.slot_begin = u_lo;
        band.weights.resize(static_cast<std::size_t>(u_hi - u_lo + 1));
        for (int u = u_lo; u <= u_hi; ++u) {
            const double xi = grid.xi(u - n / 2);
            const double num = profile.rho(xi - k);
            band.weights[static_cast<std::size_t>(u - u_lo)] =
                num > 0.0 ? num / denom(xi) : 0.0;
        }
        dec.bands[static_cast<std::size_t>(k + k_max)] = std::move(band);
    }

    // partition residual on the certified zone
    std::vector<double> sum(static_cast<std::size_t>(n), 0.0);
    for (const BlockBand& b : dec.bands)
        for (std::size_t i = 0; i < b.weights.size(); ++i)
            sum[static_cast<std::size_t>(b.slot_begin) + i] += b.weights[i];
    double resid = 0.0;
    for (int u = 0; u < n; ++u) {
        const double xi = grid.xi(u - n / 2);
        if (std::abs(xi) <= k_max - 2.0)
            resid = std::max(resid, std::abs(sum[static_cast<std::size_t>(u)] - 1.0));
    }
    dec.partition_residual = resid;
    if (resid >= 1e-12)
        throw std::runtime_error("build_decomposition: partition of unity residual " +
                                 std::to_string(resid));

    double c = 1.0;
    for (int k = -k_max; k <= k_max; ++k) {
        const BlockBand& b = dec.band(k);
        for (std::size_t i = 0; i < b.weights.size(); ++i) {
            const double xi = grid.xi(b.slot_begin + static_cast<int>(i) - n / 2);
            if (xi >= k - 0.5 && xi < k + 0.5) c = std::min(c, b.weights[i]);
        }
    }
    dec.box_lower_bound = c;
    return dec;
}

// Apply sigma_k to a spectrum, returning just the banded coefficients.
inline std::vector<cplx> band_coefficients(const Spectrum& s, int k,
                                           const UniformDecomposition& dec) {
    if (!(s.grid == dec.grid))
        throw std::invalid_argument("band_coefficients: spectrum grid differs from decomposition");
    const BlockBand& b = dec.band(k);
    std::vector<cplx> out(b.weights.size());
    for (std::size_t i = 0; i < b.weights.size(); ++i)
        out[i] = b.weights[i] * s.coeffs[static_cast<std::size_t>(b.slot_begin) + i];
    return out;
}

inline Spectrum block_spectrum(const Spectrum& s, int k, const UniformDecomposition& dec) {
    Spectrum out(s.grid);
    const BlockBand& b = dec.band(k);
    const std::vector<cplx> coef = band_coefficients(s, k, dec);
    for (std::size_t i = 0; i < coef.size(); ++i)
        out.coeffs[static_cast<std::size_t>(b.slot_begin) + i] = coef[i];
    return out;
}

// Frequency-uniform block operator. Box_k u = F^{-1} sigma_k F u.
inline Field block(const Field& u, int k, const UniformDecomposition& dec) {
    return inverse_transform(block_spectrum(forward_transform(u), k, dec));
}

} // namespace bbm
