#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "bbm/spectral.hpp"

namespace bbm {

// Dispersion relation of the linearized equation and its derivatives.
inline double phi(double xi) { return xi / (1.0 + xi * xi); }

inline double phi_prime(double xi) {
    const double d = 1.0 + xi * xi;
    return (1.0 - xi * xi) / (d * d);
}

inline double phi_second(double xi) {
    const double d = 1.0 + xi * xi;
    return 2.0 * xi * (xi * xi - 3.0) / (d * d * d);
}

// Sup-norm decay rate t^beta of the free group on weighted data, as a
// function of the weight exponent sigma < -1. Piecewise in sigma with a
// continuous match at sigma = -4; the value lives in [-1/3, 0).
inline double beta(double sigma) {
    if (!(sigma < -1.0))
        throw std::invalid_argument("beta: weight exponent must satisfy sigma < -1");
    if (sigma >= -4.0) return (sigma + 1.0) / (1.0 - 2.0 * sigma);
    return -3.0 / (1.0 - 2.0 * sigma);
}

// Free propagator e^{-i t phi(D)}.
inline Field apply_S(double t, const Field& u) {
    return apply_multiplier(u, [t](double xi) { return std::polar(1.0, -t * phi(xi)); });
}

// Bessel-type smoothing J^s = (1 + D^2)^{s/2}.
inline Field apply_bessel(double s, const Field& u) {
    return apply_multiplier(
        u, [s](double xi) { return cplx{std::pow(1.0 + xi * xi, 0.5 * s), 0.0}; });
}

// The multiplier phi(D) itself (note: maps real fields to imaginary ones;
// the equation always pairs it with -i).
inline Field apply_phiD(const Field& u) {
    return apply_multiplier(u, [](double xi) { return cplx{phi(xi), 0.0}; });
}

// A dispersion symbol selectable at runtime. "bbm-phi" is the built-in
// relation above; "poly" evaluates sum_i coeffs[i] xi^i.
struct SymbolSpec {
    std::string name = "bbm-phi";
    std::vector<double> coeffs; // only read for "poly"

    double eval(double xi) const {
        if (name == "bbm-phi") return phi(xi);
        if (name == "poly") {
            double acc = 0.0;
            for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * xi + coeffs[i];
            return acc;
        }
        throw std::invalid_argument("SymbolSpec: unknown symbol '" + name + "'");
    }
};

// Propagator e^{-i t P(D)} for a runtime-selected symbol P.
inline Field apply_U(const SymbolSpec& sym, double t, const Field& u) {
    return apply_multiplier(u, [&sym, t](double xi) { return std::polar(1.0, -t * sym.eval(xi)); });
}

} // namespace bbm
