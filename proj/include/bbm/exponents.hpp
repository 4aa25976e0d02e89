#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "bbm/group.hpp"

namespace bbm {

// Violated standing assumption of an estimate. Kept distinct from plain
// invalid_argument so callers can report "hypothesis not satisfied" rather
// than "bad input".
struct HypothesisError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// All derived exponents used by the fixed-point argument, computed from the
// nonlinearity degree lambda, the weight exponent sigma, and the dispersive
// interpolation parameter theta.
struct ExponentPack {
    int lambda = 0;
    double sigma = 0.0;
    double theta = 0.0;
    double beta = 0.0;        // sup-norm decay rate of the free group
    double p = 0.0;           // Lebesgue index of the decay window, lambda + 2
    double q = 0.0;           // its dual partner in the window, fixed at 2
    double mu = 0.0;          // time-decay rate bought by interpolation
    double rho = 0.0;         // weight exponent of the persistence norm (= mu)
    double r = 0.0;           // contraction space integrability, lambda / (1 - mu)
    double gamma = 0.0;       // time integrability of the window, 2 / mu
    double gamma_prime = 0.0; // conjugate of gamma
    double delta = 0.0;       // smoothing order recovered per step, -sigma * theta
};

inline ExponentPack exponent_pack(int lambda, double sigma, double theta) {
    if (lambda < 1)
        throw HypothesisError("exponent_pack: nonlinearity degree must be an integer >= 1");
    if (!(sigma < -1.0))
        throw HypothesisError("exponent_pack: weight exponent must satisfy sigma < -1");
    if (!(theta > 0.0) || !(theta <= -1.0 / sigma))
        throw HypothesisError(
            "exponent_pack: interpolation parameter must satisfy 0 < theta <= -1/sigma");

    ExponentPack e;
    e.lambda = lambda;
    e.sigma = sigma;
    e.theta = theta;
    e.beta = beta(sigma);
    e.p = static_cast<double>(lambda) + 2.0;
    e.q = 2.0;
    e.mu = -2.0 * theta * (0.5 - 1.0 / e.p) * e.beta;
    e.rho = e.mu;
    if (!(e.mu > 0.0) || !(e.mu < 1.0))
        throw HypothesisError("exponent_pack: derived decay rate mu left (0, 1)");
    e.r = static_cast<double>(lambda) / (1.0 - e.mu);
    e.gamma = 2.0 / e.mu;
    e.gamma_prime = conjugate_exponent(e.gamma);
    e.delta = -sigma * theta;
    return e;
}

// The two weight exponents at which the global argument closes, as functions
// of the nonlinearity degree. They coincide (both -4) at lambda = 6.
inline std::array<double, 2> sigma_choices(int lambda) {
    if (lambda == 4)
        throw std::invalid_argument("sigma_choices: first branch is singular at lambda = 4");
    return {(static_cast<double>(lambda) + 2.0) / (4.0 - static_cast<double>(lambda)),
            (2.0 - 3.0 * static_cast<double>(lambda)) / 4.0};
}

} // namespace bbm
