#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "bbm/grid.hpp"

namespace testsup {

// Deterministic 64-bit generator (splitmix64), independent of the library's
// own RNG so tests don't validate the generator with itself.
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        state += 0x9E3779B97f4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    double uniform() { return (next() >> 11) * 0x1.0p-53; } // [0,1)
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
};

// Trig polynomial with modes on the grid's frequency lattice, |xi| <= K,
// evaluated directly in x-space. Refinement-stable by construction.
inline bbm::Field band_limited(const bbm::GridSpec& g, double K, std::uint64_t seed,
                               bool real_valued = false) {
    Rng rng(seed);
    const int nmax = static_cast<int>(K * g.half_width / bbm::pi);
    std::vector<int> modes;
    std::vector<bbm::cplx> coef;
    for (int nu = -nmax; nu <= nmax; ++nu) {
        modes.push_back(nu);
        coef.push_back(bbm::cplx{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
    }
    if (real_valued) {
        for (std::size_t i = 0; i < modes.size(); ++i) {
            const int nu = modes[i];
            if (nu < 0) continue;
            if (nu == 0) { coef[i] = bbm::cplx{coef[i].real(), 0.0}; continue; }
            for (std::size_t j = 0; j < modes.size(); ++j)
                if (modes[j] == -nu) coef[j] = std::conj(coef[i]);
        }
    }
    bbm::Field f(g);
    for (int m = 0; m < g.samples; ++m) {
        const double x = g.x(m);
        bbm::cplx acc{0.0, 0.0};
        for (std::size_t i = 0; i < modes.size(); ++i) {
            const double xi = bbm::pi * modes[i] / g.half_width;
            acc += coef[i] * std::polar(1.0, xi * x);
        }
        f.values[m] = acc;
    }
    return f;
}

} // namespace testsup
