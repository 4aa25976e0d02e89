#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "bbm/grid.hpp"

namespace bbm {

namespace detail {

// Portable deterministic generator (splitmix64). Streams are addressed by
// (seed, member, salt) so members can be produced in any order.
struct SplitMix {
    std::uint64_t state;
    explicit SplitMix(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        state += 0x9E3779B97f4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
};

inline std::uint64_t stream_seed(std::uint64_t seed, int member, std::uint64_t salt) {
    SplitMix mix(seed ^ (0x9E3779B97f4A7C15ull * static_cast<std::uint64_t>(member + 1)) ^ salt);
    return mix.next();
}

} // namespace detail

enum class FamilyKind { gaussian_packets, band_limited_random };

inline FamilyKind family_kind_from_name(const std::string& name) {
    if (name == "gaussian-packets") return FamilyKind::gaussian_packets;
    if (name == "band-limited-random") return FamilyKind::band_limited_random;
    throw std::invalid_argument("TestFamily: unknown kind '" + name + "'");
}

inline std::string family_kind_name(FamilyKind k) {
    return k == FamilyKind::gaussian_packets ? "gaussian-packets" : "band-limited-random";
}

struct FamilyParams {
    double width_min = 0.6;  // gaussian envelope widths
    double width_max = 2.5;
    double center_max = 2.0; // |center| bound keeps the truncation diagnostic green
    double mod_max = 6.0;    // modulation frequency bound
    double band_limit = 8.0; // lattice cutoff of the band-limited kind
    int bumps = 3;
};

struct TestFamily {
    std::uint64_t seed = 1;
    int count = 32;
    FamilyKind kind = FamilyKind::gaussian_packets;
    FamilyParams params{};
};

// Member fields are defined by grid-independent formulas, so refining the
// grid changes only the sampling, never the underlying function.
inline Field make_member(const TestFamily& fam, int member_id, const GridSpec& grid) {
    if (member_id < 0 || member_id >= fam.count)
        throw std::out_of_range("make_member: member_id outside family");
    Field f(grid);
    if (fam.kind == FamilyKind::gaussian_packets) {
        detail::SplitMix rng(detail::stream_seed(fam.seed, member_id, 0xA11CEull));
        for (int b = 0; b < fam.params.bumps; ++b) {
            const double a = rng.uniform(0.3, 1.0);
            const double w = rng.uniform(fam.params.width_min, fam.params.width_max);
            const double c = rng.uniform(-fam.params.center_max, fam.params.center_max);
            const double m = rng.uniform(0.0, fam.params.mod_max);
            const double ph = rng.uniform(0.0, 2.0 * pi);
            for (int i = 0; i < grid.samples; ++i) {
                const double x = grid.x(i);
                const double d = x - c;
                f.values[i] += a * std::exp(-0.5 * d * d / (w * w)) * std::cos(m * x + ph);
            }
        }
        return f;
    }
    // band-limited-random: random trigonometric polynomial on the lattice
    // xi = nu*pi/L under a wide gaussian window (width L/10) in x.
    detail::SplitMix rng(detail::stream_seed(fam.seed, member_id, 0xBA2Dull));
    const double L = grid.half_width;
    const int nmax = static_cast<int>(fam.params.band_limit * L / pi);
    std::vector<double> re(static_cast<std::size_t>(nmax) + 1), im(static_cast<std::size_t>(nmax) + 1);
    for (int nu = 0; nu <= nmax; ++nu) {
        const double xi = pi * nu / L;
        const double env = std::exp(-2.0 * xi * xi / (fam.params.band_limit * fam.params.band_limit));
        re[static_cast<std::size_t>(nu)] = env * rng.uniform(-1.0, 1.0);
        im[static_cast<std::size_t>(nu)] = (nu == 0) ? 0.0 : env * rng.uniform(-1.0, 1.0);
    }
    const double xw = L / 10.0;
    for (int i = 0; i < grid.samples; ++i) {
        const double x = grid.x(i);
        double acc = 0.5 * re[0];
        for (int nu = 1; nu <= nmax; ++nu) {
            const double ph = pi * nu * x / L;
            acc += re[static_cast<std::size_t>(nu)] * std::cos(ph) -
                   im[static_cast<std::size_t>(nu)] * std::sin(ph);
        }
        f.values[i] = acc * std::exp(-0.5 * x * x / (xw * xw));
    }
    return f;
}

// Scalar time envelope for separable space-time test inputs
// f(t, x) = profile(t) * member(x).
struct TimeProfile {
    double tau = 10.0, a = 0.25, omega = 1.0, phase = 0.0;
    double operator()(double t) const {
        return std::exp(-t / tau) * (1.0 + a * std::cos(omega * t + phase));
    }
};

// Profiles decay fast relative to T so that truncating a whole-line time
// integral to [0, T] loses only an e^{-4} tail.
inline TimeProfile make_profile(const TestFamily& fam, int member_id, double T) {
    detail::SplitMix rng(detail::stream_seed(fam.seed, member_id, 0x71A3ull));
    TimeProfile p;
    p.tau = rng.uniform(0.125 * T, 0.25 * T);
    p.a = rng.uniform(0.0, 0.5);
    p.omega = rng.uniform(0.5, 2.0);
    p.phase = rng.uniform(0.0, 2.0 * pi);
    return p;
}

} // namespace bbm
