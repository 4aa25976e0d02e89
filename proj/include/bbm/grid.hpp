#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace bbm {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

// Uniform periodic grid on [-L, L) with N samples, N a power of two.
// Spatial nodes  x_m = -L + m * dx,          dx  = 2L / N
// Frequency bins xi_j = pi * j / L,          j = -N/2 .. N/2 - 1
struct GridSpec {
    double half_width = 0.0;
    int samples = 0;

    GridSpec() = default;
    GridSpec(double L, int N) : half_width(L), samples(N) {
        if (!(L > 0.0))
            throw std::invalid_argument("GridSpec: half_width must be positive");
        if (N < 4 || (N & (N - 1)) != 0)
            throw std::invalid_argument("GridSpec: samples must be a power of two >= 4");
    }

    double dx() const { return 2.0 * half_width / samples; }
    double dxi() const { return pi / half_width; }
    double x(int m) const { return -half_width + m * dx(); }
    // j is the signed frequency index in [-N/2, N/2)
    double xi(int j) const { return pi * j / half_width; }
    double nyquist() const { return pi * (samples / 2) / half_width; }

    bool operator==(const GridSpec& o) const {
        return half_width == o.half_width && samples == o.samples;
    }

    GridSpec refined() const { return GridSpec(half_width, samples * 2); }
};

// Complex-valued samples on a GridSpec. Values at x_m, m = 0..N-1.
struct Field {
    GridSpec grid;
    std::vector<cplx> values;

    Field() = default;
    explicit Field(const GridSpec& g) : grid(g), values(g.samples, cplx{0.0, 0.0}) {}
    Field(const GridSpec& g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
        if (static_cast<int>(values.size()) != g.samples)
            throw std::invalid_argument("Field: value count does not match grid samples");
    }

    int size() const { return grid.samples; }

    // Fraction of squared-magnitude mass carried by imaginary parts. Scaled by
    // the largest component so the squares cannot overflow for finite fields;
    // NaN if any component is non-finite (the fraction is undefined there).
    double imag_mass_fraction() const {
        double scale = 0.0;
        for (const cplx& v : values) {
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                return std::numeric_limits<double>::quiet_NaN();
            scale = std::max({scale, std::abs(v.real()), std::abs(v.imag())});
        }
        if (scale == 0.0) return 0.0;
        double im = 0.0, tot = 0.0;
        for (const cplx& v : values) {
            const double re_s = v.real() / scale, im_s = v.imag() / scale;
            im += im_s * im_s;
            tot += re_s * re_s + im_s * im_s;
        }
        return tot > 0.0 ? im / tot : 0.0;
    }

    bool is_real(double tol = 1e-10) const { return imag_mass_fraction() < tol; }

    // Fraction of L2 mass outside |x| <= L/2; inputs are expected to be
    // localized well inside the box so periodic wrap-around is negligible.
    double truncation_fraction() const {
        double out = 0.0, tot = 0.0;
        for (int m = 0; m < size(); ++m) {
            double w = std::norm(values[m]);
            tot += w;
            if (std::abs(grid.x(m)) > 0.5 * grid.half_width) out += w;
        }
        return tot > 0.0 ? out / tot : 0.0;
    }
};

// Frequency-side coefficients in ascending-xi order: coeff[u] belongs to
// xi(u - N/2). Produced by forward_transform with the convention
//   fhat(xi_j) = dx * sum_m f(x_m) e^{-i xi_j x_m}.
struct Spectrum {
    GridSpec grid;
    std::vector<cplx> coeffs;

    Spectrum() = default;
    explicit Spectrum(const GridSpec& g) : grid(g), coeffs(g.samples, cplx{0.0, 0.0}) {}

    int size() const { return grid.samples; }
    int j_min() const { return -grid.samples / 2; }
    int j_max() const { return grid.samples / 2 - 1; }
    // Signed index j -> array slot
    int slot(int j) const { return j + grid.samples / 2; }
    double xi_at_slot(int u) const { return grid.xi(u - grid.samples / 2); }
};

// Time-sampled states; times strictly increasing.
struct Trajectory {
    std::vector<double> times;
    std::vector<Field> states;

    Trajectory() = default;
    Trajectory(std::vector<double> t, std::vector<Field> s)
        : times(std::move(t)), states(std::move(s)) {
        if (times.size() != states.size())
            throw std::invalid_argument("Trajectory: times and states differ in length");
        for (std::size_t i = 1; i < times.size(); ++i)
            if (!(times[i] > times[i - 1]))
                throw std::invalid_argument("Trajectory: times must be strictly increasing");
    }

    std::size_t size() const { return times.size(); }
};

} // namespace bbm
