#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "bbm/fft.hpp"
#include "bbm/grid.hpp"

namespace bbm {

inline constexpr double inf = std::numeric_limits<double>::infinity();

// fhat(xi_j) = dx * sum_m f(x_m) e^{-i xi_j x_m}.
// With x_m = -L + m dx and xi_j = pi j / L this is dx * (-1)^j * DFT_j,
// reordered so coefficients come out in ascending-xi order.
inline Spectrum forward_transform(const Field& f) {
    const int n = f.size();
    Spectrum out(f.grid);
    std::vector<cplx> dft;
    detail::dft_forward(f.values, dft);
    const double dx = f.grid.dx();
    for (int u = 0; u < n; ++u) {
        const int j = u - n / 2;
        const int k = j >= 0 ? j : j + n;
        const double sign = (j & 1) ? -1.0 : 1.0;
        out.coeffs[u] = dx * sign * dft[k];
    }
    return out;
}

// f(x_m) = (1 / 2L) sum_j fhat(xi_j) e^{+i xi_j x_m}
inline Field inverse_transform(const Spectrum& s) {
    const int n = s.size();
    std::vector<cplx> packed(n);
    for (int u = 0; u < n; ++u) {
        const int j = u - n / 2;
        const int k = j >= 0 ? j : j + n;
        const double sign = (j & 1) ? -1.0 : 1.0;
        packed[k] = sign * s.coeffs[u];
    }
    Field out(s.grid);
    detail::dft_backward(packed, out.values);
    const double scale = 1.0 / (2.0 * s.grid.half_width);
    for (cplx& v : out.values) v *= scale;
    return out;
}

// Rectangle-rule L^p norm, exact for band-limited integrands under Nyquist.
// p = inf gives the grid max. Large p is overflow-guarded by scaling.
inline double lp_norm(const Field& f, double p) {
    if (!(p >= 1.0))
        throw std::invalid_argument("lp_norm: p must satisfy 1 <= p <= inf");
    double peak = 0.0;
    for (const cplx& v : f.values) peak = std::max(peak, std::abs(v));
    if (p == inf || peak == 0.0) return peak;
    double acc = 0.0;
    for (const cplx& v : f.values) acc += std::pow(std::abs(v) / peak, p);
    return peak * std::pow(acc * f.grid.dx(), 1.0 / p);
}

inline double conjugate_exponent(double p) {
    if (!(p >= 1.0))
        throw std::invalid_argument("conjugate_exponent: p must satisfy 1 <= p <= inf");
    if (p == inf) return 1.0;
    if (p == 1.0) return inf;
    return p / (p - 1.0);
}

// Fourier multiplier m(xi). Throws if the symbol evaluates non-finite at a
// grid frequency, naming the offending xi.
template <class Symbol>
Field apply_multiplier(const Field& f, Symbol&& m) {
    Spectrum s = forward_transform(f);
    for (int u = 0; u < s.size(); ++u) {
        const double xi = s.xi_at_slot(u);
        const cplx mv = m(xi);
        if (!std::isfinite(mv.real()) || !std::isfinite(mv.imag()))
            throw std::domain_error("apply_multiplier: symbol non-finite at xi = " +
                                    std::to_string(xi));
        s.coeffs[u] *= mv;
    }
    return inverse_transform(s);
}

template <class Symbol>
void multiply_symbol(Spectrum& s, Symbol&& m) {
    for (int u = 0; u < s.size(); ++u) {
        const double xi = s.xi_at_slot(u);
        const cplx mv = m(xi);
        if (!std::isfinite(mv.real()) || !std::isfinite(mv.imag()))
            throw std::domain_error("multiply_symbol: symbol non-finite at xi = " +
                                    std::to_string(xi));
        s.coeffs[u] *= mv;
    }
}

// Relative spectral mass beyond |xi| > cutoff.
inline double spectral_tail_fraction(const Spectrum& s, double cutoff) {
    double out = 0.0, tot = 0.0;
    for (int u = 0; u < s.size(); ++u) {
        const double w = std::norm(s.coeffs[u]);
        tot += w;
        if (std::abs(s.xi_at_slot(u)) > cutoff) out += w;
    }
    return tot > 0.0 ? out / tot : 0.0;
}

// Two-thirds rule: zero every coefficient with |xi| above 2/3 of Nyquist.
inline void dealias(Spectrum& s) {
    const int n = s.size();
    for (int u = 0; u < n; ++u) {
        const int j = u - n / 2;
        if (std::abs(j) * 3 > n) s.coeffs[u] = cplx{0.0, 0.0};
    }
}

enum class QuadRule { trapezoid, simpson, gauss_subintervals };

inline QuadRule quad_rule_from_name(const std::string& name) {
    if (name == "trapezoid") return QuadRule::trapezoid;
    if (name == "simpson") return QuadRule::simpson;
    if (name == "gauss-on-subintervals") return QuadRule::gauss_subintervals;
    throw std::invalid_argument("unknown quadrature rule: " + name);
}

namespace detail {

// Integral over [a, b] of the quadratic interpolating (x0,f0),(x1,f1),(x2,f2),
// accumulated into Lagrange-basis weights.
inline void quadratic_weights(double x0, double x1, double x2, double a, double b,
                              double& w0, double& w1, double& w2) {
    auto basis = [=](double u, double v, double denom) {
        // antiderivative of (x-u)(x-v)/denom evaluated over [a, b]
        auto F = [=](double x) {
            return x * x * x / 3.0 - (u + v) * x * x / 2.0 + u * v * x;
        };
        return (F(b) - F(a)) / denom;
    };
    w0 = basis(x1, x2, (x0 - x1) * (x0 - x2));
    w1 = basis(x0, x2, (x1 - x0) * (x1 - x2));
    w2 = basis(x0, x1, (x2 - x0) * (x2 - x1));
}

} // namespace detail

// Composite-Simpson weights for strictly increasing sample times. Uniform
// grids with an odd interval count close with the 3/8 rule so cubics stay
// exact; non-uniform grids fall back to quadratic pieces.
inline std::vector<double> simpson_weights(const std::vector<double>& times) {
    const int n = static_cast<int>(times.size());
    if (n == 0) throw std::invalid_argument("simpson_weights: empty time grid");
    std::vector<double> w(n, 0.0);
    if (n == 1) return w;
    for (int i = 1; i < n; ++i)
        if (!(times[i] > times[i - 1]))
            throw std::invalid_argument("simpson_weights: times must be strictly increasing");
    if (n == 2) {
        w[0] = w[1] = 0.5 * (times[1] - times[0]);
        return w;
    }

    const double h0 = times[1] - times[0];
    bool uniform = true;
    for (int i = 1; i < n; ++i)
        if (std::abs((times[i] - times[i - 1]) - h0) > 1e-12 * h0) { uniform = false; break; }

    const int intervals = n - 1;
    if (uniform && intervals % 2 == 0) {
        for (int i = 0; i + 2 < n; i += 2) {
            w[i] += h0 / 3.0;
            w[i + 1] += 4.0 * h0 / 3.0;
            w[i + 2] += h0 / 3.0;
        }
        return w;
    }
    if (uniform && n >= 4) {
        const int head = intervals - 3; // even by construction
        for (int i = 0; i + 2 <= head; i += 2) {
            w[i] += h0 / 3.0;
            w[i + 1] += 4.0 * h0 / 3.0;
            w[i + 2] += h0 / 3.0;
        }
        w[n - 4] += 3.0 * h0 / 8.0;
        w[n - 3] += 9.0 * h0 / 8.0;
        w[n - 2] += 9.0 * h0 / 8.0;
        w[n - 1] += 3.0 * h0 / 8.0;
        return w;
    }

    int i = 0;
    while (i + 2 < n) {
        double w0, w1, w2;
        detail::quadratic_weights(times[i], times[i + 1], times[i + 2],
                                  times[i], times[i + 2], w0, w1, w2);
        w[i] += w0;
        w[i + 1] += w1;
        w[i + 2] += w2;
        i += 2;
    }
    if (i + 1 < n) { // one interval left: quadratic through the last three nodes
        double w0, w1, w2;
        detail::quadratic_weights(times[n - 3], times[n - 2], times[n - 1],
                                  times[n - 2], times[n - 1], w0, w1, w2);
        w[n - 3] += w0;
        w[n - 2] += w1;
        w[n - 1] += w2;
    }
    return w;
}

inline std::vector<double> trapezoid_weights(const std::vector<double>& times) {
    const int n = static_cast<int>(times.size());
    if (n == 0) throw std::invalid_argument("trapezoid_weights: empty time grid");
    std::vector<double> w(n, 0.0);
    for (int i = 1; i < n; ++i) {
        if (!(times[i] > times[i - 1]))
            throw std::invalid_argument("trapezoid_weights: times must be strictly increasing");
        const double h = times[i] - times[i - 1];
        w[i - 1] += 0.5 * h;
        w[i] += 0.5 * h;
    }
    return w;
}

inline std::vector<double> quadrature_weights(const std::vector<double>& times, QuadRule rule) {
    switch (rule) {
        case QuadRule::trapezoid: return trapezoid_weights(times);
        case QuadRule::simpson: return simpson_weights(times);
        case QuadRule::gauss_subintervals:
            throw std::invalid_argument(
                "time_quadrature: gauss-on-subintervals needs a callable integrand, "
                "not samples");
    }
    throw std::logic_error("quadrature_weights: unreachable");
}

template <class T>
T time_quadrature(const std::vector<double>& times, const std::vector<T>& values,
                  QuadRule rule) {
    if (times.size() != values.size())
        throw std::invalid_argument("time_quadrature: times and values differ in length");
    const std::vector<double> w = quadrature_weights(times, rule);
    T acc{};
    for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * values[i];
    return acc;
}

namespace detail {
inline constexpr double gl7_nodes[7] = {
    -0.9491079123427585245, -0.7415311855993944399, -0.4058451513773971669, 0.0,
    0.4058451513773971669,  0.7415311855993944399,  0.9491079123427585245};
inline constexpr double gl7_weights[7] = {
    0.1294849661688696933, 0.2797053914892766679, 0.3818300505051189449,
    0.4179591836734693878, 0.3818300505051189449, 0.2797053914892766679,
    0.1294849661688696933};
} // namespace detail

// Composite 7-point Gauss-Legendre for callables; the gauss-on-subintervals
// flavour of time_quadrature.
template <class F>
auto time_quadrature(double a, double b, int subintervals, F&& f)
    -> decltype(f(0.0) * 0.0) {
    if (subintervals < 1) throw std::invalid_argument("time_quadrature: subintervals < 1");
    using R = decltype(f(0.0) * 0.0);
    R acc{};
    const double h = (b - a) / subintervals;
    for (int s = 0; s < subintervals; ++s) {
        const double mid = a + (s + 0.5) * h;
        for (int g = 0; g < 7; ++g)
            acc += (0.5 * h * detail::gl7_weights[g]) * f(mid + 0.5 * h * detail::gl7_nodes[g]);
    }
    return acc;
}

} // namespace bbm
