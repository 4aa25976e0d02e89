#pragma once

#include <algorithm>
#include <vector>

#include "bbm/group.hpp"
#include "bbm/quadrature.hpp"

namespace bbm {

struct KernelOptions {
    double tol = 1e-10;    // absolute tolerance per integration stage
    int series_terms = 64; // length of the far-tail amplitude series
};

namespace detail {

// Stationary points of psi(xi) = x xi - t phi(xi) on (0, inf): phi'(xi) = x/t
// reduces to a y^2 + (2a+1) y + (a-1) = 0 with y = xi^2, a = x/t.
inline std::vector<double> stationary_points(double t, double x) {
    std::vector<double> pts;
    if (t == 0.0) return pts;
    const double a = x / t;
    if (a == 0.0) {
        pts.push_back(1.0);
        return pts;
    }
    const double disc = 8.0 * a + 1.0;
    if (disc < 0.0) return pts;
    const double sq = std::sqrt(disc);
    for (double y : {(-(2.0 * a + 1.0) + sq) / (2.0 * a), (-(2.0 * a + 1.0) - sq) / (2.0 * a)})
        if (y > 0.0 && std::isfinite(y)) pts.push_back(std::sqrt(y));
    std::sort(pts.begin(), pts.end());
    return pts;
}

// Power series about w = 0 of g(w) = (1+w^2)^{sigma/2} e^{-i t phi(w)}.
// Because phi(1/xi) = phi(xi), g(1/xi) is the far-tail amplitude profile:
// (1+xi^2)^{sigma/2} e^{-i t phi(xi)} = xi^sigma g(1/xi).
inline std::vector<cplx> tail_series(double t, double sigma, int n_terms) {
    std::vector<cplx> f(static_cast<std::size_t>(n_terms), cplx{0.0, 0.0}); // -i t phi(w)
    for (int k = 0; 2 * k + 1 < n_terms; ++k)
        f[static_cast<std::size_t>(2 * k + 1)] = cplx{0.0, (k % 2 == 0) ? -t : t};
    std::vector<cplx> e(static_cast<std::size_t>(n_terms), cplx{0.0, 0.0});
    e[0] = 1.0;
    for (int n = 1; n < n_terms; ++n) {
        cplx acc{0.0, 0.0};
        for (int k = 1; k <= n; ++k)
            acc += static_cast<double>(k) * f[static_cast<std::size_t>(k)] *
                   e[static_cast<std::size_t>(n - k)];
        e[static_cast<std::size_t>(n)] = acc / static_cast<double>(n);
    }
    std::vector<double> p(static_cast<std::size_t>(n_terms), 0.0); // (1+w^2)^{sigma/2}
    p[0] = 1.0;
    double binom = 1.0;
    for (int k = 1; 2 * k < n_terms; ++k) {
        binom *= (0.5 * sigma - (k - 1)) / k;
        p[static_cast<std::size_t>(2 * k)] = binom;
    }
    std::vector<cplx> g(static_cast<std::size_t>(n_terms), cplx{0.0, 0.0});
    for (int i = 0; i < n_terms; ++i) {
        if (p[static_cast<std::size_t>(i)] == 0.0) continue;
        for (int j = 0; i + j < n_terms; ++j)
            g[static_cast<std::size_t>(i + j)] +=
                p[static_cast<std::size_t>(i)] * e[static_cast<std::size_t>(j)];
    }
    return g;
}

// G_nu(x, X) = int_X^inf xi^{-nu} e^{i x xi} dxi. Closed form at x = 0;
// otherwise integration by parts, truncated at the smallest term (the
// caller guarantees |x| X is large).
inline cplx tail_moment(double nu, double x, double X) {
    if (x == 0.0) return cplx{std::pow(X, 1.0 - nu) / (nu - 1.0), 0.0};
    const cplx ix{0.0, x};
    cplx term = -std::exp(cplx{0.0, x * X}) * std::pow(X, -nu) / ix;
    cplx acc = term;
    double prev = std::abs(term);
    for (int k = 1; k < 64; ++k) {
        term *= (nu + k - 1.0) / (ix * X);
        const double mag = std::abs(term);
        if (mag >= prev) break;
        acc += term;
        prev = mag;
        if (mag < 1e-18 * std::abs(acc)) break;
    }
    return acc;
}

} // namespace detail

// Pointwise kernel of J^sigma S(t): the unnormalized Fourier integral
//   K(t, x) = 2 int_0^inf (1+xi^2)^{sigma/2} cos(x xi - t phi(xi)) dxi.
// Core range: adaptive panels pre-split at 1, sqrt(3), and the stationary
// points of the phase. Mid range: adaptive in log xi out to where the
// reciprocal amplitude series and the oscillatory moment asymptotics are
// both safe. Far tail: semi-analytic series.
inline double kernel_direct(double t, double sigma, double x, const KernelOptions& opt = {}) {
    if (!(sigma < -1.0))
        throw std::invalid_argument("kernel_direct: integral needs sigma < -1");
    auto f = [sigma, t, x](double xi) {
        return std::pow(1.0 + xi * xi, 0.5 * sigma) * std::cos(x * xi - t * phi(xi));
    };

    std::vector<double> marks = detail::stationary_points(t, x);
    double xi0 = 8.0;
    if (!marks.empty()) xi0 = std::max(xi0, 2.0 * marks.back());
    marks.push_back(1.0);
    marks.push_back(std::sqrt(3.0));
    std::sort(marks.begin(), marks.end());

    QuadResult core;
    double lo = 0.0;
    for (double m : marks) {
        if (m <= lo + 1e-9 || m >= xi0) continue;
        core += adaptive_gk15(f, lo, m, opt.tol);
        lo = m;
    }
    core += adaptive_gk15(f, lo, xi0, opt.tol);

    double xi1 = std::max(xi0, 8.0 * (1.0 + std::abs(t)));
    if (x != 0.0) xi1 = std::max(xi1, 60.0 / std::abs(x));

    QuadResult mid;
    if (xi1 > xi0) {
        auto flog = [&f](double s) {
            const double xi = std::exp(s);
            return f(xi) * xi;
        };
        mid = adaptive_gk15(flog, std::log(xi0), std::log(xi1), opt.tol);
    }

    const std::vector<cplx> c = detail::tail_series(t, sigma, opt.series_terms);
    cplx tail{0.0, 0.0};
    for (int n = 0; n < opt.series_terms; ++n) {
        const cplx cn = c[static_cast<std::size_t>(n)];
        if (cn == cplx{0.0, 0.0}) continue;
        tail += cn * detail::tail_moment(static_cast<double>(n) - sigma, x, xi1);
    }
    return 2.0 * (core.value + mid.value + tail.real());
}

// Pointwise value of J^sigma S(t) applied to the unit-mass Gaussian of the
// given width (spectrum e^{-width^2 xi^2 / 2}), by direct quadrature:
//   (1/pi) int_0^inf (1+xi^2)^{sigma/2} e^{-width^2 xi^2/2} cos(x xi - t phi(xi)) dxi.
// The Gaussian window makes plain adaptive integration sufficient; serves
// as an independent cross-check of the spectral-grid propagator.
inline double windowed_group_value(double t, double sigma, double x, double width,
                                   double tol = 1e-12) {
    if (!(width > 0.0)) throw std::invalid_argument("windowed_group_value: width must be > 0");
    auto f = [sigma, t, x, width](double xi) {
        return std::pow(1.0 + xi * xi, 0.5 * sigma) * std::exp(-0.5 * width * width * xi * xi) *
               std::cos(x * xi - t * phi(xi));
    };
    const double cut = std::sqrt(90.0) / width;
    std::vector<double> marks = detail::stationary_points(t, x);
    marks.push_back(1.0);
    marks.push_back(std::sqrt(3.0));
    std::sort(marks.begin(), marks.end());
    QuadResult q;
    double lo = 0.0;
    for (double m : marks) {
        if (m <= lo + 1e-9 || m >= cut) continue;
        q += adaptive_gk15(f, lo, m, tol);
        lo = m;
    }
    q += adaptive_gk15(f, lo, cut, tol);
    return q.value / pi;
}

} // namespace bbm
