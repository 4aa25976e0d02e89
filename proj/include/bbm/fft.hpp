#pragma once

#include <complex>
#include <map>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace bbm::detail {

// Cached out-of-place c2c plans per transform size. Plans are created with
// FFTW_ESTIMATE | FFTW_UNALIGNED so execution on arbitrary caller buffers is
// legal and the planning step is deterministic. fftw_execute_dft is
// re-entrant; only plan creation needs the lock.
struct FftPlans {
    fftw_plan forward;
    fftw_plan backward;
};

inline const FftPlans& fft_plans(int n) {
    static std::map<int, FftPlans> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) {
        std::vector<std::complex<double>> a(n), b(n);
        auto* pa = reinterpret_cast<fftw_complex*>(a.data());
        auto* pb = reinterpret_cast<fftw_complex*>(b.data());
        FftPlans p;
        p.forward = fftw_plan_dft_1d(n, pa, pb, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        p.backward = fftw_plan_dft_1d(n, pa, pb, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        it = cache.emplace(n, p).first;
    }
    return it->second;
}

// out[k] = sum_m in[m] e^{-2 pi i k m / n}
inline void dft_forward(const std::vector<std::complex<double>>& in,
                        std::vector<std::complex<double>>& out) {
    const int n = static_cast<int>(in.size());
    out.resize(n);
    const FftPlans& p = fft_plans(n);
    fftw_execute_dft(p.forward,
                     reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

// out[m] = sum_k in[k] e^{+2 pi i k m / n}   (unnormalized)
inline void dft_backward(const std::vector<std::complex<double>>& in,
                         std::vector<std::complex<double>>& out) {
    const int n = static_cast<int>(in.size());
    out.resize(n);
    const FftPlans& p = fft_plans(n);
    fftw_execute_dft(p.backward,
                     reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

} // namespace bbm::detail
