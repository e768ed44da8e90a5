#include "sgkdv/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <vector>

namespace sgkdv {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

std::shared_ptr<const RealFft> RealFft::get(std::size_t n) {
    static std::map<std::size_t, std::shared_ptr<const RealFft>> cache;
    static std::mutex cache_mutex;
    std::lock_guard lock(cache_mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    auto fft = std::make_shared<const RealFft>(n);
    cache.emplace(n, fft);
    return fft;
}

RealFft::RealFft(std::size_t n) : n_(n) {
    std::lock_guard lock(planner_mutex());
    const int ni = static_cast<int>(n);
    double* r = fftw_alloc_real(n);
    fftw_complex* c = fftw_alloc_complex(n / 2 + 1);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_plan_ = fftw_plan_dft_r2c_1d(ni, r, c, flags);
    inverse_plan_ = fftw_plan_dft_c2r_1d(ni, c, r, flags);
    fftw_free(c);
    fftw_free(r);
}

RealFft::~RealFft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void RealFft::forward(const double* in, std::complex<double>* out) const {
    fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), const_cast<double*>(in),
                         reinterpret_cast<fftw_complex*>(out));
}

void RealFft::inverse(const std::complex<double>* in, double* out,
                      std::complex<double>* scratch) const {
    std::copy(in, in + half(), scratch);
    fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_),
                         reinterpret_cast<fftw_complex*>(scratch), out);
}

}  // namespace sgkdv
