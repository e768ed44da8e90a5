#pragma once

#include <complex>
#include <cstddef>
#include <memory>

namespace sgkdv {

// Unnormalized real <-> half-complex transforms of length n. Instances are
// cached per length and are safe to execute concurrently.
class RealFft {
public:
    static std::shared_ptr<const RealFft> get(std::size_t n);

    explicit RealFft(std::size_t n);
    ~RealFft();
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    std::size_t n() const { return n_; }
    std::size_t half() const { return n_ / 2 + 1; }

    // out[k] = sum_j in[j] exp(-2 pi i j k / n), k = 0..n/2.
    void forward(const double* in, std::complex<double>* out) const;
    // out[j] = sum_k c[k] exp(2 pi i j k / n) over the Hermitian extension.
    // `scratch` (half() entries) is overwritten; `in` is preserved.
    void inverse(const std::complex<double>* in, double* out, std::complex<double>* scratch) const;

private:
    std::size_t n_;
    void* forward_plan_;
    void* inverse_plan_;
};

}  // namespace sgkdv
