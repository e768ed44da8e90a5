#pragma once

#include <array>
#include <cstdint>

namespace sgkdv {

// Philox4x32-10 counter-based generator.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

std::uint64_t splitmix64(std::uint64_t x);

// Seed for member `index` of an ensemble started from `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

// Standard normal variates from the stream keyed by (seed, stream). The
// sequence depends only on the key and the draw position.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t stream = 0);
    double next();
    // Uniform on the open interval (0, 1).
    double uniform();

private:
    void refill();
    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int used_ = 4;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace sgkdv
