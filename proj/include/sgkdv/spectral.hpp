#pragma once

#include <vector>

#include "sgkdv/exponent.hpp"
#include "sgkdv/fft.hpp"
#include "sgkdv/grid.hpp"

namespace sgkdv {

// u_hat(xi) = sum_j u(x_j) exp(-i x_j xi) dx, coefficients in grid order.
SpectralField forward_transform(const Field& f);
// Inverse of forward_transform; returns the real part.
Field inverse_transform(const SpectralField& s);

enum class DerivativeKind { homogeneous, inhomogeneous };
enum class ZeroMode { require_vanishing, zero_out };

// |xi|^alpha (zero mode -> 0 unless alpha = 0) or (1 + xi^2)^(alpha/2).
Field fractional_derivative(const Field& f, double alpha, DerivativeKind kind,
                            ZeroMode zero_mode = ZeroMode::require_vanishing);

// d^order/dx^order. Odd orders annihilate the unpaired Nyquist mode.
Field derivative(const Field& f, int order = 1);

// Solves u_t + u_xxx = 0: u_hat(t) = exp(i t xi^3) u_hat(0).
Field airy_propagate(const Field& f, double t);

// e^{i t xi^3} with the Nyquist mode treated as xi = 0 (keeps fields real).
complex airy_symbol(double xi, double t, bool nyquist);

double sobolev_norm(const Field& f, double s);
double l2_norm(const Field& f);
double lp_norm(const Field& f, Exponent p);
double inner(const Field& a, const Field& b);

// Half spectrum (modes 0..n/2) of the plain DFT, no dx or phase factors.
std::vector<complex> half_spectrum(const Field& f);
Field from_half_spectrum(const GridPtr& grid, const std::vector<complex>& half);

// Multiplies the spectrum of a real field by symbol(xi, is_nyquist). The symbol
// must be Hermitian, symbol(-xi) = conj(symbol(xi)), and real at Nyquist.
template <class Symbol>
Field apply_multiplier(const Field& f, Symbol&& symbol) {
    std::vector<complex> h = half_spectrum(f);
    const Grid& g = *f.grid;
    for (std::size_t j = 0; j < h.size(); ++j)
        h[j] *= symbol(g.frequency(j) < 0 ? -g.frequency(j) : g.frequency(j),
                       j == g.nyquist_index());
    return from_half_spectrum(f.grid, h);
}

}  // namespace sgkdv
