#include "sgkdv/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sgkdv/error.hpp"

namespace sgkdv {

namespace {

void require_finite(const Field& f) {
    require(f.grid != nullptr && f.values.size() == f.grid->n(), "malformed field");
}

}  // namespace

std::vector<complex> half_spectrum(const Field& f) {
    require_finite(f);
    auto fft = RealFft::get(f.grid->n());
    std::vector<complex> h(fft->half());
    fft->forward(f.values.data(), h.data());
    return h;
}

Field from_half_spectrum(const GridPtr& grid, const std::vector<complex>& half) {
    auto fft = RealFft::get(grid->n());
    require(half.size() == fft->half(), "half spectrum has wrong length");
    Field out(grid);
    std::vector<complex> scratch(fft->half());
    fft->inverse(half.data(), out.values.data(), scratch.data());
    const double inv_n = 1.0 / static_cast<double>(grid->n());
    for (double& v : out.values) v *= inv_n;
    return out;
}

SpectralField forward_transform(const Field& f) {
    const Grid& g = *f.grid;
    const std::size_t n = g.n();
    const std::vector<complex> h = half_spectrum(f);
    SpectralField s{f.grid, std::vector<complex>(n)};
    const double dx = g.spacing();
    // x_0 = -L/2 contributes exp(i pi m) = (-1)^m.
    for (std::size_t j = 0; j < n; ++j) {
        const long m = g.mode(j);
        const complex c = j <= n / 2 ? h[j] : std::conj(h[n - j]);
        s.coefficients[j] = (m % 2 == 0 ? dx : -dx) * c;
    }
    return s;
}

Field inverse_transform(const SpectralField& s) {
    require(s.grid != nullptr && s.coefficients.size() == s.grid->n(), "malformed spectral field");
    const Grid& g = *s.grid;
    const std::size_t n = g.n();
    // Project on the Hermitian part, which is exact for real fields.
    std::vector<complex> h(n / 2 + 1);
    const double inv_dx = 1.0 / g.spacing();
    for (std::size_t j = 0; j <= n / 2; ++j) {
        const long m = g.mode(j);
        const complex pos = s.coefficients[j];
        const complex neg = (j == 0 || j == n / 2) ? std::conj(pos) : std::conj(s.coefficients[n - j]);
        const complex c = 0.5 * (pos + neg);
        h[j] = (m % 2 == 0 ? inv_dx : -inv_dx) * c;
    }
    if (n / 2 < h.size()) h[n / 2] = complex(h[n / 2].real(), 0.0);
    h[0] = complex(h[0].real(), 0.0);
    return from_half_spectrum(s.grid, h);
}

Field fractional_derivative(const Field& f, double alpha, DerivativeKind kind, ZeroMode zero_mode) {
    require(std::isfinite(alpha), "derivative order must be finite");
    require_finite(f);
    if (alpha == 0.0) return f;
    if (kind == DerivativeKind::homogeneous && alpha < 0.0 && zero_mode == ZeroMode::require_vanishing) {
        double mean = 0.0;
        for (double v : f.values) mean += v;
        mean *= f.grid->spacing();
        if (std::abs(mean) > 1e-10 * l2_norm(f))
            throw InvalidArgument("negative-order homogeneous derivative needs a vanishing zero mode");
    }
    if (kind == DerivativeKind::homogeneous) {
        return apply_multiplier(f, [alpha](double xi, bool) {
            return xi == 0.0 ? complex(0.0) : complex(std::pow(xi, alpha));
        });
    }
    return apply_multiplier(f, [alpha](double xi, bool) {
        return complex(std::pow(1.0 + xi * xi, 0.5 * alpha));
    });
}

Field derivative(const Field& f, int order) {
    require(order >= 0, "derivative order must be nonnegative");
    if (order == 0) return f;
    const std::size_t n = f.grid->n();
    std::vector<complex> h = half_spectrum(f);
    const Grid& g = *f.grid;
    complex ipow(1.0, 0.0);
    for (int i = 0; i < order; ++i) ipow *= complex(0.0, 1.0);
    for (std::size_t j = 0; j < h.size(); ++j) {
        if (j == n / 2 && order % 2 == 1) {
            h[j] = 0.0;
            continue;
        }
        h[j] *= ipow * std::pow(g.frequency(j) < 0 ? -g.frequency(j) : g.frequency(j), order);
    }
    return from_half_spectrum(f.grid, h);
}

complex airy_symbol(double xi, double t, bool nyquist) {
    if (nyquist || t == 0.0) return complex(1.0, 0.0);
    const long double phase = static_cast<long double>(t) * static_cast<long double>(xi) *
                              static_cast<long double>(xi) * static_cast<long double>(xi);
    const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    const double reduced = static_cast<double>(std::remainder(phase, two_pi));
    return {std::cos(reduced), std::sin(reduced)};
}

Field airy_propagate(const Field& f, double t) {
    require(std::isfinite(t), "propagation time must be finite");
    if (t == 0.0) return f;
    return apply_multiplier(f, [t](double xi, bool nyq) { return airy_symbol(xi, t, nyq); });
}

double sobolev_norm(const Field& f, double s) {
    require_finite(f);
    if (s == 0.0) return l2_norm(f);
    const std::vector<complex> h = half_spectrum(f);
    const Grid& g = *f.grid;
    const std::size_t n = g.n();
    double acc = 0.0;
    for (std::size_t j = 0; j < h.size(); ++j) {
        const double xi = g.frequency(j);
        const double w = (j == 0 || j == n / 2) ? 1.0 : 2.0;
        acc += w * std::pow(1.0 + xi * xi, s) * std::norm(h[j]);
    }
    // (1/L) sum |u_hat|^2 with |u_hat| = dx |DFT|.
    return std::sqrt(acc * g.spacing() / static_cast<double>(n));
}

double l2_norm(const Field& f) {
    require_finite(f);
    double acc = 0.0;
    for (double v : f.values) acc += v * v;
    return std::sqrt(acc * f.grid->spacing());
}

double lp_norm(const Field& f, Exponent p) {
    require_finite(f);
    double mx = 0.0;
    for (double v : f.values) mx = std::max(mx, std::abs(v));
    if (p.is_infinite() || mx == 0.0) return mx;
    require(p.value() >= 1.0, "Lebesgue exponent must be >= 1");
    const double q = p.value();
    double acc = 0.0;
    for (double v : f.values) acc += std::pow(std::abs(v) / mx, q);
    return mx * std::pow(acc * f.grid->spacing(), 1.0 / q);
}

double inner(const Field& a, const Field& b) {
    require(same_grid(a.grid, b.grid), "field grids differ");
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) acc += a.values[j] * b.values[j];
    return acc * a.grid->spacing();
}

}  // namespace sgkdv
