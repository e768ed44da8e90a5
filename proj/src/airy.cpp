#include <cmath>
#include <numbers>

#include "sgkdv/error.hpp"
#include "sgkdv/oscillatory.hpp"

namespace sgkdv {

namespace {

using ld = long double;

constexpr double kSeriesLimit = 8.0;

ld airy_series(ld x) {
    const ld c1 = 0.355028053887817239260063186004183176L;   // Ai(0)
    const ld c2 = 0.258819403792806798405183560189203963L;   // -Ai'(0)
    const ld x3 = x * x * x;
    ld f = 1.0L, g = x;
    ld tf = 1.0L, tg = x;
    for (int k = 1; k < 400; ++k) {
        tf *= x3 / ((3.0L * k - 1.0L) * (3.0L * k));
        tg *= x3 / ((3.0L * k) * (3.0L * k + 1.0L));
        f += tf;
        g += tg;
        if (std::fabs(tf) < 1e-30L * std::fabs(f) && std::fabs(tg) < 1e-30L * (std::fabs(g) + 1e-300L)) break;
    }
    return c1 * f - c2 * g;
}

// u_k = (2k+1)(2k+3)...(6k-1) / (216^k k!).
ld airy_u(int k) {
    ld u = 1.0L;
    for (int j = 1; j <= k; ++j)
        u *= (6.0L * j - 5.0L) * (6.0L * j - 3.0L) * (6.0L * j - 1.0L) / ((2.0L * j - 1.0L) * 216.0L * j);
    return u;
}

ld airy_asymptotic_positive(ld x) {
    const ld zeta = 2.0L / 3.0L * x * std::sqrt(x);
    ld sum = 0.0L, term = 1.0L, prev = 1e300L;
    for (int k = 0; k < 60; ++k) {
        term = airy_u(k) / std::pow(zeta, static_cast<ld>(k)) * (k % 2 ? -1.0L : 1.0L);
        if (std::fabs(term) > prev) break;
        sum += term;
        prev = std::fabs(term);
        if (prev < 1e-22L * std::fabs(sum)) break;
    }
    return std::exp(-zeta) / (2.0L * std::sqrt(std::numbers::pi_v<ld>) * std::pow(x, 0.25L)) * sum;
}

ld airy_asymptotic_negative(ld z) {
    const ld zeta = 2.0L / 3.0L * z * std::sqrt(z);
    ld P = 0.0L, Q = 0.0L;
    ld prev = 1e300L;
    for (int k = 0; k < 60; ++k) {
        const ld tp = airy_u(2 * k) / std::pow(zeta, static_cast<ld>(2 * k)) * (k % 2 ? -1.0L : 1.0L);
        const ld tq = airy_u(2 * k + 1) / std::pow(zeta, static_cast<ld>(2 * k + 1)) * (k % 2 ? -1.0L : 1.0L);
        const ld mag = std::fabs(tp) + std::fabs(tq);
        if (mag > prev) break;
        P += tp;
        Q += tq;
        prev = mag;
        if (mag < 1e-22L) break;
    }
    const ld phase = zeta + std::numbers::pi_v<ld> / 4.0L;
    return (std::sin(phase) * P - std::cos(phase) * Q) / (std::sqrt(std::numbers::pi_v<ld>) * std::pow(z, 0.25L));
}

}  // namespace

double airy_reference(double x) {
    if (!(std::fabs(x) <= 30.0)) throw InvalidArgument("airy_reference supports |x| <= 30");
    if (std::fabs(x) <= kSeriesLimit) return static_cast<double>(airy_series(x));
    if (x > 0) return static_cast<double>(airy_asymptotic_positive(x));
    return static_cast<double>(airy_asymptotic_negative(-static_cast<ld>(x)));
}

}  // namespace sgkdv
