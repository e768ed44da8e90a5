#include <cmath>
#include <sstream>

#include "sgkdv/error.hpp"
#include "sgkdv/estimates.hpp"

namespace sgkdv {

namespace {

constexpr double kTol = 1e-12;

bool in_range(Exponent e, double lo) { return e.is_infinite() || e.value() >= lo - kTol; }

}  // namespace

Admissibility validate_kato(Exponent p, Exponent q, double alpha) {
    std::ostringstream why;
    const double ip = p.reciprocal(), iq = q.reciprocal();
    if (!std::isfinite(alpha)) why << "alpha is not finite; ";
    if (!in_range(p, 4.0)) why << "p = " << p.str() << " below 4; ";
    if (!in_range(q, 2.0)) why << "q = " << q.str() << " below 2; ";
    if (std::isfinite(alpha) && (alpha < -0.25 - kTol || alpha > 1.0 + kTol))
        why << "alpha = " << alpha << " outside [-1/4, 1]; ";
    const double r1 = 2.0 * ip - (0.5 - iq);
    if (std::abs(r1) > kTol) why << "2/p - (1/2 - 1/q) = " << r1 << "; ";
    const double r2 = alpha - (2.0 * iq - ip);
    if (std::isfinite(alpha) && std::abs(r2) > kTol) why << "alpha - (2/q - 1/p) = " << r2 << "; ";
    std::string d = why.str();
    if (d.empty()) return {true, "admissible"};
    d.resize(d.size() - 2);
    return {false, d};
}

Admissibility validate_strichartz(Exponent p, Exponent q, double beta) {
    std::ostringstream why;
    const double ip = p.reciprocal(), iq = q.reciprocal();
    if (!std::isfinite(beta)) why << "beta is not finite; ";
    if (!in_range(p, 2.0)) why << "p = " << p.str() << " below 2; ";
    if (!in_range(q, 1.0)) why << "q = " << q.str() << " below 1; ";
    if (std::isfinite(beta) && (beta < -kTol || beta > 0.5 + kTol)) why << "beta = " << beta << " outside [0, 1/2]; ";
    if (std::isfinite(beta)) {
        const double r = iq - (beta + 1.0) / 3.0 * (0.5 - ip);
        if (std::abs(r) > kTol) why << "1/q - (beta+1)/3 (1/2 - 1/p) = " << r << "; ";
    }
    std::string d = why.str();
    if (d.empty()) return {true, "admissible"};
    d.resize(d.size() - 2);
    return {false, d};
}

KatoTriple kato_family_for_pq_order(double alpha) {
    require(std::isfinite(alpha) && alpha >= -0.25 && alpha < 1.0 / 6.0, "alpha must lie in [-1/4, 1/6)");
    KatoTriple t;
    t.alpha = alpha;
    t.p = 5.0 / (1.0 - alpha);
    t.q = alpha == -0.25 ? kInf : Exponent(10.0 / (4.0 * alpha + 1.0));
    return t;
}

StrichartzPair strichartz_pair(Exponent p, double beta) {
    require(std::isfinite(beta) && beta >= 0.0 && beta <= 0.5, "beta must lie in [0, 1/2]");
    require(p.is_infinite() || p.value() >= 2.0, "p must be at least 2");
    const double iq = (beta + 1.0) / 3.0 * (0.5 - p.reciprocal());
    StrichartzPair s;
    s.p = p;
    s.beta = beta;
    s.q = iq == 0.0 ? kInf : Exponent(1.0 / iq);
    return s;
}

std::array<Exponent, 2> beta_exponents(int k) {
    require(k >= 4, "k must be at least 4");
    const double ip = 2.0 / (5.0 * k) + 0.1;
    const double iq = 0.3 - 4.0 / (5.0 * k);
    return {Exponent(1.0 / ip), Exponent(1.0 / iq)};
}

}  // namespace sgkdv
