#include "sgkdv/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <map>
#include <queue>

#include "sgkdv/error.hpp"

namespace sgkdv {

GaussRule gauss_jacobi(int n, double a, double b) {
    require(n >= 1, "rule needs at least one node");
    require(a > -1.0 && b > -1.0, "Jacobi parameters must exceed -1");
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    const double ab = a + b;
    for (int k = 0; k < n; ++k) {
        const double s = 2.0 * k + ab;
        J(k, k) = (k == 0) ? (b - a) / (ab + 2.0) : (b * b - a * a) / (s * (s + 2.0));
        if (k + 1 < n) {
            const double m = k + 1.0;
            const double t = 2.0 * m + ab;
            double beta;
            if (m == 1.0)
                beta = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
            else
                beta = 4.0 * m * (m + a) * (m + b) * (m + ab) / (t * t * (t + 1.0) * (t - 1.0));
            J(k, k + 1) = J(k + 1, k) = std::sqrt(beta);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                                std::lgamma(ab + 2.0));
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int k = 0; k < n; ++k) {
        rule.nodes[k] = es.eigenvalues()(k);
        const double v0 = es.eigenvectors()(0, k);
        rule.weights[k] = mu0 * v0 * v0;
    }
    return rule;
}

GaussRule gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

constexpr double xgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

constexpr double wgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

constexpr double wg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

double sample_roundoff(const QuadSample& s) { return kEps * std::abs(s.value) * (4.0 + s.phase_scale); }

struct Panel {
    double a, b;
    QuadResult r;
    bool operator<(const Panel& o) const { return r.error < o.r.error; }
};

}  // namespace

QuadResult gauss_kronrod21(const Integrand& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    std::complex<double> k21 = 0.0, g10 = 0.0;
    double round = 0.0;
    const QuadSample mid = f(c);
    k21 += wgk[10] * mid.value;
    round += wgk[10] * sample_roundoff(mid);
    for (int i = 0; i < 10; ++i) {
        const QuadSample lo = f(c - h * xgk[i]);
        const QuadSample hi = f(c + h * xgk[i]);
        const std::complex<double> s = lo.value + hi.value;
        k21 += wgk[i] * s;
        if (i % 2 == 1) g10 += wg[i / 2] * s;
        round += wgk[i] * (sample_roundoff(lo) + sample_roundoff(hi));
    }
    QuadResult r;
    r.value = h * k21;
    r.error = std::abs(h * (k21 - g10));
    r.roundoff = std::abs(h) * round;
    r.evaluations = 21;
    return r;
}

QuadResult integrate_adaptive(const Integrand& f, const std::vector<double>& breakpoints, double abs_tol,
                              std::size_t max_evaluations) {
    require(breakpoints.size() >= 2, "adaptive integration needs an interval");
    std::priority_queue<Panel> active;
    std::vector<Panel> done;
    QuadResult total;
    total.evaluations = 0;
    double err = 0.0;
    std::complex<double> sum = 0.0;
    double round = 0.0;
    auto settle = [&](Panel p) {
        // A panel whose estimate is at roundoff level cannot improve by bisection.
        const double width = std::abs(p.b - p.a);
        const double scale = std::max(std::abs(p.a), std::abs(p.b));
        if (p.r.error <= 50.0 * p.r.roundoff || width <= 64.0 * kEps * scale) {
            p.r.error = std::max(p.r.error, p.r.roundoff);
            done.push_back(p);
        } else {
            active.push(p);
        }
    };
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (breakpoints[i + 1] == breakpoints[i]) continue;
        Panel p{breakpoints[i], breakpoints[i + 1], gauss_kronrod21(f, breakpoints[i], breakpoints[i + 1])};
        total.evaluations += 21;
        settle(p);
    }
    auto tally = [&]() {
        err = 0.0;
        sum = 0.0;
        round = 0.0;
        auto copy = active;
        while (!copy.empty()) {
            err += copy.top().r.error;
            sum += copy.top().r.value;
            round += copy.top().r.roundoff;
            copy.pop();
        }
        for (const Panel& p : done) {
            err += p.r.error;
            sum += p.r.value;
            round += p.r.roundoff;
        }
    };
    // Running error sum maintained incrementally; recomputed periodically to limit drift.
    tally();
    std::size_t since = 0;
    while (!active.empty() && err > abs_tol) {
        if (total.evaluations + 42 > max_evaluations) {
            total.converged = false;
            break;
        }
        Panel p = active.top();
        active.pop();
        const double mid = 0.5 * (p.a + p.b);
        Panel l{p.a, mid, gauss_kronrod21(f, p.a, mid)};
        Panel r{mid, p.b, gauss_kronrod21(f, mid, p.b)};
        total.evaluations += 42;
        err += l.r.error + r.r.error - p.r.error;
        sum += l.r.value + r.r.value - p.r.value;
        round += l.r.roundoff + r.r.roundoff - p.r.roundoff;
        settle(l);
        settle(r);
        if (++since == 256) {
            tally();
            since = 0;
        }
    }
    tally();
    total.value = sum;
    total.error = err;
    total.roundoff = round;
    return total;
}

namespace {

const GaussRule& cached_jacobi(int n, double alpha) {
    static std::mutex m;
    static std::map<std::pair<int, double>, GaussRule> cache;
    std::lock_guard lock(m);
    auto key = std::make_pair(n, alpha);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, gauss_jacobi(n, 0.0, alpha)).first;
    return it->second;
}

std::pair<std::complex<double>, double> jacobi_sum(const Integrand& F, double alpha, double h, int n) {
    const GaussRule& rule = cached_jacobi(n, alpha);
    // u = h (1 + x) / 2; u^alpha du = (h/2)^{alpha+1} (1 + x)^alpha dx.
    const double scale = std::pow(0.5 * h, alpha + 1.0);
    std::complex<double> s = 0.0;
    double round = 0.0;
    for (int i = 0; i < n; ++i) {
        const QuadSample q = F(0.5 * h * (1.0 + rule.nodes[i]));
        s += rule.weights[i] * q.value;
        round += rule.weights[i] * sample_roundoff(q);
    }
    return {scale * s, scale * round};
}

}  // namespace

QuadResult integrate_jacobi(const Integrand& F, double alpha, double h) {
    auto [lo, r1] = jacobi_sum(F, alpha, h, 24);
    auto [hi, r2] = jacobi_sum(F, alpha, h, 40);
    QuadResult r;
    r.value = hi;
    r.error = std::abs(hi - lo);
    r.roundoff = std::max(r1, r2);
    r.evaluations = 64;
    return r;
}

}  // namespace sgkdv
