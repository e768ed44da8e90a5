#include "sgkdv/oscillatory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "sgkdv/error.hpp"
#include "sgkdv/quadrature.hpp"

namespace sgkdv {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();
const cd I1(0.0, 1.0);

void check_inputs(double b, double alpha, double x, double c) {
    require(std::isfinite(b) && b > 1.0, "dispersion order b must exceed 1");
    require(std::isfinite(alpha) && alpha > -1.0 && alpha < b - 1.0, "alpha must lie in (-1, b-1)");
    require(std::isfinite(x), "x must be finite");
    require(std::isfinite(c) && c > 0.0, "time scale must be positive");
}

// log(1 + e) accurate for small complex e.
cd log1p_c(cd e) {
    const double re = 0.5 * std::log1p(2.0 * e.real() + std::norm(e));
    const double im = std::atan2(e.imag(), 1.0 + e.real());
    return {re, im};
}

// exp(z) - 1 accurate for small complex z.
cd expm1_c(cd z) {
    const double s = std::sin(0.5 * z.imag());
    const double em = std::expm1(z.real());
    return {em * std::cos(z.imag()) - 2.0 * s * s, std::exp(z.real()) * std::sin(z.imag())};
}

// (1 + e)^b - 1 - b e, by binomial series for small e.
cd binomial_remainder(double b, cd e) {
    if (std::abs(e) < 0.25) {
        cd term = 0.5 * b * (b - 1.0) * e * e;
        cd sum = term;
        for (int k = 3; k < 80; ++k) {
            term *= (b - (k - 1)) / k * e;
            sum += term;
            if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return expm1_c(b * log1p_c(e)) - b * e;
}

cd wrap_phase(long double phase) {
    const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    const double r = static_cast<double>(std::remainder(phase, two_pi));
    return {std::cos(r), std::sin(r)};
}

struct Accumulator {
    OscResult out;
    double tail_bound = 0.0;
    void add(SegmentKind kind, cd from, cd to, cd factor, const QuadResult& r, double extra = 0.0) {
        const double err = std::abs(factor) * (r.error + r.roundoff) + extra;
        out.value += factor * r.value;
        out.abs_error += err;
        out.splits.push_back(OscSegment{kind, 1, from, to, factor * r.value, err, r.evaluations});
    }
};

// Gauss-Jacobi origin block, shrunk until its two-order estimate meets tol.
// Returns the final block size; the shed intervals are appended to `graded`.
double origin_block(Accumulator& acc, const Integrand& smooth_part, double alpha, double h, double tol,
                    cd factor, cd direction, std::vector<double>& graded) {
    QuadResult r;
    for (int depth = 0;; ++depth) {
        r = integrate_jacobi(smooth_part, alpha, h);
        if (r.error <= tol || depth == 60) break;
        graded.push_back(h);
        h *= 0.5;
    }
    acc.add(SegmentKind::origin, 0.0, h * direction, factor, r);
    return h;
}

// Integral along xi = r e^{i theta}, theta = pi / (2b), for x >= 0 or small |x|.
void ray_from_origin(Accumulator& acc, double b, double alpha, double x, double c, const OscOptions& opt) {
    const double theta = kPi / (2.0 * b);
    const double st = std::sin(theta), ct = std::cos(theta);
    const cd dir = std::polar(1.0, theta);
    const cd factor = std::polar(1.0, theta * (alpha + 1.0));
    const double scale = std::pow(c, -1.0 / b);
    double h = x > 0.0 ? std::min(1.0 / (b * x), scale) : scale;

    auto smooth = [=](double r) {
        const double decay = c * std::pow(r, b) + x * r * st;
        return QuadSample{std::exp(cd(-decay, x * r * ct)), c * std::pow(r, b) + std::abs(x) * r};
    };
    auto full = [=](double r) {
        QuadSample s = smooth(r);
        s.value *= std::pow(r, alpha);
        return s;
    };

    std::vector<double> graded;
    const double tol = opt.abs_tol / 8.0;
    h = origin_block(acc, smooth, alpha, h, tol, factor, dir, graded);

    const double ap = std::max(alpha, 0.0);
    auto tail_bound = [&](double R) {
        const double d = c * b * std::pow(R, b - 1.0) + x * st - ap / R;
        if (d <= 0.0) return std::numeric_limits<double>::infinity();
        return std::pow(R, alpha) * std::exp(-(c * std::pow(R, b) + x * R * st)) / d;
    };
    double R = std::max(2.0 * h, scale);
    while (tail_bound(R) > tol && R < 1e300) R *= 2.0;

    std::vector<double> bp{h};
    for (auto it = graded.rbegin(); it != graded.rend(); ++it) bp.push_back(*it);
    double next = bp.back() * 2.0;
    while (next < R) {
        bp.push_back(next);
        next *= 2.0;
    }
    bp.push_back(R);
    QuadResult r = integrate_adaptive(full, bp, tol, opt.max_evaluations);
    const double tb = tail_bound(R);
    acc.add(SegmentKind::tail, h * dir, R * dir, factor, r, tb);
    if (!r.converged) acc.out.abs_error += std::numeric_limits<double>::infinity();
}

// Bridge from 0 to the stationary point through the lower half plane, then a
// ray from the stationary point into the upper half plane.
void stationary_contour(Accumulator& acc, double b, double alpha, double x, double c, const OscOptions& opt) {
    const double X = -x;
    const double xi0 = std::pow(X / (c * b), 1.0 / (b - 1.0));
    const double lam = c * std::pow(xi0, b);
    const double kappa = opt.bridge_depth;
    const double tol = opt.abs_tol / 8.0;

    // Global phase f(xi0) in extended precision.
    const long double f0 = -static_cast<long double>(b - 1.0) * c *
                           std::pow(static_cast<long double>(X) / (static_cast<long double>(c) * b),
                                    static_cast<long double>(b) / (b - 1.0));
    const cd global = wrap_phase(f0);
    const double global_err = 1e-18 * std::fabs(static_cast<double>(f0));

    auto delta_f = [=](cd e, double& scale) {
        const cd d = lam * binomial_remainder(b, e);
        scale = std::abs(d) + lam * b * b * std::abs(e);
        return d;
    };

    // Bridge: xi = xi0 w(s), w = s m(s), m = 1 - i kappa (1 - s). Near the
    // origin the phase is small and is evaluated directly; near xi0 it is
    // evaluated relative to f(xi0).
    auto bridge_smooth = [=](double s, bool relative) {
        const cd m(1.0, -kappa * (1.0 - s));
        const cd w = s * m;
        const cd dw(1.0, -kappa * (1.0 - 2.0 * s));
        double scale = 0.0;
        cd phase;
        if (relative) {
            phase = delta_f(w - 1.0, scale);
        } else {
            const cd wb = std::exp(b * std::log(w));
            phase = lam * (wb - b * w);
            scale = lam * (std::abs(wb) + b * std::abs(w));
        }
        return QuadSample{std::pow(m, alpha) * dw * std::exp(I1 * phase), scale};
    };
    auto near_full = [=](double s) {
        QuadSample q = bridge_smooth(s, false);
        q.value *= std::pow(s, alpha);
        return q;
    };
    auto far_full = [=](double s) {
        QuadSample q = bridge_smooth(s, true);
        q.value *= std::pow(s, alpha);
        return q;
    };
    const double xi_factor = std::pow(xi0, alpha + 1.0);
    double hs = std::min(1.0 / (b * X * xi0), 0.25);
    std::vector<double> graded;
    hs = origin_block(acc, [&](double s) { return bridge_smooth(s, false); }, alpha, hs, tol / xi_factor,
                      xi_factor, xi0, graded);

    std::vector<double> bp{hs};
    for (auto it = graded.rbegin(); it != graded.rend(); ++it) bp.push_back(*it);
    double next = bp.back() * 2.0;
    while (next < 0.5) {
        bp.push_back(next);
        next *= 2.0;
    }
    bp.push_back(0.5);
    QuadResult near = integrate_adaptive(near_full, bp, tol / xi_factor, opt.max_evaluations);
    acc.add(SegmentKind::ring, hs * xi0, 0.5 * xi0, xi_factor, near);
    if (!near.converged) acc.out.abs_error += std::numeric_limits<double>::infinity();

    std::vector<double> fbp{0.5};
    const double width = 0.25 / std::sqrt(lam * b * (b - 1.0));
    double gap = 0.5;
    while (gap * 0.5 > width) {
        gap *= 0.5;
        fbp.push_back(1.0 - gap);
    }
    fbp.push_back(1.0);
    const cd bridge_factor = global * xi_factor;
    QuadResult ring = integrate_adaptive(far_full, fbp, tol / xi_factor, opt.max_evaluations);
    acc.add(SegmentKind::ring, 0.5 * xi0, xi0, bridge_factor, ring, global_err * std::abs(xi_factor * ring.value));
    if (!ring.converged) acc.out.abs_error += std::numeric_limits<double>::infinity();

    // Tail ray: xi = xi0 + r e^{i psi}.
    const double psi = kPi / (2.0 * b);
    const cd dir = std::polar(1.0, psi);
    auto tail_f = [=](double r) {
        const cd xi = xi0 + r * dir;
        double scale = 0.0;
        const cd df = delta_f((r / xi0) * dir, scale);
        return QuadSample{dir * std::pow(xi, alpha) * std::exp(I1 * df), scale};
    };
    const double ap = std::max(alpha, 0.0);
    auto tail_bound = [&](double R) {
        const double near = xi0 + R * std::cos(psi);
        const double d = c * b * (std::pow(near, b - 1.0) - std::pow(xi0, b - 1.0)) * std::sin(psi) - ap / (xi0 + R);
        if (d <= 0.0) return std::numeric_limits<double>::infinity();
        double dummy = 0.0;
        const double im = (I1 * delta_f((R / xi0) * dir, dummy)).real();
        const double weight = alpha >= 0.0 ? std::pow(xi0 + R, alpha) : std::pow(near, alpha);
        return weight * std::exp(im) / d;
    };
    const double sigma = 1.0 / std::sqrt(lam * b * (b - 1.0) / (xi0 * xi0));
    double R = sigma;
    while (tail_bound(R) > tol && R < 1e300) R *= 2.0;
    std::vector<double> tbp{0.0};
    for (double r = sigma / 4.0; r < R; r *= 2.0) tbp.push_back(r);
    tbp.push_back(R);
    QuadResult tail = integrate_adaptive(tail_f, tbp, tol, opt.max_evaluations);
    acc.add(SegmentKind::tail, xi0, xi0 + R * dir, global, tail, tail_bound(R) + global_err * std::abs(tail.value));
    if (!tail.converged) acc.out.abs_error += std::numeric_limits<double>::infinity();
}

void certify(const OscResult& r, const OscOptions& opt, const std::string& what) {
    if (!(r.abs_error <= opt.max_abs_error) || !std::isfinite(r.value.real()) || !std::isfinite(r.value.imag())) {
        std::ostringstream os;
        os << what << ": error target " << opt.max_abs_error << " not reached (estimate " << r.abs_error << ")";
        throw QuadratureFailure(os.str(), r.abs_error);
    }
}

OscResult half_line_raw(double b, double alpha, double x, double c, const OscOptions& opt) {
    check_inputs(b, alpha, x, c);
    Accumulator acc;
    const double xi0 = x < 0.0 ? std::pow(-x / (c * b), 1.0 / (b - 1.0)) : 0.0;
    if (x < 0.0 && c * std::pow(xi0, b) > 1.0)
        stationary_contour(acc, b, alpha, x, c, opt);
    else
        ray_from_origin(acc, b, alpha, x, c, opt);
    return acc.out;
}

void append(OscResult& into, const OscResult& part, int side, bool conjugate) {
    for (OscSegment s : part.splits) {
        s.side = side;
        if (conjugate) {
            s.value = std::conj(s.value);
            s.from = -std::conj(s.from);
            s.to = -std::conj(s.to);
        } else if (side < 0) {
            s.from = -s.from;
            s.to = -s.to;
        }
        into.splits.push_back(s);
    }
}

bool is_integer(double b) { return std::floor(b) == b; }

// Integral over the real line for phase c xi^b (integer b) or c |xi|^b.
OscResult full_line(double b, double alpha, double x, double c, bool absolute_phase, const OscOptions& opt) {
    OscResult out;
    const OscResult pos = half_line_raw(b, alpha, x, c, opt);
    const bool odd = !absolute_phase && static_cast<long>(b) % 2 != 0;
    if (odd) {
        // xi -> -xi maps the negative half line onto the conjugate integrand.
        out.value = 2.0 * pos.value.real();
        out.abs_error = 2.0 * pos.abs_error;
        append(out, pos, 1, false);
        append(out, pos, -1, true);
    } else {
        const OscResult neg = half_line_raw(b, alpha, -x, c, opt);
        out.value = pos.value + neg.value;
        out.abs_error = pos.abs_error + neg.abs_error;
        append(out, pos, 1, false);
        append(out, neg, -1, false);
    }
    return out;
}

}  // namespace

OscResult half_line_integral(double b, double alpha, double x, double c, const OscOptions& opt) {
    OscResult r = half_line_raw(b, alpha, x, c, opt);
    certify(r, opt, "half-line integral");
    return r;
}

OscResult osc_integral_I(const OscQuery& q, const OscOptions& opt) {
    require(is_integer(q.b) && q.b >= 2.0, "osc_integral_I needs an integer b >= 2");
    require(!q.t || *q.t == 1.0, "osc_integral_I is the t = 1 integral; use osc_integral_scaled");
    OscResult r = full_line(q.b, q.alpha, q.x, 1.0, false, opt);
    certify(r, opt, "osc_integral_I");
    return r;
}

OscResult osc_integral_J(const OscQuery& q, const OscOptions& opt) {
    const double t = q.t.value_or(1.0);
    require(t > 0.0, "time scale must be positive");
    OscResult r = full_line(q.b, q.alpha, q.x, t, true, opt);
    certify(r, opt, "osc_integral_J");
    return r;
}

OscResult osc_integral_scaled(const OscQuery& q, const OscOptions& opt) {
    const double t = q.t.value_or(1.0);
    require(std::isfinite(t) && t > 0.0, "time scale must be positive");
    if (t == 1.0) return osc_integral_I(OscQuery{q.b, q.alpha, q.x, std::nullopt}, opt);
    const double s = std::pow(t, -1.0 / q.b);
    const double f = std::pow(t, -(q.alpha + 1.0) / q.b);
    OscResult r = osc_integral_I(OscQuery{q.b, q.alpha, q.x * s, std::nullopt}, opt);
    r.value *= f;
    r.abs_error *= f;
    for (auto& seg : r.splits) {
        seg.value *= f;
        seg.error *= f;
        seg.from /= s;
        seg.to /= s;
    }
    return r;
}

OscResult osc_integral_direct(const OscQuery& q, const OscOptions& opt) {
    require(is_integer(q.b) && q.b >= 2.0, "osc_integral_direct needs an integer b >= 2");
    const double t = q.t.value_or(1.0);
    require(std::isfinite(t) && t > 0.0, "time scale must be positive");
    OscResult r = full_line(q.b, q.alpha, q.x, t, false, opt);
    certify(r, opt, "osc_integral_direct");
    return r;
}

std::string to_string(Branch b) { return b == Branch::origin ? "origin" : "stationary"; }

Branch branch_from_string(const std::string& s) {
    if (s == "origin") return Branch::origin;
    if (s == "stationary") return Branch::stationary;
    throw InvalidArgument("unknown branch '" + s + "'");
}

double predicted_exponent(double b, double alpha, Branch branch) {
    require(b > 1.0 && alpha > -1.0 && alpha < b - 1.0, "alpha must lie in (-1, b-1)");
    if (branch == Branch::origin) return -1.0 - alpha;
    return (alpha - 0.5 * b + 1.0) / (b - 1.0);
}

Branch designated_branch(double alpha) { return alpha <= -0.5 ? Branch::origin : Branch::stationary; }

double envelope_exponent(double b, double alpha) {
    return std::max(predicted_exponent(b, alpha, Branch::origin), predicted_exponent(b, alpha, Branch::stationary));
}

int branch_side(double b, Branch branch) {
    const bool odd = is_integer(b) && static_cast<long>(b) % 2 != 0;
    if (odd) return branch == Branch::origin ? 1 : -1;
    return 1;
}

double envelope_value(double b, double alpha, double x, const EnvelopeOptions& opt) {
    require(opt.window_samples >= 3, "envelope window needs at least 3 samples");
    const double X = std::abs(x);
    const int sgn = x < 0.0 ? -1 : 1;
    const double xi0 = std::pow(std::max(X, 1e-300) / b, 1.0 / (b - 1.0));
    const double width = opt.window_periods * 2.0 * kPi / std::max(xi0, 1e-300);
    auto mag = [&](double u) {
        return std::abs(osc_integral_I(OscQuery{b, alpha, sgn * (X + u), std::nullopt}, opt.osc).value);
    };
    const int n = opt.window_samples;
    std::vector<double> vals(n);
    for (int i = 0; i < n; ++i) vals[i] = mag(width * i / (n - 1));
    const int best = static_cast<int>(std::max_element(vals.begin(), vals.end()) - vals.begin());
    double lo = width * std::max(best - 1, 0) / (n - 1);
    double hi = width * std::min(best + 1, n - 1) / (n - 1);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = hi - g * (hi - lo), bb = lo + g * (hi - lo);
    double fa = mag(a), fb = mag(bb);
    double top = std::max({vals[best], fa, fb});
    for (int it = 0; it < opt.refine_iterations; ++it) {
        if (fa > fb) {
            hi = bb;
            bb = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = mag(a);
            top = std::max(top, fa);
        } else {
            lo = a;
            a = bb;
            fa = fb;
            bb = lo + g * (hi - lo);
            fb = mag(bb);
            top = std::max(top, fb);
        }
    }
    return top;
}

std::vector<double> geometric_points(double lo, double hi, int n) {
    require(lo > 0.0 && hi > lo && n >= 2, "invalid geometric range");
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    return out;
}

DecayFit fit_decay_slope(double b, double alpha, Branch branch, const std::vector<double>& x_range,
                         const EnvelopeOptions& opt) {
    require(x_range.size() >= 6, "decay fit needs at least 6 sample points");
    for (std::size_t i = 0; i < x_range.size(); ++i) {
        require(x_range[i] >= 100.0, "decay fit samples must satisfy |x| >= 100");
        if (i) require(x_range[i] > x_range[i - 1], "decay fit samples must increase strictly");
    }
    require(x_range.back() >= 100.0 * x_range.front(), "decay fit samples must span two orders of magnitude");
    DecayFit fit;
    fit.branch = branch;
    fit.side = branch_side(b, branch);
    fit.predicted_exponent = predicted_exponent(b, alpha, branch);
    fit.sample_points = x_range;
    const std::size_t n = x_range.size();
    fit.envelope.resize(n);
    for (std::size_t i = 0; i < n; ++i) fit.envelope[i] = envelope_value(b, alpha, fit.side * x_range[i], opt);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x_range[i]), ly = std::log(fit.envelope[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double dn = static_cast<double>(n);
    const double den = dn * sxx - sx * sx;
    fit.fitted_exponent = (dn * sxy - sx * sy) / den;
    fit.fitted_intercept = (sy - fit.fitted_exponent * sx) / dn;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = std::log(fit.envelope[i]) - fit.fitted_intercept - fit.fitted_exponent * std::log(x_range[i]);
        rss += r * r;
    }
    fit.slope_stderr = n > 2 ? std::sqrt(rss / (dn - 2.0) * dn / den) : 0.0;
    return fit;
}

EnvelopeBound envelope_bound(double b, double alpha, double exponent, const std::vector<double>& fit_points,
                             const std::vector<double>& check_points, double slack, const EnvelopeOptions& opt) {
    require(!fit_points.empty() && !check_points.empty(), "envelope bound needs fit and check points");
    EnvelopeBound eb;
    eb.exponent = exponent;
    for (double x : fit_points) {
        for (int s : {-1, 1}) {
            const double e = envelope_value(b, alpha, s * std::abs(x), opt);
            eb.constant = std::max(eb.constant, e / std::pow(1.0 + std::abs(x), exponent));
        }
    }
    for (double x : check_points) {
        for (int s : {-1, 1}) {
            const double v = std::abs(osc_integral_I(OscQuery{b, alpha, s * std::abs(x), std::nullopt}, opt.osc).value);
            eb.worst_ratio = std::max(eb.worst_ratio, v / (eb.constant * std::pow(1.0 + std::abs(x), exponent)));
            ++eb.checked;
        }
    }
    eb.holds = eb.worst_ratio <= slack;
    return eb;
}

}  // namespace sgkdv
