#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace sgkdv {

struct OscQuery {
    double b = 3.0;
    double alpha = 0.0;
    double x = 0.0;
    std::optional<double> t;  // absent means t = 1
};

enum class SegmentKind { origin, ring, tail };

struct OscSegment {
    SegmentKind kind;
    int side;  // +1 for the xi > 0 half line, -1 for xi < 0
    std::complex<double> from, to;  // endpoints in the complex xi plane
    std::complex<double> value;
    double error;
    std::size_t evaluations;
};

struct OscResult {
    std::complex<double> value;
    double abs_error = 0.0;
    std::vector<OscSegment> splits;
};

struct OscOptions {
    double abs_tol = 1e-11;       // refinement target
    double rel_tol = 1e-13;       // relative refinement target
    double max_abs_error = 1e-8;  // larger certified errors are reported as failures
    std::size_t max_evaluations = 4'000'000;
    double bridge_depth = 0.75;   // depth of the lower contour joining 0 to the stationary point
};

// int_{-inf}^{inf} exp(i(xi^b + x xi)) |xi|^alpha dxi for integer b >= 2.
OscResult osc_integral_I(const OscQuery& q, const OscOptions& opt = {});
// Same with phase |xi|^b, real b > 1.
OscResult osc_integral_J(const OscQuery& q, const OscOptions& opt = {});
// int exp(i(t xi^b + x xi)) |xi|^alpha dxi via t^{-(alpha+1)/b} I(b, alpha, x t^{-1/b}).
OscResult osc_integral_scaled(const OscQuery& q, const OscOptions& opt = {});
// The same integral evaluated on contours built for t directly (no rescaling).
OscResult osc_integral_direct(const OscQuery& q, const OscOptions& opt = {});

// int_0^inf exp(i(c xi^b + x xi)) xi^alpha dxi, c > 0, b > 1.
OscResult half_line_integral(double b, double alpha, double x, double c, const OscOptions& opt = {});

enum class Branch { origin, stationary };

std::string to_string(Branch b);
Branch branch_from_string(const std::string& s);

double predicted_exponent(double b, double alpha, Branch branch);
// origin for alpha <= -1/2, stationary otherwise.
Branch designated_branch(double alpha);
// max of the two branch exponents: the upper-envelope exponent.
double envelope_exponent(double b, double alpha);
// Sign of x on which the branch is realized: stationary points exist for
// x < 0 when b is odd; for even b both mechanisms live on either side.
int branch_side(double b, Branch branch);

struct EnvelopeOptions {
    int window_samples = 16;
    double window_periods = 2.0;
    int refine_iterations = 24;
    OscOptions osc;
};

// Local maximum of |I(b, alpha, .)| over a window of oscillation periods
// starting at x (extending away from the origin).
double envelope_value(double b, double alpha, double x, const EnvelopeOptions& opt = {});

struct DecayFit {
    Branch branch;
    int side;
    double predicted_exponent;
    double fitted_exponent;
    double fitted_intercept;  // log-log regression intercept
    double slope_stderr;
    std::vector<double> sample_points;  // |x| values
    std::vector<double> envelope;       // envelope of |I| at each sample
};

// Geometric sequence of n points from lo to hi (inclusive).
std::vector<double> geometric_points(double lo, double hi, int n);

DecayFit fit_decay_slope(double b, double alpha, Branch branch, const std::vector<double>& x_range,
                         const EnvelopeOptions& opt = {});

struct EnvelopeBound {
    double exponent = 0.0;
    double constant = 0.0;     // max envelope / (1 + |x|)^exponent over the fit points, both sides
    double worst_ratio = 0.0;  // max |I| / (C (1 + |x|)^exponent) over the check points
    std::size_t checked = 0;
    bool holds = false;        // worst_ratio <= slack
};

// Single constant C for |I(x)| <= C (1 + |x|)^exponent on both sides of the
// origin, fitted on envelope samples and verified pointwise on check_points.
EnvelopeBound envelope_bound(double b, double alpha, double exponent, const std::vector<double>& fit_points,
                             const std::vector<double>& check_points, double slack = 1.05,
                             const EnvelopeOptions& opt = {});

// Classical Airy function Ai for |x| <= 30: Maclaurin series in long double
// for |x| <= 8, asymptotic expansions beyond.
double airy_reference(double x);

}  // namespace sgkdv
