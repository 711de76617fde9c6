#include "bestcell/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "bestcell/errors.hpp"

namespace bestcell::numerics {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Lower-tail normal CDF, accurate for large negative x.
double phi_lower(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

// Acklam's rational approximation of the lower-tail probit, refined by
// Halley steps against erfc. q must lie in (0, 0.5].
double probit_lower(double q) {
    static constexpr std::array<double, 6> a = {-3.969683028665376e+01, 2.209460984245205e+02,
                                                -2.759285104469687e+02, 1.383577518672690e+02,
                                                -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr std::array<double, 5> b = {-5.447609879822406e+01, 1.615858368580409e+02,
                                                -1.556989798598866e+02, 6.680131188771972e+01,
                                                -1.328068155288572e+01};
    static constexpr std::array<double, 6> c = {-7.784894002430293e-03, -3.223964580411365e-01,
                                                -2.400758277161838e+00, -2.549732539343734e+00,
                                                4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr std::array<double, 4> d = {7.784695709041462e-03, 3.224671290700398e-01,
                                                2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double q_low = 0.02425;

    double x;
    if (q < q_low) {
        const double t = std::sqrt(-2.0 * std::log(q));
        x = (((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) /
            ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0);
    } else {
        const double t = q - 0.5;
        const double r = t * t;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * t /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    for (int it = 0; it < 2; ++it) {
        const double e = phi_lower(x) - q;
        const double u = e / normal_pdf(x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
constexpr std::array<double, 8> kXgk = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double lower;
    double upper;
    double value;
    double error;
};

Panel gauss_kronrod(const std::function<double(double)>& f, double lower, double upper) {
    const double centre = 0.5 * (lower + upper);
    const double half = 0.5 * (upper - lower);
    const double fc = f(centre);
    double kronrod = kWgk[7] * fc;
    double gauss = kWg[3] * fc;
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double sum = f(centre - dx) + f(centre + dx);
        kronrod += kWgk[j] * sum;
        if (j % 2 == 1) gauss += kWg[j / 2] * sum;
    }
    kronrod *= half;
    gauss *= half;
    return {lower, upper, kronrod, std::abs(kronrod - gauss)};
}

struct LargerError {
    bool operator()(const Panel& lhs, const Panel& rhs) const { return lhs.error < rhs.error; }
};

double integrate_adaptive(const std::function<double(double)>& f, double lower, double upper,
                          const QuadratureSpec& spec) {
    std::priority_queue<Panel, std::vector<Panel>, LargerError> panels;
    Panel first = gauss_kronrod(f, lower, upper);
    double total = first.value;
    double error = first.error;
    panels.push(first);

    const auto converged = [&] {
        const double scale = std::abs(total);
        return error <= spec.relative_tolerance * scale ||
               error <= 50.0 * std::numeric_limits<double>::epsilon() * scale || error == 0.0;
    };

    std::size_t splits = 0;
    while (!converged()) {
        if (splits >= spec.max_subdivisions) {
            throw ConvergenceError("adaptive quadrature exceeded " + std::to_string(spec.max_subdivisions) +
                                       " subdivisions (error estimate " + std::to_string(error) + ")",
                                   total);
        }
        const Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.lower + worst.upper);
        const Panel left = gauss_kronrod(f, worst.lower, mid);
        const Panel right = gauss_kronrod(f, mid, worst.upper);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++splits;
        // Rebuild the running sums periodically so cancellation does not drift.
        if (splits % 64 == 0) {
            auto copy = panels;
            total = 0.0;
            error = 0.0;
            while (!copy.empty()) {
                total += copy.top().value;
                error += copy.top().error;
                copy.pop();
            }
        }
    }
    return total;
}

double integrate_fixed(const std::function<double(double)>& f, double lower, double upper,
                       const QuadratureSpec& spec) {
    const std::size_t n = std::max<std::size_t>(spec.max_subdivisions, 1);
    const double width = (upper - lower) / static_cast<double>(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = lower + width * static_cast<double>(i);
        const double b = (i + 1 == n) ? upper : a + width;
        total += gauss_kronrod(f, a, b).value;
    }
    return total;
}

}  // namespace

void QuadratureSpec::validate() const {
    if (!(relative_tolerance > 0.0 && relative_tolerance <= 1e-2)) {
        throw DomainError("quadrature relative tolerance must lie in (0, 1e-2]");
    }
    if (!(tail_cutoff >= 8.0)) throw DomainError("quadrature tail cutoff must be >= 8");
    if (max_subdivisions == 0) throw DomainError("quadrature needs at least one subdivision");
}

double q_function(double x) {
    // In the far tail the rounding of x/√2 costs x²·ε relative accuracy; extended precision absorbs it.
    if (x > 5.0) return static_cast<double>(0.5L * std::erfc(static_cast<long double>(x) / std::sqrt(2.0L)));
    return 0.5 * std::erfc(x * kInvSqrt2);
}

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double q_inverse(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("q_inverse requires p in (0, 1)");
    if (p == 0.5) return 0.0;
    if (p < 0.5) return -probit_lower(p);
    return probit_lower(1.0 - p);
}

double truncated_ln_partial_moment(double a_coeff, double sigma, double xi_max, int order) {
    if (!(sigma > 0.0)) throw DomainError("truncated_ln_partial_moment requires sigma > 0");
    if (order != 1 && order != 2) throw DomainError("truncated_ln_partial_moment order must be 1 or 2");
    const double k = static_cast<double>(order);
    const double shift = k * a_coeff * sigma;
    const double full = std::exp(0.5 * shift * shift);
    if (std::isinf(xi_max)) return xi_max > 0 ? full : 0.0;
    // 1 - Q(z) written as Q(-z) keeps precision when z is large and negative.
    return full * q_function(-(xi_max / sigma + shift));
}

double integrate(const std::function<double(double)>& f, double lower, double upper,
                 const QuadratureSpec& spec) {
    spec.validate();
    if (!(lower < upper)) throw DomainError("integrate requires lower < upper");
    if (spec.scheme == QuadratureScheme::FixedPanel) return integrate_fixed(f, lower, upper, spec);
    return integrate_adaptive(f, lower, upper, spec);
}

}  // namespace bestcell::numerics
