#pragma once

#include <cstddef>
#include <functional>
#include <numbers>

namespace bestcell::numerics {

/// ln(10)/10: converts a dB-valued shadowing variable to a natural exponent.
inline constexpr double kDbToNeper = std::numbers::ln10 / 10.0;

enum class QuadratureScheme { Adaptive, FixedPanel };

struct QuadratureSpec {
    QuadratureScheme scheme = QuadratureScheme::Adaptive;
    double relative_tolerance = 1e-10;
    /// Adaptive: maximum number of interval bisections. FixedPanel: panel count.
    std::size_t max_subdivisions = 2000;
    /// Gaussian tails are truncated this many standard deviations out.
    double tail_cutoff = 10.0;

    /// Throws DomainError when the invariants do not hold.
    void validate() const;
};

/// Upper tail of the standard normal, Q(x) = P[Z > x].
double q_function(double x);

/// Inverse of q_function on (0, 1).
double q_inverse(double p);

/// Standard normal density.
double normal_pdf(double x);

/// ∫_{-∞}^{xi_max} e^{-order·a·ξ} N(ξ; 0, sigma²) dξ in closed form.
///
/// Infinite `xi_max` (either sign) is accepted and gives the limit.
double truncated_ln_partial_moment(double a_coeff, double sigma, double xi_max, int order);

/// Integrates `f` over [lower, upper] under `spec`.
///
/// The adaptive scheme uses Gauss-Kronrod 7/15 pairs with bisection and
/// throws ConvergenceError (carrying the best estimate) when the subdivision
/// budget runs out. The fixed-panel scheme applies the 15-point Kronrod rule
/// on `max_subdivisions` equal panels with no error control.
double integrate(const std::function<double(double)>& f, double lower, double upper,
                 const QuadratureSpec& spec = {});

}  // namespace bestcell::numerics
