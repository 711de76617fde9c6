#include "bestcell/dimensioning.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "bestcell/errors.hpp"
#include "bestcell/geometry.hpp"

namespace bestcell {

void SystemConstants::validate() const {
    if (!(noise_density > 0.0)) throw DomainError("noise_density must be > 0");
    if (!(bandwidth > 0.0)) throw DomainError("bandwidth must be > 0");
    if (!(interference_ratio >= 0.0)) throw DomainError("interference_ratio must be >= 0");
    if (subcarriers < 1) throw DomainError("subcarriers must be >= 1");
    if (!(sinr_target > 0.0)) throw DomainError("sinr_target must be > 0");
    if (!(orthogonality >= 0.0 && orthogonality <= 1.0)) throw DomainError("orthogonality must lie in [0, 1]");
    if (!(awgn_power >= 0.0)) throw DomainError("awgn_power must be >= 0");
    if (!(common_control_power >= 0.0)) throw DomainError("common_control_power must be >= 0");
}

namespace dimensioning {

namespace {

constexpr double kGammaLowDb = -40.0;
constexpr double kGammaHighDb = 40.0;
constexpr double kGammaResolutionDb = 0.01;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace

LognormalFit fit_lognormal(double m, double v, bool compensate) {
    if (!(m > 0.0)) throw DomainError("fit_lognormal requires a positive mean");
    if (!(v >= 0.0)) throw DomainError("fit_lognormal requires a non-negative variance");
    LognormalFit fit{m, v, 0.0, 0.0, compensate};
    const double spread = std::log1p(v / (m * m));
    fit.mu = std::log(m) - 0.5 * spread;
    fit.sigma = std::sqrt(spread);
    if (compensate) fit.sigma *= std::numbers::sqrt2;
    return fit;
}

double outage_from_moments(double m, double v, double gamma, bool compensate) {
    if (!(gamma > 0.0)) throw DomainError("the SIR threshold must be > 0");
    if (v < 0.0) throw ConvergenceError("negative IOPR variance; tighten the quadrature tolerance", v);
    const auto fit = fit_lognormal(m, v, compensate);
    const double excess = -std::log(gamma) - fit.mu;
    if (fit.sigma == 0.0) {
        if (excess == 0.0) return 0.5;
        return excess > 0.0 ? 0.0 : 1.0;
    }
    return numerics::q_function(excess / fit.sigma);
}

double outage_at(double r_b, double gamma, const NetworkConfig& cfg, double r_inf, bool compensate) {
    const auto m = iopr::iopr_total(r_b, cfg, r_inf);
    return outage_from_moments(m.mean, m.second - m.mean * m.mean, gamma, compensate);
}

double cell_outage(const iopr::IoprCurve& curve, double gamma, bool compensate) {
    double total = 0.0;
    for (std::size_t k = 0; k < curve.rb.size(); ++k) {
        const double m = curve.mean[k];
        const double o = outage_from_moments(m, curve.second[k] - m * m, gamma, compensate);
        total += o * curve.p_density[k];
    }
    return total * curve.step;
}

double cell_outage(double gamma, const NetworkConfig& cfg, double r_inf, bool compensate) {
    return cell_outage(iopr::iopr_spatial_stats(cfg, r_inf), gamma, compensate);
}

std::vector<CoveragePoint> coverage_curve(const iopr::IoprCurve& curve, std::span<const double> gamma_grid_db,
                                          bool compensate) {
    if (gamma_grid_db.empty()) throw DomainError("coverage_curve needs a non-empty SIR grid");
    std::vector<CoveragePoint> out;
    out.reserve(gamma_grid_db.size());
    for (double g : gamma_grid_db) {
        out.push_back({g, 1.0 - cell_outage(curve, db_to_linear(g), compensate)});
    }
    return out;
}

std::vector<CoveragePoint> coverage_curve(std::span<const double> gamma_grid_db, const NetworkConfig& cfg,
                                          double r_inf, bool compensate) {
    return coverage_curve(iopr::iopr_spatial_stats(cfg, r_inf), gamma_grid_db, compensate);
}

double max_bs_power_from_gain(double mu_g, const SystemConstants& sys) {
    if (!(mu_g > 0.0)) throw DomainError("max_bs_power requires a positive mean interference gain");
    return sys.interference_ratio * sys.noise_power() / mu_g;
}

double max_bs_power(const NetworkConfig& cfg, const SystemConstants& sys, double r_inf) {
    return max_bs_power_from_gain(interference::spatial_mean_gain(cfg, r_inf), sys);
}

double power_density(const NetworkConfig& cfg, const SystemConstants& sys, double r_inf) {
    return max_bs_power(cfg, sys, r_inf) * geometry::bs_density(cfg.rc);
}

double cell_capacity(double gamma) { return std::log2(1.0 + gamma); }

double gamma_for_coverage(const iopr::IoprCurve& curve, double target, bool compensate) {
    if (!(target > 0.0 && target < 1.0)) throw DomainError("coverage target must lie in (0, 1)");
    const auto coverage = [&](double db) { return 1.0 - cell_outage(curve, db_to_linear(db), compensate); };
    double lo = kGammaLowDb;
    double hi = kGammaHighDb;
    if (coverage(lo) < target) throw RangeError("coverage target is not reachable above -40 dB SIR");
    if (coverage(hi) >= target) throw RangeError("coverage target is still met at +40 dB SIR");
    while (hi - lo > kGammaResolutionDb) {
        const double mid = 0.5 * (lo + hi);
        (coverage(mid) >= target ? lo : hi) = mid;
    }
    return lo;
}

RateDensityCurve rate_density(double coverage_target, std::span<const double> rc_grid, const NetworkConfig& cfg,
                              double r_inf, bool compensate) {
    RateDensityCurve out;
    out.coverage_target = coverage_target;
    out.gamma_db = gamma_for_coverage(iopr::iopr_spatial_stats(cfg, r_inf), coverage_target, compensate);
    out.capacity = cell_capacity(db_to_linear(out.gamma_db));
    out.points.reserve(rc_grid.size());
    for (double rc : rc_grid) {
        const double density = geometry::bs_density(rc);
        out.points.push_back({rc, density, out.capacity * density});
    }
    return out;
}

double cdma_bs_power(std::span<const CdmaUser> users, const SystemConstants& sys) {
    const double g = sys.sinr_target;
    const double alpha = sys.orthogonality;
    double sum_h = 0.0;
    double sum_load = 0.0;
    for (const auto& u : users) {
        sum_h += u.h;
        sum_load += alpha + u.f;
    }
    const double scale = g / (1.0 + alpha * g);
    const double denominator = 1.0 - scale * sum_load;
    // Within a few ulps of the pole counts as the pole itself.
    if (denominator <= 8.0 * std::numeric_limits<double>::epsilon()) {
        throw InfeasibleLoadError("offered load exceeds the cell capacity (CDMA power equation has no solution)");
    }
    return (sys.common_control_power + scale * sys.awgn_power * sum_h) / denominator;
}

std::vector<PowerPoint> power_curve(std::span<const double> rc_grid, const NetworkConfig& cfg,
                                    const SystemConstants& sys, double r_inf) {
    std::vector<PowerPoint> out;
    out.reserve(rc_grid.size());
    for (double rc : rc_grid) {
        PowerPoint p;
        p.rc = rc;
        p.mu_g = interference::spatial_mean_gain(cfg.with_rc(rc), r_inf);
        p.pmax = max_bs_power_from_gain(p.mu_g, sys);
        p.power_density = p.pmax * geometry::bs_density(rc);
        out.push_back(p);
    }
    return out;
}

DimensioningResult dimension(const NetworkConfig& cfg, const SystemConstants& sys, std::span<const double> rc_grid,
                             std::span<const double> gamma_grid_db, double coverage_target, double r_inf) {
    DimensioningResult result;
    result.power = power_curve(rc_grid, cfg, sys, r_inf);
    const auto curve = iopr::iopr_spatial_stats(cfg, r_inf);
    result.coverage = coverage_curve(curve, gamma_grid_db);
    result.rate.coverage_target = coverage_target;
    result.rate.gamma_db = gamma_for_coverage(curve, coverage_target);
    result.rate.capacity = cell_capacity(db_to_linear(result.rate.gamma_db));
    for (double rc : rc_grid) {
        const double density = geometry::bs_density(rc);
        result.rate.points.push_back({rc, density, result.rate.capacity * density});
    }
    return result;
}

}  // namespace dimensioning
}  // namespace bestcell
