#include "bestcell/iopr.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bestcell/errors.hpp"
#include "bestcell/geometry.hpp"

namespace bestcell::iopr {

namespace {

// Everything below works in units of R_c; all IOPR quantities are ratios.
struct Setting {
    double x = 0.0;
    std::array<double, 3> r{};
    double rd = 0.0;
    std::array<double, 3> log_ratio{};  // eta/(√2·a·sigma)·ln(x/r̄_j)
    std::array<double, 3> marginal{};
    double inv_attach = 0.0;  // Q^{-1}(P_attach), clamped
    double a_sigma = 0.0;
};

Setting setting(double r_b, const NetworkConfig& cfg) {
    Setting s;
    s.x = r_b / cfg.rc;
    const auto d = geometry::nearest_distances(s.x, 1.0);
    s.r = {d.r1, d.r2, d.r3};
    s.rd = d.rd;
    s.a_sigma = cfg.a() * cfg.sigma_db;
    const double scale = cfg.eta / (std::numbers::sqrt2 * s.a_sigma);
    for (std::size_t j = 0; j < 3; ++j) {
        s.log_ratio[j] = scale * std::log(s.x / s.r[j]);
        s.marginal[j] = numerics::q_function(s.log_ratio[j]);
    }
    const double p = std::clamp(attachment::attach_probability(r_b, cfg), kProbabilityClamp, 1.0 - kProbabilityClamp);
    s.inv_attach = numerics::q_inverse(p);
    return s;
}

double delta(const Setting& s, std::size_t j, const NetworkConfig& cfg) {
    return (s.inv_attach - s.log_ratio[j]) / cfg.sigma_db;
}

// Fluid-ring weight 2π·ρ_BS·r_b^η·(r̄_d^{2-η} - r_∞^{2-η})/(η-2), in ratio form.
double ring_weight(const Setting& s, const NetworkConfig& cfg, double r_inf) {
    const double rd_metres = s.rd * cfg.rc;
    if (r_inf < rd_metres) throw DomainError("r_inf must not be smaller than the fluid ring's inner radius");
    const double outer = std::isinf(r_inf) ? 0.0 : std::pow(r_inf / cfg.rc, 2.0 - cfg.eta);
    const double density = 1.0 / (2.0 * std::numbers::sqrt3);  // ρ_BS·R_c²
    return 2.0 * std::numbers::pi * density * std::pow(s.x, cfg.eta) * (std::pow(s.rd, 2.0 - cfg.eta) - outer) /
           (cfg.eta - 2.0);
}

// Shared shape of the first (k = 1) and second (k = 2) moment closed forms.
double moment(const Setting& s, std::size_t j, int k, double weight, const NetworkConfig& cfg) {
    const double kk = static_cast<double>(k);
    const double growth = std::exp(kk * kk * s.a_sigma * s.a_sigma);
    const double arg = s.log_ratio[j] + kk * std::numbers::sqrt2 * s.a_sigma + delta(s, j, cfg);
    return growth / s.marginal[j] * weight * numerics::q_function(arg);
}

IoprTerms terms_from(const Setting& s, const NetworkConfig& cfg, double r_inf) {
    IoprTerms t;
    for (std::size_t j = 0; j < 2; ++j) {
        const double w = std::pow(s.x / s.r[j], cfg.eta);
        t.mean[j] = moment(s, j, 1, w, cfg);
        t.second[j] = moment(s, j, 2, w * w, cfg);
    }
    const double ring = ring_weight(s, cfg, r_inf);
    t.mean[2] = ring == 0.0 ? 0.0 : moment(s, 2, 1, ring, cfg);
    t.second[2] = ring == 0.0 ? 0.0 : moment(s, 2, 2, ring * ring, cfg);
    for (std::size_t j = 0; j < 3; ++j) t.delta[j] = delta(s, j, cfg);
    return t;
}

}  // namespace

double iopr_near_mean(double r_b, int j, const NetworkConfig& cfg) {
    if (j != 1 && j != 2) throw DomainError("iopr_near_mean handles the two nearest neighbours only");
    const auto s = setting(r_b, cfg);
    const auto idx = static_cast<std::size_t>(j - 1);
    return moment(s, idx, 1, std::pow(s.x / s.r[idx], cfg.eta), cfg);
}

double iopr_far_mean(double r_b, const NetworkConfig& cfg, double r_inf) {
    if (!(cfg.eta > 2.0)) throw DomainError("the fluid interference tail diverges for eta <= 2");
    const auto s = setting(r_b, cfg);
    const double ring = ring_weight(s, cfg, r_inf);
    return ring == 0.0 ? 0.0 : moment(s, 2, 1, ring, cfg);
}

std::array<double, 3> iopr_second_moments(double r_b, const NetworkConfig& cfg, double r_inf) {
    return iopr_terms(r_b, cfg, r_inf).second;
}

std::array<double, 3> mean_shifts(double r_b, const NetworkConfig& cfg) {
    const auto s = setting(r_b, cfg);
    return {delta(s, 0, cfg), delta(s, 1, cfg), delta(s, 2, cfg)};
}

IoprTerms iopr_terms(double r_b, const NetworkConfig& cfg, double r_inf) {
    if (!(cfg.eta > 2.0)) throw DomainError("the fluid interference tail diverges for eta <= 2");
    return terms_from(setting(r_b, cfg), cfg, r_inf);
}

IoprMoments combine(const IoprTerms& t) {
    const auto& m = t.mean;
    IoprMoments out;
    out.mean = m[0] + m[1] + m[2];
    out.second = t.second[0] + t.second[1] + t.second[2] + 2.0 * (m[0] * m[1] + m[0] * m[2] + m[1] * m[2]);
    return out;
}

IoprMoments iopr_total(double r_b, const NetworkConfig& cfg, double r_inf) {
    return combine(iopr_terms(r_b, cfg, r_inf));
}

IoprCurve iopr_spatial_stats(const NetworkConfig& cfg, double r_inf, std::size_t points, const ExecPolicy& policy) {
    cfg.validate();
    const auto profile = attachment::attachment_profile(cfg, points);

    IoprCurve curve;
    curve.rb = profile.rb;
    curve.step = profile.step;
    curve.r_inf = r_inf;
    curve.terms.resize(points);
    curve.mean.resize(points);
    curve.second.resize(points);

    for_each_index(points, policy, [&](std::size_t k) {
        curve.terms[k] = iopr_terms(curve.rb[k], cfg, r_inf);
        const auto m = combine(curve.terms[k]);
        curve.mean[k] = m.mean;
        curve.second[k] = m.second;
    });

    const double mass = profile.attached_mass();
    curve.p_density.resize(points);
    curve.mean_density.resize(points);
    curve.second_density.resize(points);
    double first = 0.0;
    double second = 0.0;
    for (std::size_t k = 0; k < points; ++k) {
        curve.p_density[k] = profile.density[k] / mass;
        curve.mean_density[k] = curve.mean[k] * curve.p_density[k];
        curve.second_density[k] = curve.second[k] * curve.p_density[k];
        first += curve.mean_density[k];
        second += curve.second_density[k];
    }
    curve.mu_f = first * curve.step;
    curve.var_f = second * curve.step - curve.mu_f * curve.mu_f;
    if (curve.var_f < 0.0) {
        throw ConvergenceError("spatial variance of the interference-to-own-power ratio is negative", curve.var_f);
    }
    return curve;
}

}  // namespace bestcell::iopr
