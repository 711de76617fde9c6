#include "bestcell/interference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bestcell/errors.hpp"
#include "bestcell/geometry.hpp"

namespace bestcell::interference {

namespace {

struct Conditioning {
    double p_attach;
    double h;  // truncation point in units of sigma
};

Conditioning conditioning(double r_b, const NetworkConfig& cfg, const numerics::QuadratureSpec& quad) {
    const double p = attachment::attach_probability(r_b, cfg);
    const double xi_max = attachment::xi_max_for_probability(p, cfg.sigma_db, quad.tail_cutoff);
    return {p, xi_max / cfg.sigma_db};
}

// Inner average for a neighbour at normalised distance rj (units of R_c).
double shadow_factor(double x, double rj, const Conditioning& c, const NetworkConfig& cfg,
                     const numerics::QuadratureSpec& quad, const char* term) {
    const double a_sigma = cfg.a() * cfg.sigma_db;
    const double shift = cfg.eta / a_sigma * std::log(x / rj) + a_sigma;
    try {
        return std::exp(0.5 * a_sigma * a_sigma) * truncated_q_average(shift, c.h, quad);
    } catch (const ConvergenceError& e) {
        throw ConvergenceError(std::string(term) + " shadowing integral at r_b/R_c = " + std::to_string(x) + ": " +
                                   e.what(),
                               e.best_estimate());
    }
}

double ring_factor(double rd, double r_inf, double eta) {
    if (r_inf < rd) throw DomainError("r_inf must not be smaller than the fluid ring's inner radius");
    const double outer = std::isinf(r_inf) ? 0.0 : std::pow(r_inf, 2.0 - eta);
    return (std::pow(rd, 2.0 - eta) - outer) / (eta - 2.0);
}

}  // namespace

double truncated_q_average(double shift, double h, const numerics::QuadratureSpec& quad) {
    const double lower = -quad.tail_cutoff;
    const double upper = std::min(h, quad.tail_cutoff);
    if (!(upper > lower)) return 0.0;
    return numerics::integrate(
        [shift](double t) { return numerics::q_function(shift + t) * numerics::normal_pdf(t); }, lower, upper,
        quad);
}

double ocif_near_term(double r_b, int j, const NetworkConfig& cfg, const numerics::QuadratureSpec& quad) {
    if (j != 1 && j != 2) throw DomainError("ocif_near_term handles the two nearest neighbours only");
    const double x = r_b / cfg.rc;
    const auto d = geometry::nearest_distances(x, 1.0);
    const double rj = j == 1 ? d.r1 : d.r2;
    const auto c = conditioning(r_b, cfg, quad);
    const double path = cfg.k0 * std::pow(cfg.r0 / (rj * cfg.rc), cfg.eta);
    return path * shadow_factor(x, rj, c, cfg, quad, j == 1 ? "first-neighbour OCIF" : "second-neighbour OCIF") /
           c.p_attach;
}

double ocif_far_term(double r_b, const NetworkConfig& cfg, double r_inf, const numerics::QuadratureSpec& quad) {
    if (!(cfg.eta > 2.0)) throw DomainError("the fluid interference tail diverges for eta <= 2");
    const double x = r_b / cfg.rc;
    const auto d = geometry::nearest_distances(x, 1.0);
    const double ring = ring_factor(d.rd * cfg.rc, r_inf, cfg.eta);
    if (ring == 0.0) return 0.0;
    const auto c = conditioning(r_b, cfg, quad);
    const double prefactor = 2.0 * std::numbers::pi * geometry::bs_density(cfg.rc) * cfg.k0 *
                             std::pow(cfg.r0, cfg.eta) * ring / c.p_attach;
    return prefactor * shadow_factor(x, d.r3, c, cfg, quad, "far-field OCIF");
}

double ocif_total(double r_b, const NetworkConfig& cfg, double r_inf, const numerics::QuadratureSpec& quad) {
    return ocif_near_term(r_b, 1, cfg, quad) + ocif_near_term(r_b, 2, cfg, quad) +
           ocif_far_term(r_b, cfg, r_inf, quad);
}

OcifCurve ocif_spatial_distribution(const NetworkConfig& cfg, double r_inf, std::size_t points,
                                    const numerics::QuadratureSpec& quad, const ExecPolicy& policy) {
    cfg.validate();
    quad.validate();
    const auto profile = attachment::attachment_profile(cfg, points, quad.tail_cutoff);

    OcifCurve curve;
    curve.rb = profile.rb;
    curve.step = profile.step;
    curve.r_inf = r_inf;
    curve.g1.resize(points);
    curve.g2.resize(points);
    curve.g3plus.resize(points);
    curve.total.resize(points);
    curve.density.resize(points);

    for_each_index(points, policy, [&](std::size_t k) {
        const double r = curve.rb[k];
        curve.g1[k] = ocif_near_term(r, 1, cfg, quad);
        curve.g2[k] = ocif_near_term(r, 2, cfg, quad);
        curve.g3plus[k] = ocif_far_term(r, cfg, r_inf, quad);
        curve.total[k] = curve.g1[k] + curve.g2[k] + curve.g3plus[k];
    });

    const double mass = profile.attached_mass();
    double weighted = 0.0;
    for (std::size_t k = 0; k < points; ++k) {
        curve.density[k] = profile.density[k] * curve.total[k] / mass;
        weighted += curve.density[k];
    }
    curve.mu_g = weighted * curve.step;
    return curve;
}

double spatial_mean_gain(const NetworkConfig& cfg, double r_inf, const numerics::QuadratureSpec& quad) {
    return ocif_spatial_distribution(cfg, r_inf, 400, quad).mu_g;
}

}  // namespace bestcell::interference
