#include "bestcell/attachment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bestcell/errors.hpp"
#include "bestcell/geometry.hpp"

namespace bestcell {

int NetworkConfig::terms() const {
    if (marginal_terms) return *marginal_terms;
    return sigma_db <= 10.0 ? 2 : 3;
}

void NetworkConfig::validate() const {
    if (!(eta > 2.0)) throw DomainError("eta must be > 2 (got " + std::to_string(eta) + ")");
    if (!(sigma_db > 0.0)) throw DomainError("sigma_db must be > 0");
    if (!(k0 > 0.0)) throw DomainError("k0 must be > 0");
    if (!(r0 > 0.0)) throw DomainError("r0 must be > 0");
    if (!(rc > 0.0)) throw DomainError("rc must be > 0");
    if (marginal_terms && *marginal_terms != 2 && *marginal_terms != 3) {
        throw DomainError("marginal_terms must be 2 or 3");
    }
}

std::vector<std::string> NetworkConfig::warnings() const {
    std::vector<std::string> out;
    if (!marginal_terms && (sigma_db < 8.0 || sigma_db > 12.0)) {
        std::ostringstream msg;
        msg << "sigma_db=" << sigma_db << " is outside the 8-12 dB range the nearest-cell product"
            << " was calibrated for; using " << terms() << " marginal terms";
        out.push_back(msg.str());
    }
    return out;
}

namespace attachment {

double marginal_not_in_cell(double r_b, double r_j, const NetworkConfig& cfg) {
    if (!(r_b > 0.0 && r_j > 0.0)) throw DomainError("marginal_not_in_cell requires positive distances");
    const double scale = cfg.eta / (std::numbers::sqrt2 * cfg.a() * cfg.sigma_db);
    return numerics::q_function(scale * std::log(r_b / r_j));
}

double attach_probability(double r_b, const NetworkConfig& cfg) {
    // Work in units of R_c so the result depends on r_b/R_c alone.
    const double x = r_b / cfg.rc;
    const auto d = geometry::nearest_distances(x, 1.0);
    double p = marginal_not_in_cell(x, d.r1, cfg) * marginal_not_in_cell(x, d.r2, cfg);
    if (cfg.terms() == 3) p *= marginal_not_in_cell(x, d.r3, cfg);
    return p;
}

double mobile_density(double r_b, const NetworkConfig& cfg) {
    return r_b / (2.0 * cfg.rc * cfg.rc) * attach_probability(r_b, cfg);
}

double xi_max_for_probability(double p, double sigma_db, double tail_cutoff) {
    const double cap = tail_cutoff * sigma_db;
    if (p >= 1.0 || 1.0 - p == 0.0) return cap;
    if (!(p > 0.0)) throw DomainError("xi_b_max requires an attachment probability in (0, 1]");
    return std::min(numerics::q_inverse(1.0 - p) * sigma_db, cap);
}

double xi_b_max(double r_b, const NetworkConfig& cfg, double tail_cutoff) {
    return xi_max_for_probability(attach_probability(r_b, cfg), cfg.sigma_db, tail_cutoff);
}

double mean_owncell_gain(double r_b, const NetworkConfig& cfg, double tail_cutoff) {
    if (!(r_b > cfg.r0)) throw DomainError("mean_owncell_gain requires r_b > r0 (far field)");
    const double p = attach_probability(r_b, cfg);
    const double xi_max = xi_max_for_probability(p, cfg.sigma_db, tail_cutoff);
    const double path = cfg.k0 * std::pow(cfg.r0 / r_b, cfg.eta);
    return path * numerics::truncated_ln_partial_moment(cfg.a(), cfg.sigma_db, xi_max, 1) / p;
}

std::vector<double> rb_grid(double rc, std::size_t points) {
    if (points == 0) throw DomainError("rb_grid needs at least one point");
    std::vector<double> grid(points);
    const double step = 2.0 * rc / static_cast<double>(points);
    for (std::size_t k = 0; k < points; ++k) grid[k] = (static_cast<double>(k) + 0.5) * step;
    return grid;
}

double AttachmentProfile::attached_mass() const {
    double total = 0.0;
    for (double v : density) total += v;
    return total * step;
}

AttachmentProfile attachment_profile(const NetworkConfig& cfg, std::size_t points, double tail_cutoff) {
    cfg.validate();
    AttachmentProfile profile;
    profile.rb = rb_grid(cfg.rc, points);
    profile.step = 2.0 * cfg.rc / static_cast<double>(points);
    profile.p_attach.reserve(points);
    profile.density.reserve(points);
    profile.xi_max.reserve(points);
    for (double r : profile.rb) {
        const double p = attach_probability(r, cfg);
        profile.p_attach.push_back(p);
        profile.density.push_back(r / (2.0 * cfg.rc * cfg.rc) * p);
        profile.xi_max.push_back(xi_max_for_probability(p, cfg.sigma_db, tail_cutoff));
    }
    return profile;
}

}  // namespace attachment
}  // namespace bestcell
