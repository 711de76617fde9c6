#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bestcell/numerics.hpp"

namespace bestcell {

/// Scalar parameters of the propagation and attachment model.
///
/// Lengths are metres, `sigma_db` is the standard deviation of the dB-valued
/// shadowing variable, `k0` is a linear gain at reference distance `r0`.
struct NetworkConfig {
    double eta = 3.0;
    double sigma_db = 8.0;
    double k0 = 0.1;  // -10 dB
    double r0 = 1.0;
    double rc = 1000.0;
    /// Nearest cells in the attachment product; derived from sigma when unset.
    std::optional<int> marginal_terms;

    double a() const { return numerics::kDbToNeper; }

    /// 2 for sigma <= 10 dB, 3 above, unless overridden.
    int terms() const;

    /// Throws DomainError naming the first offending field.
    void validate() const;

    /// Non-fatal remarks, e.g. sigma outside the 8-12 dB calibration range.
    std::vector<std::string> warnings() const;

    NetworkConfig with_rc(double new_rc) const {
        NetworkConfig copy = *this;
        copy.rc = new_rc;
        return copy;
    }
};

namespace attachment {

/// Probability that the mobile prefers the serving cell over one neighbour at r_j.
double marginal_not_in_cell(double r_b, double r_j, const NetworkConfig& cfg);

/// Probability that a mobile at distance r_b attaches to the serving cell.
double attach_probability(double r_b, const NetworkConfig& cfg);

/// Radial density of mobiles attached to the serving cell (per metre).
double mobile_density(double r_b, const NetworkConfig& cfg);

/// Serving-cell shadowing truncation point (dB) for attachment probability `p`.
///
/// p == 1 maps to +cutoff·sigma; p must otherwise lie in (0, 1).
double xi_max_for_probability(double p, double sigma_db, double tail_cutoff = 10.0);

double xi_b_max(double r_b, const NetworkConfig& cfg, double tail_cutoff = 10.0);

/// Mean serving-cell propagation gain conditioned on attachment.
double mean_owncell_gain(double r_b, const NetworkConfig& cfg, double tail_cutoff = 10.0);

/// Open evaluation grid on (0, 2R_c): midpoints of `points` equal cells.
///
/// Every point is a fixed multiple of R_c, so curves computed at two cell
/// sizes related by a power of two are bit-identical after rescaling.
std::vector<double> rb_grid(double rc, std::size_t points = 400);

struct AttachmentProfile {
    std::vector<double> rb;
    std::vector<double> p_attach;
    std::vector<double> density;
    std::vector<double> xi_max;
    /// Cell width of the midpoint grid, used as the quadrature weight.
    double step = 0.0;

    /// ∫ p(r_b) dr_b over (0, 2R_c): the share of the 2R_c disc attached to the cell.
    double attached_mass() const;
};

AttachmentProfile attachment_profile(const NetworkConfig& cfg, std::size_t points = 400,
                                     double tail_cutoff = 10.0);

}  // namespace attachment
}  // namespace bestcell
