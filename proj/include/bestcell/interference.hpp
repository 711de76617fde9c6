#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "bestcell/attachment.hpp"
#include "bestcell/numerics.hpp"
#include "bestcell/parallel.hpp"

namespace bestcell::interference {

inline constexpr double kInfiniteNetwork = std::numeric_limits<double>::infinity();

/// Other-cell interference gain tabulated over the r_b grid.
struct OcifCurve {
    std::vector<double> rb;
    std::vector<double> g1;
    std::vector<double> g2;
    std::vector<double> g3plus;
    std::vector<double> total;
    /// p(r_b)·total / ∫p, so that Σ density·step == mu_g.
    std::vector<double> density;
    double step = 0.0;
    double mu_g = 0.0;
    double r_inf = kInfiniteNetwork;
};

/// ∫_{-∞}^{h} Q(shift + t) φ(t) dt with the lower tail cut at -cutoff.
///
/// Shared by the interference and own-cell terms: `shift` carries the
/// log-distance term and the a·sigma offset, `h` is xi_max / sigma.
double truncated_q_average(double shift, double h, const numerics::QuadratureSpec& quad);

/// Mean interference gain from the j-th nearest neighbour (j = 1, 2), conditioned on attachment.
double ocif_near_term(double r_b, int j, const NetworkConfig& cfg, const numerics::QuadratureSpec& quad = {});

/// Fluid-model gain from all stations beyond the two nearest, out to `r_inf`.
///
/// A lower bound on the true far-field sum; r_inf == r̄_d gives zero.
double ocif_far_term(double r_b, const NetworkConfig& cfg, double r_inf = kInfiniteNetwork,
                     const numerics::QuadratureSpec& quad = {});

/// Sum of the two near terms and the fluid tail at one r_b.
double ocif_total(double r_b, const NetworkConfig& cfg, double r_inf = kInfiniteNetwork,
                  const numerics::QuadratureSpec& quad = {});

OcifCurve ocif_spatial_distribution(const NetworkConfig& cfg, double r_inf = kInfiniteNetwork,
                                    std::size_t points = 400, const numerics::QuadratureSpec& quad = {},
                                    const ExecPolicy& policy = {});

/// Spatial mean of the interference gain, mu_G.
double spatial_mean_gain(const NetworkConfig& cfg, double r_inf = kInfiniteNetwork,
                         const numerics::QuadratureSpec& quad = {});

}  // namespace bestcell::interference
