#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "bestcell/attachment.hpp"
#include "bestcell/interference.hpp"
#include "bestcell/parallel.hpp"

namespace bestcell::iopr {

/// Clamp applied to the attachment probability before inverting it.
inline constexpr double kProbabilityClamp = 1e-12;

/// Per-neighbour moments of the interference-to-own-power ratio f at one r_b.
///
/// Index 0 and 1 are the two nearest neighbours, index 2 the fluid tail.
struct IoprTerms {
    std::array<double, 3> mean{};
    std::array<double, 3> second{};
    std::array<double, 3> delta{};
};

struct IoprMoments {
    double mean = 0.0;    // f̄
    double second = 0.0;  // E[f²], including the pairwise cross products
};

/// Conditional mean of f contributed by neighbour j (1 or 2).
double iopr_near_mean(double r_b, int j, const NetworkConfig& cfg);

/// Conditional mean of f contributed by the fluid tail beyond the two nearest neighbours.
double iopr_far_mean(double r_b, const NetworkConfig& cfg, double r_inf = interference::kInfiniteNetwork);

/// Second moments {f̄_1², f̄_2², f̄_{3+}²}.
std::array<double, 3> iopr_second_moments(double r_b, const NetworkConfig& cfg,
                                          double r_inf = interference::kInfiniteNetwork);

/// Mean shifts delta_j for j = 1, 2, 3.
std::array<double, 3> mean_shifts(double r_b, const NetworkConfig& cfg);

IoprTerms iopr_terms(double r_b, const NetworkConfig& cfg, double r_inf = interference::kInfiniteNetwork);

/// Sums the per-term moments, treating the three contributions as independent.
IoprMoments combine(const IoprTerms& terms);

IoprMoments iopr_total(double r_b, const NetworkConfig& cfg, double r_inf = interference::kInfiniteNetwork);

struct IoprCurve {
    std::vector<double> rb;
    std::vector<IoprTerms> terms;
    std::vector<double> mean;    // f̄(r_b)
    std::vector<double> second;  // E[f²](r_b)
    std::vector<double> p_density;
    std::vector<double> mean_density;
    std::vector<double> second_density;
    double step = 0.0;
    double mu_f = 0.0;
    double var_f = 0.0;
    double r_inf = interference::kInfiniteNetwork;
};

/// Tabulates the moments over the r_b grid and forms their spatial statistics.
///
/// Throws ConvergenceError if the spatial variance comes out negative.
IoprCurve iopr_spatial_stats(const NetworkConfig& cfg, double r_inf = interference::kInfiniteNetwork,
                             std::size_t points = 400, const ExecPolicy& policy = {});

}  // namespace bestcell::iopr
