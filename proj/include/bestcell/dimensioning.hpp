#pragma once

#include <span>
#include <vector>

#include "bestcell/attachment.hpp"
#include "bestcell/interference.hpp"
#include "bestcell/iopr.hpp"

namespace bestcell {

/// Noise, bandwidth and link-level constants of the downlink.
struct SystemConstants {
    double noise_density = 4e-21;  // N0, W/Hz
    double bandwidth = 5e6;        // B_w, Hz
    double interference_ratio = 1e5;
    int subcarriers = 512;  // N_s
    double sinr_target = 1.0;            // γ*, linear
    double orthogonality = 0.0;          // α
    double awgn_power = 2e-14;           // σ_n², W
    double common_control_power = 1.0;  // P_cch, W

    /// N0·B_w, equal to N_s·σ_s².
    double noise_power() const { return noise_density * bandwidth; }
    /// σ_s², chosen so that N_s·σ_s² == N0·B_w.
    double subcarrier_noise() const { return noise_power() / subcarriers; }

    void validate() const;
};

namespace dimensioning {

struct LognormalFit {
    double m = 0.0;
    double v = 0.0;
    double mu = 0.0;
    double sigma = 0.0;
    bool compensated = false;
};

/// Moment-matched log-normal; `compensate` widens the spread by √2.
LognormalFit fit_lognormal(double m, double v, bool compensate = false);

/// P[f > 1/γ] for f log-normal with moments (m, v).
double outage_from_moments(double m, double v, double gamma, bool compensate = true);

/// Outage at distance r_b from the serving station.
double outage_at(double r_b, double gamma, const NetworkConfig& cfg,
                 double r_inf = interference::kInfiniteNetwork, bool compensate = true);

/// Cell-average outage over a tabulated IOPR curve.
double cell_outage(const iopr::IoprCurve& curve, double gamma, bool compensate = true);

double cell_outage(double gamma, const NetworkConfig& cfg, double r_inf = interference::kInfiniteNetwork,
                   bool compensate = true);

struct CoveragePoint {
    double gamma_db = 0.0;
    double coverage = 0.0;
};

std::vector<CoveragePoint> coverage_curve(const iopr::IoprCurve& curve, std::span<const double> gamma_grid_db,
                                          bool compensate = true);

std::vector<CoveragePoint> coverage_curve(std::span<const double> gamma_grid_db, const NetworkConfig& cfg,
                                          double r_inf = interference::kInfiniteNetwork, bool compensate = true);

/// P_max = ratio·N0·B_w / mu_G.
double max_bs_power(const NetworkConfig& cfg, const SystemConstants& sys,
                    double r_inf = interference::kInfiniteNetwork);

/// Same, for a precomputed spatial mean interference gain.
double max_bs_power_from_gain(double mu_g, const SystemConstants& sys);

/// P_max·ρ_BS, in W/m².
double power_density(const NetworkConfig& cfg, const SystemConstants& sys,
                     double r_inf = interference::kInfiniteNetwork);

/// Shannon spectral efficiency log2(1 + γ) in bit/s/Hz.
double cell_capacity(double gamma);

/// Largest γ (dB) on [-40, 40] whose cell coverage still meets `target`,
/// resolved by bisection to 0.01 dB. Throws RangeError when unreachable.
double gamma_for_coverage(const iopr::IoprCurve& curve, double target, bool compensate = true);

struct RateDensityPoint {
    double rc = 0.0;
    double cell_density = 0.0;  // cells per m²
    double rate_density = 0.0;  // bit/s/Hz per m²
};

struct RateDensityCurve {
    double coverage_target = 0.0;
    double gamma_db = 0.0;
    double capacity = 0.0;  // C_cell, bit/s/Hz
    std::vector<RateDensityPoint> points;
};

RateDensityCurve rate_density(double coverage_target, std::span<const double> rc_grid, const NetworkConfig& cfg,
                              double r_inf = interference::kInfiniteNetwork, bool compensate = true);

struct CdmaUser {
    double r_b = 0.0;
    double f = 0.0;  // interference-to-own-power ratio
    double h = 0.0;  // inverse serving-cell gain
};

/// Total CDMA base-station power under perfect power control.
///
/// Throws InfeasibleLoadError at or beyond the pole of the power equation.
double cdma_bs_power(std::span<const CdmaUser> users, const SystemConstants& sys);

struct PowerPoint {
    double rc = 0.0;
    double mu_g = 0.0;
    double pmax = 0.0;           // W
    double power_density = 0.0;  // W/m²
};

struct DimensioningResult {
    std::vector<PowerPoint> power;
    std::vector<CoveragePoint> coverage;
    RateDensityCurve rate;
};

std::vector<PowerPoint> power_curve(std::span<const double> rc_grid, const NetworkConfig& cfg,
                                    const SystemConstants& sys, double r_inf = interference::kInfiniteNetwork);

DimensioningResult dimension(const NetworkConfig& cfg, const SystemConstants& sys, std::span<const double> rc_grid,
                             std::span<const double> gamma_grid_db, double coverage_target,
                             double r_inf = interference::kInfiniteNetwork);

}  // namespace dimensioning
}  // namespace bestcell
