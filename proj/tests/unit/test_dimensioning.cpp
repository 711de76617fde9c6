#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "bestcell/dimensioning.hpp"
#include "bestcell/errors.hpp"
#include "bestcell/geometry.hpp"
#include "oracles.hpp"
#include "sim_cache.hpp"

namespace dim = bestcell::dimensioning;
using bestcell::ConvergenceError;
using bestcell::DomainError;
using bestcell::InfeasibleLoadError;
using bestcell::RangeError;
using bestcell::SystemConstants;
using testing_support::reference_config;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

std::vector<double> db_grid(double lo, double hi, double step) {
    std::vector<double> out;
    for (double g = lo; g <= hi + 1e-9; g += step) out.push_back(g);
    return out;
}

}  // namespace

TEST(SystemConstants, NoisePower) {
    SystemConstants sys;
    EXPECT_NEAR(sys.noise_power(), 2e-14, 1e-28);
    EXPECT_NEAR(sys.subcarrier_noise() * sys.subcarriers, sys.noise_power(), 1e-28);
    EXPECT_NO_THROW(sys.validate());
    sys.orthogonality = 1.5;
    EXPECT_THROW(sys.validate(), DomainError);
}

TEST(MaxPower, DefinitionClosure) {
    const auto cfg = reference_config(8.0);
    const SystemConstants sys;
    const double mu_g = bestcell::interference::spatial_mean_gain(cfg);
    const double pmax = dim::max_bs_power(cfg, sys);
    EXPECT_NEAR(pmax * mu_g / (sys.interference_ratio * sys.noise_power()), 1.0, 1e-14);
}

TEST(MaxPower, ZeroRatioGivesZero) {
    SystemConstants sys;
    sys.interference_ratio = 0.0;
    EXPECT_EQ(dim::max_bs_power(reference_config(8.0), sys), 0.0);
    EXPECT_THROW(dim::max_bs_power_from_gain(0.0, sys), DomainError);
}

TEST(MaxPower, CubicScaling) {
    const auto cfg = reference_config(8.0);
    const SystemConstants sys;
    for (double rc : {250.0, 700.0, 1000.0}) {
        const double r = dim::max_bs_power(cfg.with_rc(2.0 * rc), sys) / dim::max_bs_power(cfg.with_rc(rc), sys);
        EXPECT_NEAR(r, 8.0, 8.0 * 1e-6) << "rc=" << rc;
    }
}

TEST(MaxPower, MonotoneInCellSize) {
    const auto cfg = reference_config(8.0);
    const SystemConstants sys;
    const std::vector<double> rcs{50.0, 125.0, 250.0, 500.0, 1000.0, 2000.0};
    const auto curve = dim::power_curve(rcs, cfg, sys);
    for (std::size_t i = 1; i < curve.size(); ++i) {
        EXPECT_GT(curve[i].pmax, curve[i - 1].pmax);
        EXPECT_GT(curve[i].power_density, curve[i - 1].power_density);
    }
}

TEST(PowerDensity, Scaling) {
    const auto cfg = reference_config(8.0);
    const SystemConstants sys;
    const double r = dim::power_density(cfg.with_rc(1000.0), sys) / dim::power_density(cfg.with_rc(500.0), sys);
    EXPECT_NEAR(r, 2.0, 2.0 * 1e-6);
    EXPECT_NEAR(dim::power_density(cfg, sys),
                dim::max_bs_power(cfg, sys) * bestcell::geometry::bs_density(cfg.rc), 1e-20);
}

TEST(PowerDensity, NearlyScaleFreeAsExponentApproachesTwo) {
    auto cfg = reference_config(8.0);
    cfg.eta = 2.01;
    const SystemConstants sys;
    // Finite ring: the fluid tail diverges as eta -> 2 with r_inf = ∞.
    const double r_inf = 1e6;
    const double r = dim::power_density(cfg.with_rc(1000.0), sys, r_inf * 2.0) /
                     dim::power_density(cfg.with_rc(500.0), sys, r_inf);
    EXPECT_NEAR(r, 1.0, 0.01);
}

TEST(Fit, Cases) {
    const auto unit = dim::fit_lognormal(1.0, 0.0);
    EXPECT_EQ(unit.mu, 0.0);
    EXPECT_EQ(unit.sigma, 0.0);
    const auto f = dim::fit_lognormal(2.0, 4.0);
    EXPECT_NEAR(f.mu, 0.34657359027997264, 1e-15);
    EXPECT_NEAR(f.sigma, 0.8325546111576977, 1e-15);
    const auto c = dim::fit_lognormal(2.0, 4.0, true);
    EXPECT_TRUE(c.compensated);
    EXPECT_DOUBLE_EQ(c.sigma, std::sqrt(2.0) * f.sigma);
    EXPECT_EQ(c.mu, f.mu);
    EXPECT_THROW(dim::fit_lognormal(0.0, 1.0), DomainError);
    EXPECT_THROW(dim::fit_lognormal(-1.0, 1.0), DomainError);
}

TEST(Fit, MomentRoundTrip) {
    for (double m = 1e-3; m <= 1e3; m *= 3.1) {
        for (double ratio : {0.0, 1e-6, 0.01, 0.5, 1.0, 7.0, 100.0}) {
            const double v = ratio * m * m;
            const auto f = dim::fit_lognormal(m, v);
            const double s2 = f.sigma * f.sigma;
            EXPECT_LE(rel(std::exp(f.mu + 0.5 * s2), m), 1e-12);
            if (v > 0.0) EXPECT_LE(rel(std::expm1(s2) * std::exp(2.0 * f.mu + s2), v), 1e-12);
        }
    }
}

TEST(Outage, DegenerateFitIsAStep) {
    EXPECT_EQ(dim::outage_from_moments(2.0, 0.0, 0.5), 0.5);
    EXPECT_EQ(dim::outage_from_moments(2.0, 0.0, 0.4), 0.0);
    EXPECT_EQ(dim::outage_from_moments(2.0, 0.0, 0.6), 1.0);
}

TEST(Outage, MatchesOracleQ) {
    const auto f = dim::fit_lognormal(0.5, 0.3, true);
    for (double gamma : {0.1, 1.0, 4.0}) {
        const double expected = static_cast<double>(oracle::q((-std::log(gamma) - f.mu) / f.sigma));
        EXPECT_NEAR(dim::outage_from_moments(0.5, 0.3, gamma), expected, 1e-14);
    }
}

TEST(Outage, ErrorsOnBadInput) {
    EXPECT_THROW(dim::outage_from_moments(1.0, -1e-9, 1.0), ConvergenceError);
    EXPECT_THROW(dim::outage_from_moments(1.0, 0.1, 0.0), DomainError);
}

TEST(Outage, MatchesSimulatedBinAtZeroDb) {
    const auto cfg = reference_config(8.0);
    const auto& sim = testing_support::reference_sim(8.0);
    const auto& grid = sim.spec.gamma_grid_db;
    const auto idx = static_cast<std::size_t>(std::find(grid.begin(), grid.end(), 0.0) - grid.begin());
    ASSERT_LT(idx, grid.size());
    const auto& bin = sim.bins[testing_support::kCentreBin];
    const double r_inf = bestcell::geometry::equivalent_network_radius(bestcell::geometry::build_grid(cfg.rc, 3));
    const double analytic = testing_support::bin_average(
        [&](double r) { return dim::outage_at(r, 1.0, cfg, r_inf); }, bin.r_lo, bin.r_hi, cfg);
    EXPECT_NEAR(analytic, bin.outage_frequency(idx).value, 0.05);
}

TEST(CellOutage, VanishingThreshold) {
    EXPECT_LT(dim::cell_outage(1e-8, reference_config(8.0)), 1e-6);
}

TEST(CellOutage, IndependentOfCellSizeAndReferenceGain) {
    const auto cfg = reference_config(8.0);
    auto other = cfg.with_rc(250.0);
    other.k0 = 3.0;
    other.r0 = 10.0;
    for (double g : {0.1, 1.0, 10.0}) {
        EXPECT_NEAR(dim::cell_outage(g, cfg), dim::cell_outage(g, cfg.with_rc(250.0)), 1e-6);
        EXPECT_NEAR(dim::cell_outage(g, cfg), dim::cell_outage(g, other), 1e-6);
        EXPECT_EQ(dim::cell_outage(g, cfg.with_rc(500.0)), dim::cell_outage(g, cfg));
    }
}

TEST(Coverage, MonotoneBoundedWithTailLimits) {
    for (double sigma : {8.0, 12.0}) {
        const auto grid = db_grid(-40.0, 40.0, 0.5);
        const auto cov = dim::coverage_curve(grid, reference_config(sigma));
        ASSERT_EQ(cov.size(), grid.size());
        for (std::size_t i = 0; i < cov.size(); ++i) {
            EXPECT_GE(cov[i].coverage, 0.0);
            EXPECT_LE(cov[i].coverage, 1.0);
            if (i) EXPECT_LE(cov[i].coverage, cov[i - 1].coverage);
        }
        EXPECT_GT(cov.front().coverage, 0.99);
        EXPECT_LT(cov.back().coverage, 0.01);
    }
    EXPECT_THROW(dim::coverage_curve(std::vector<double>{}, reference_config(8.0)), DomainError);
}

TEST(Coverage, LargerShadowingDoesNotHurtCoverage) {
    const auto grid = db_grid(-5.0, 10.0, 1.0);
    const auto c8 = dim::coverage_curve(grid, reference_config(8.0));
    const auto c12 = dim::coverage_curve(grid, reference_config(12.0));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        EXPECT_GE(c12[i].coverage, c8[i].coverage - 0.02) << "gamma=" << grid[i];
    }
}

TEST(RateDensity, CapacityAndScaling) {
    EXPECT_EQ(dim::cell_capacity(1.0), 1.0);
    const auto cfg = reference_config(8.0);
    const std::vector<double> rcs{250.0, 500.0, 1000.0, 2000.0};
    const auto rd = dim::rate_density(0.9, rcs, cfg);
    ASSERT_EQ(rd.points.size(), rcs.size());
    EXPECT_NEAR(rd.capacity, std::log2(1.0 + std::pow(10.0, rd.gamma_db / 10.0)), 1e-15);
    for (const auto& p : rd.points) {
        EXPECT_NEAR(p.rate_density * p.rc * p.rc / (rd.points[0].rate_density * 250.0 * 250.0), 1.0, 1e-6);
        EXPECT_EQ(p.rate_density, rd.capacity * p.cell_density);
    }
    const auto at_other = dim::rate_density(0.9, rcs, cfg.with_rc(3000.0));
    EXPECT_NEAR(at_other.gamma_db, rd.gamma_db, 0.01);
}

TEST(RateDensity, TargetNearOneForcesSmallCapacity) {
    const auto cfg = reference_config(8.0);
    const std::vector<double> rcs{1000.0};
    const auto loose = dim::rate_density(0.5, rcs, cfg);
    const auto tight = dim::rate_density(0.999, rcs, cfg);
    EXPECT_LT(tight.capacity, loose.capacity);
    EXPECT_LT(tight.capacity, 0.05);
}

TEST(RateDensity, Errors) {
    const auto cfg = reference_config(8.0);
    const std::vector<double> rcs{1000.0};
    EXPECT_THROW(dim::rate_density(1.0, rcs, cfg), DomainError);
    EXPECT_THROW(dim::rate_density(0.0, rcs, cfg), DomainError);
    EXPECT_THROW(dim::rate_density(1.0 - 1e-15, rcs, cfg), RangeError);
}

TEST(Cdma, NoUsersReturnsControlPower) {
    SystemConstants sys;
    sys.common_control_power = 1.7;
    EXPECT_EQ(dim::cdma_bs_power({}, sys), 1.7);
}

TEST(Cdma, SingleUserExample) {
    SystemConstants sys;
    sys.orthogonality = 0.0;
    sys.sinr_target = 0.1;
    sys.awgn_power = 2e-14;
    sys.common_control_power = 1.0;
    const std::vector<dim::CdmaUser> users{{500.0, 1.0, 1e10}};
    EXPECT_NEAR(dim::cdma_bs_power(users, sys), (1.0 + 2e-5) / 0.9, 1e-14);
}

TEST(Cdma, PoleIsInfeasible) {
    SystemConstants sys;
    sys.sinr_target = 0.1;
    sys.orthogonality = 0.0;
    const std::vector<dim::CdmaUser> at_pole(4, {500.0, 2.5, 1e9});
    EXPECT_THROW(dim::cdma_bs_power(at_pole, sys), InfeasibleLoadError);
    const std::vector<dim::CdmaUser> near_pole(4, {500.0, 2.4999, 1e9});
    EXPECT_GT(dim::cdma_bs_power(near_pole, sys), 1e4);
    sys.sinr_target = 1.0;
    sys.orthogonality = 0.5;
    const std::vector<dim::CdmaUser> orthogonal(3, {500.0, 0.0, 1e9});
    EXPECT_THROW(dim::cdma_bs_power(orthogonal, sys), InfeasibleLoadError);
}

TEST(Dimension, BundlesTheCurves) {
    const auto cfg = reference_config(8.0);
    const SystemConstants sys;
    const std::vector<double> rcs{250.0, 1000.0};
    const auto grid = db_grid(-10.0, 20.0, 1.0);
    const auto r = dim::dimension(cfg, sys, rcs, grid, 0.9);
    EXPECT_EQ(r.power.size(), 2u);
    EXPECT_EQ(r.coverage.size(), grid.size());
    EXPECT_EQ(r.rate.gamma_db, dim::rate_density(0.9, rcs, cfg).gamma_db);
}
