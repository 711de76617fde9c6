#include <cmath>
#include <limits>
#include <string>

#include <gtest/gtest.h>

#include "bestcell/errors.hpp"
#include "bestcell/geometry.hpp"
#include "bestcell/interference.hpp"
#include "oracles.hpp"
#include "sim_cache.hpp"

namespace itf = bestcell::interference;
using bestcell::ConvergenceError;
using bestcell::DomainError;
using bestcell::ExecPolicy;
using testing_support::reference_config;

namespace {

double grid_r_inf(double rc) {
    return bestcell::geometry::equivalent_network_radius(bestcell::geometry::build_grid(rc, 3));
}

}  // namespace

TEST(TruncatedQAverage, MatchesBivariateNormalOracle) {
    // ∫_{-∞}^{h} Q(s + t) φ(t) dt = P[T <= h, (T - Z)/√2 <= -s/√2], correlation 1/√2.
    const bestcell::numerics::QuadratureSpec quad;
    for (double s : {-6.0, -1.5, 0.0, 0.7, 3.0}) {
        for (double h : {-3.0, -0.5, 0.0, 1.2, 4.0, 10.0}) {
            const double expected = static_cast<double>(
                oracle::bivariate_normal_cdf(h, -s / std::sqrt(2.0L), 1.0L / std::sqrt(2.0L)));
            EXPECT_NEAR(itf::truncated_q_average(s, h, quad), expected, 1e-10) << "s=" << s << " h=" << h;
        }
    }
}

TEST(TruncatedQAverage, EmptyRangeIsZero) {
    const bestcell::numerics::QuadratureSpec quad;
    EXPECT_EQ(itf::truncated_q_average(0.0, -20.0, quad), 0.0);
}

TEST(NearTerm, CertainAttachmentLimit) {
    // r_b -> 0: untruncated log-normal interference mean at distance 2R_c.
    for (double sigma : {8.0, 12.0}) {
        const auto cfg = reference_config(sigma);
        const double expected =
            cfg.k0 * std::pow(cfg.r0 / (2.0 * cfg.rc), cfg.eta) * std::exp(0.5 * std::pow(cfg.a() * sigma, 2));
        EXPECT_NEAR(itf::ocif_near_term(1e-6, 1, cfg) / expected, 1.0, 1e-6);
        EXPECT_NEAR(itf::ocif_near_term(1e-6, 2, cfg) / expected, 1.0, 1e-6);
    }
}

TEST(NearTerm, LargerShadowingGivesLargerInterference) {
    const auto c8 = reference_config(8.0);
    const auto c12 = reference_config(12.0);
    for (double x : {0.2, 0.6, 1.0, 1.4, 1.8}) {
        for (int j : {1, 2}) {
            EXPECT_GT(itf::ocif_near_term(x * 1000.0, j, c12), itf::ocif_near_term(x * 1000.0, j, c8))
                << "j=" << j << " r/Rc=" << x;
        }
    }
}

TEST(NearTerm, RejectsThirdNeighbour) {
    EXPECT_THROW(itf::ocif_near_term(500.0, 3, reference_config(8.0)), DomainError);
}

TEST(NearTerm, ConvergenceFailureNamesTheIntegral) {
    bestcell::numerics::QuadratureSpec quad;
    quad.max_subdivisions = 1;
    quad.relative_tolerance = 1e-14;
    try {
        itf::ocif_near_term(1000.0, 1, reference_config(8.0), quad);
        FAIL() << "expected ConvergenceError";
    } catch (const ConvergenceError& e) {
        EXPECT_NE(std::string(e.what()).find("first-neighbour OCIF"), std::string::npos) << e.what();
    }
}

TEST(NearTerm, MatchesSimulatedNearestInterferer) {
    const auto cfg = reference_config(8.0);
    const auto& bin = testing_support::reference_sim(8.0).bins[testing_support::kCentreBin];
    const double analytic = testing_support::bin_average(
        [&](double r) { return itf::ocif_near_term(r, 1, cfg); }, bin.r_lo, bin.r_hi, cfg);
    EXPECT_NEAR(analytic / bin.ocif_near1.mean(), 1.0, 0.05);
}

TEST(FarTerm, EmptyRingIsZero) {
    const auto cfg = reference_config(8.0);
    const auto d = bestcell::geometry::nearest_distances(1.0, 1.0);
    EXPECT_EQ(itf::ocif_far_term(1000.0, cfg, d.rd * cfg.rc), 0.0);
    EXPECT_THROW(itf::ocif_far_term(1000.0, cfg, 0.9 * d.rd * cfg.rc), DomainError);
}

TEST(FarTerm, NonDecreasingInOuterRadiusAndConverges) {
    const auto cfg = reference_config(12.0);
    double prev = 0.0;
    for (double r_inf = 2000.0; r_inf < 1e7; r_inf *= 1.5) {
        const double v = itf::ocif_far_term(700.0, cfg, r_inf);
        EXPECT_GE(v, prev);
        prev = v;
    }
    EXPECT_NEAR(prev / itf::ocif_far_term(700.0, cfg), 1.0, 1e-3);
}

TEST(FarTerm, InfiniteRingFactor) {
    // With r_inf = ∞ the ratio of far terms at two r_inf values is the ring-factor ratio.
    const auto cfg = reference_config(8.0);
    const auto d = bestcell::geometry::nearest_distances(1.0, 1.0);
    const double rd = d.rd * cfg.rc;
    const double finite = itf::ocif_far_term(1000.0, cfg, 2.0 * rd);
    EXPECT_NEAR(finite / itf::ocif_far_term(1000.0, cfg), 1.0 - std::pow(2.0, 2.0 - cfg.eta), 1e-12);
}

TEST(FarTerm, DivergentExponentRejected) {
    auto cfg = reference_config(8.0);
    cfg.eta = 2.0;
    EXPECT_THROW(itf::ocif_far_term(1000.0, cfg), DomainError);
}

TEST(Total, TightToSimulatedMeanAtCellRadius) {
    // Infinite fluid tail against the 37-cell simulation: within 15%, not above MC + 2 SE.
    const auto cfg = reference_config(8.0);
    const auto& bin = testing_support::reference_sim(8.0).bins[testing_support::kCentreBin];
    const double analytic = testing_support::bin_average(
        [&](double r) { return itf::ocif_total(r, cfg); }, bin.r_lo, bin.r_hi, cfg);
    const double mc = bin.ocif.mean();
    EXPECT_LE(analytic, mc + 2.0 * bin.ocif.stderr_of_mean());
    EXPECT_NEAR(analytic / mc, 1.0, 0.15);
}

TEST(Total, LowerBoundPerBin) {
    for (double sigma : {8.0, 12.0}) {
        const auto cfg = reference_config(sigma);
        const double r_inf = grid_r_inf(cfg.rc);
        for (const auto& bin : testing_support::reference_sim(sigma).bins) {
            if (bin.attached < 2) continue;
            const double analytic = testing_support::bin_average(
                [&](double r) { return itf::ocif_total(r, cfg, r_inf); }, bin.r_lo, bin.r_hi, cfg);
            EXPECT_LE(analytic, bin.ocif.mean() + 2.0 * bin.ocif.stderr_of_mean())
                << "sigma=" << sigma << " r/Rc=" << bin.centre() / cfg.rc;
        }
    }
}

TEST(Total, GapWidensWithShadowing) {
    double gap[2] = {0.0, 0.0};
    int idx = 0;
    for (double sigma : {8.0, 12.0}) {
        const auto cfg = reference_config(sigma);
        const double r_inf = grid_r_inf(cfg.rc);
        int used = 0;
        for (const auto& bin : testing_support::reference_sim(sigma).bins) {
            if (bin.attached < 1000) continue;
            const double analytic = testing_support::bin_average(
                [&](double r) { return itf::ocif_total(r, cfg, r_inf); }, bin.r_lo, bin.r_hi, cfg);
            gap[idx] += (bin.ocif.mean() - analytic) / bin.ocif.mean();
            ++used;
        }
        gap[idx] /= used;
        ++idx;
    }
    EXPECT_GE(gap[1], gap[0]);
}

TEST(Curve, PointwiseDecompositionAndDensity) {
    const auto cfg = reference_config(8.0);
    const auto c = itf::ocif_spatial_distribution(cfg);
    ASSERT_EQ(c.rb.size(), 400u);
    double integral = 0.0;
    for (std::size_t k = 0; k < c.rb.size(); ++k) {
        EXPECT_EQ(c.total[k], c.g1[k] + c.g2[k] + c.g3plus[k]);
        EXPECT_GE(c.g1[k], 0.0);
        EXPECT_GE(c.g2[k], 0.0);
        EXPECT_GE(c.g3plus[k], 0.0);
        integral += c.density[k] * c.step;
    }
    EXPECT_NEAR(integral / c.mu_g, 1.0, 1e-12);
    EXPECT_TRUE(std::isinf(c.r_inf));
}

TEST(Curve, SerialAndParallelBitEqual) {
    const auto cfg = reference_config(12.0);
    const auto par = itf::ocif_spatial_distribution(cfg, itf::kInfiniteNetwork, 400, {}, ExecPolicy{});
    const auto ser = itf::ocif_spatial_distribution(cfg, itf::kInfiniteNetwork, 400, {}, ExecPolicy::serial());
    EXPECT_EQ(par.total, ser.total);
    EXPECT_EQ(par.density, ser.density);
    EXPECT_EQ(par.mu_g, ser.mu_g);
}

TEST(SpatialMean, InverseCubeScaling) {
    const auto cfg = reference_config(8.0);
    const double g1000 = itf::spatial_mean_gain(cfg);
    EXPECT_NEAR(itf::spatial_mean_gain(cfg.with_rc(2000.0)) / g1000, 0.125, 0.125 * 1e-6);
    for (double rc : {250.0, 600.0, 3000.0}) {
        const double invariant = itf::spatial_mean_gain(cfg.with_rc(rc)) * std::pow(rc, cfg.eta);
        EXPECT_NEAR(invariant / (g1000 * 1e9), 1.0, 1e-6) << "rc=" << rc;
    }
}

TEST(SpatialMean, DecreasesWithCellSize) {
    for (double sigma : {8.0, 12.0}) {
        const auto cfg = reference_config(sigma);
        double prev = std::numeric_limits<double>::infinity();
        for (double rc : {250.0, 500.0, 1000.0, 2000.0}) {
            const double g = itf::spatial_mean_gain(cfg.with_rc(rc));
            EXPECT_LT(g, prev);
            prev = g;
        }
    }
}
