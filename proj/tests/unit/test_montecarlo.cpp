#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "bestcell/errors.hpp"
#include "bestcell/geometry.hpp"
#include "bestcell/montecarlo.hpp"
#include "bestcell/report.hpp"
#include "sim_cache.hpp"

namespace mc = bestcell::montecarlo;
using bestcell::DomainError;
using testing_support::reference_config;

namespace {

mc::SimSpec small_spec(double sigma, std::uint64_t samples = 200000) {
    mc::SimSpec spec;
    spec.cfg = reference_config(sigma);
    spec.samples = samples;
    spec.seed = 2024;
    return spec;
}

void expect_moments_close(const mc::Moments& a, const mc::Moments& b) {
    EXPECT_EQ(a.n, b.n);
    EXPECT_NEAR(a.sum, b.sum, 1e-12 * std::abs(b.sum) + 1e-300);
    EXPECT_NEAR(a.sum_sq, b.sum_sq, 1e-12 * std::abs(b.sum_sq) + 1e-300);
}

}  // namespace

TEST(Simulate, WorkerCountDoesNotChangeResult) {
    auto spec = small_spec(8.0);
    spec.workers = 1;
    const auto one = bestcell::report::to_json(mc::simulate(spec)).dump();
    spec.workers = 8;
    const auto eight = bestcell::report::to_json(mc::simulate(spec)).dump();
    spec.workers = 3;
    const auto three = bestcell::report::to_json(mc::simulate(spec)).dump();
    EXPECT_EQ(one, eight);
    EXPECT_EQ(one, three);
}

TEST(Simulate, SerialReferenceAgrees) {
    const auto spec = small_spec(12.0, 50000);
    const auto par = mc::simulate(spec);
    const auto ser = mc::simulate_serial(spec);
    EXPECT_EQ(par.attached, ser.attached);
    EXPECT_EQ(par.f_hist, ser.f_hist);
    EXPECT_EQ(par.f_below, ser.f_below);
    EXPECT_EQ(par.f_above, ser.f_above);
    expect_moments_close(par.f, ser.f);
    expect_moments_close(par.shadowing, ser.shadowing);
    ASSERT_EQ(par.bins.size(), ser.bins.size());
    for (std::size_t b = 0; b < par.bins.size(); ++b) {
        EXPECT_EQ(par.bins[b].samples, ser.bins[b].samples);
        EXPECT_EQ(par.bins[b].attached, ser.bins[b].attached);
        EXPECT_EQ(par.bins[b].outage, ser.bins[b].outage);
        EXPECT_EQ(par.bins[b].xi_b_p999, ser.bins[b].xi_b_p999);
        expect_moments_close(par.bins[b].own_gain, ser.bins[b].own_gain);
        expect_moments_close(par.bins[b].ocif, ser.bins[b].ocif);
        expect_moments_close(par.bins[b].f, ser.bins[b].f);
    }
}

TEST(Simulate, SeedChangesResult) {
    auto spec = small_spec(8.0, 20000);
    const auto a = mc::simulate(spec);
    spec.seed += 1;
    const auto b = mc::simulate(spec);
    EXPECT_NE(a.f.sum, b.f.sum);
}

TEST(Simulate, FrequenciesAndErrorsWellFormed) {
    const auto& sim = testing_support::reference_sim(8.0);
    EXPECT_EQ(sim.stations, 37u);
    std::uint64_t total = 0;
    for (std::size_t b = 0; b < sim.bins.size(); ++b) {
        const auto& bin = sim.bins[b];
        total += bin.samples;
        const auto p = bin.attach_frequency();
        EXPECT_GE(p.value, 0.0);
        EXPECT_LE(p.value, 1.0);
        if (bin.attached >= 2) {
            EXPECT_GT(bin.f.stderr_of_mean(), 0.0);
            EXPECT_GT(bin.own_gain.stderr_of_mean(), 0.0);
        }
        for (std::size_t g = 0; g < sim.spec.gamma_grid_db.size(); ++g) {
            const auto o = bin.outage_frequency(g);
            EXPECT_GE(o.value, 0.0);
            EXPECT_LE(o.value, 1.0);
        }
    }
    EXPECT_EQ(total, sim.spec.samples);
}

TEST(Simulate, ShadowingIsNormal) {
    const auto& sim = testing_support::reference_sim(8.0);
    const auto& s = sim.shadowing;
    EXPECT_EQ(s.n, sim.spec.samples * 37u);
    EXPECT_NEAR(s.mean(), 0.0, 3.0 * 8.0 / std::sqrt(static_cast<double>(s.n)));
    EXPECT_NEAR(std::sqrt(s.variance()) / 8.0, 1.0, 0.01);
}

TEST(Simulate, NoShadowingAttachesToNearestStation) {
    auto spec = small_spec(0.01, 200000);
    const double rc = spec.cfg.rc;
    const auto sim = mc::simulate(spec);
    for (const auto& bin : sim.bins) {
        if (bin.samples == 0) continue;
        if (bin.r_hi <= rc) EXPECT_EQ(bin.attach_frequency().value, 1.0) << "r/Rc=" << bin.centre() / rc;
        if (bin.r_lo >= 2.0 * rc / std::sqrt(3.0)) {
            EXPECT_EQ(bin.attach_frequency().value, 0.0) << "r/Rc=" << bin.centre() / rc;
        }
    }
}

TEST(Simulate, NoShadowingCoverageFollowsGeometry) {
    // Deterministic SIR over the serving hexagon, area-weighted on a fine lattice.
    auto spec = small_spec(0.01, 400000);
    const auto sim = mc::simulate(spec);
    const auto grid = bestcell::geometry::build_grid(spec.cfg.rc, 3);
    const double eta = spec.cfg.eta;
    std::vector<double> f_values;
    const int n = 400;
    const double h = 2.0 * spec.cfg.rc / n;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double x = -spec.cfg.rc * 2.0 + (2 * i + 1) * h;
            const double y = -spec.cfg.rc * 2.0 + (2 * j + 1) * h;
            if (x * x + y * y >= 4.0 * spec.cfg.rc * spec.cfg.rc) continue;
            double own = 0.0;
            double other = 0.0;
            bool nearest = true;
            const double d0 = std::hypot(x, y);
            for (std::size_t k = 0; k < grid.size(); ++k) {
                const double d = std::hypot(x - grid.positions[k].x, y - grid.positions[k].y);
                if (k == 0) {
                    own = std::pow(d, -eta);
                } else {
                    if (d < d0) nearest = false;
                    other += std::pow(d, -eta);
                }
            }
            if (nearest) f_values.push_back(other / own);
        }
    }
    const std::vector<double> gammas{-10.0, -5.0, 0.0, 5.0, 10.0, 15.0};
    const auto cov = mc::empirical_coverage(sim, gammas);
    for (std::size_t g = 0; g < gammas.size(); ++g) {
        const double limit = std::pow(10.0, -gammas[g] / 10.0);
        std::size_t ok = 0;
        for (double f : f_values) ok += f <= limit;
        const double expected = static_cast<double>(ok) / static_cast<double>(f_values.size());
        EXPECT_NEAR(cov[g].coverage, expected, 3.0 * cov[g].std_error + 0.01) << "gamma=" << gammas[g];
    }
}

TEST(Simulate, AttachedDensityIntegratesToOne) {
    const auto& sim = testing_support::reference_sim(12.0);
    double total = 0.0;
    for (std::size_t b = 0; b < sim.bins.size(); ++b) total += sim.attached_density(b).value * sim.bin_width();
    EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(EmpiricalCoverage, MonotoneWithLimits) {
    const auto& sim = testing_support::reference_sim(8.0);
    std::vector<double> gammas;
    for (double g = -60.0; g <= 60.0; g += 0.25) gammas.push_back(g);
    const auto cov = mc::empirical_coverage(sim, gammas);
    for (std::size_t i = 1; i < cov.size(); ++i) EXPECT_LE(cov[i].coverage, cov[i - 1].coverage);
    EXPECT_EQ(cov.front().coverage, 1.0);
    EXPECT_LT(cov.back().coverage, 1e-3);
}

TEST(EmpiricalCoverage, MatchesDirectOutageCounts) {
    // Thresholds on the 0.01 dB lattice are exact; compare with the per-bin outage tallies.
    const auto& sim = testing_support::reference_sim(8.0);
    const auto cov = mc::empirical_coverage(sim, sim.spec.gamma_grid_db);
    for (std::size_t g = 0; g < cov.size(); ++g) {
        std::uint64_t out = 0;
        for (const auto& bin : sim.bins) out += bin.outage[g];
        EXPECT_NEAR(cov[g].coverage, 1.0 - static_cast<double>(out) / static_cast<double>(sim.attached), 1e-12);
    }
}

TEST(EmpiricalCoverage, LargerShadowingDoesNotHurt) {
    const std::vector<double> gammas{-5.0, 0.0, 5.0};
    const auto c8 = mc::empirical_coverage(testing_support::reference_sim(8.0), gammas);
    const auto c12 = mc::empirical_coverage(testing_support::reference_sim(12.0), gammas);
    for (std::size_t i = 0; i < gammas.size(); ++i) {
        EXPECT_GE(c12[i].coverage, c8[i].coverage - 0.02) << "gamma=" << gammas[i];
    }
}

TEST(SimSpec, Validation) {
    mc::SimSpec spec;
    EXPECT_NO_THROW(spec.validate());
    auto bad = spec;
    bad.samples = 0;
    EXPECT_THROW(bad.validate(), DomainError);
    bad = spec;
    bad.bins = 0;
    EXPECT_THROW(bad.validate(), DomainError);
    bad = spec;
    bad.tiers = 0;
    EXPECT_THROW(bad.validate(), DomainError);
    bad = spec;
    bad.workers = -1;
    EXPECT_THROW(bad.validate(), DomainError);
    bad = spec;
    bad.cfg.sigma_db = -1.0;
    EXPECT_THROW(mc::simulate(bad), DomainError);
}

TEST(Moments, Basics) {
    mc::Moments m;
    EXPECT_EQ(m.mean(), 0.0);
    EXPECT_EQ(m.variance(), 0.0);
    for (double v : {1.0, 2.0, 3.0, 4.0}) m.add(v);
    EXPECT_DOUBLE_EQ(m.mean(), 2.5);
    EXPECT_DOUBLE_EQ(m.variance(), 5.0 / 3.0);
    EXPECT_DOUBLE_EQ(m.stderr_of_mean(), std::sqrt(5.0 / 3.0 / 4.0));
    mc::Moments other;
    other.add(10.0);
    m.merge(other);
    EXPECT_EQ(m.n, 5u);
    EXPECT_DOUBLE_EQ(m.mean(), 4.0);
}
