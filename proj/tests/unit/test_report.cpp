#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include <gtest/gtest.h>

#include "bestcell/report.hpp"

namespace rp = bestcell::report;

TEST(FormatDouble, RoundTripsExactly) {
    for (double v : {0.1, 1.0 / 3.0, 2e-14, 6.387e3, -1.5e-300, 123456789.0, 5e-324}) {
        const auto text = rp::format_double(v);
        EXPECT_EQ(std::strtod(text.c_str(), nullptr), v) << text;
    }
}

TEST(FormatDouble, SpecialValues) {
    EXPECT_EQ(rp::format_double(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(rp::format_double(-std::numeric_limits<double>::infinity()), "-inf");
    EXPECT_EQ(rp::format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
    EXPECT_EQ(rp::format_double(0.25), "0.25");
}

TEST(Json, ConfigCarriesResolvedTerms) {
    bestcell::NetworkConfig cfg;
    cfg.sigma_db = 12.0;
    const auto j = rp::to_json(cfg);
    EXPECT_EQ(j.at("marginal_terms"), 3);
    EXPECT_EQ(j.at("sigma_db"), 12.0);
    EXPECT_EQ(rp::to_json(bestcell::SystemConstants{}).at("bandwidth"), 5e6);
}

TEST(Json, SimResultStructure) {
    bestcell::montecarlo::SimSpec spec;
    spec.samples = 5000;
    spec.bins = 4;
    spec.workers = 2;
    const auto sim = bestcell::montecarlo::simulate(spec);
    const auto j = rp::to_json(sim);
    EXPECT_EQ(j.at("bins").size(), 4u);
    EXPECT_EQ(j.at("stations"), 37);
    EXPECT_EQ(j.at("spec").at("samples"), 5000);
    EXPECT_FALSE(j.at("spec").contains("workers"));
    EXPECT_EQ(j.at("f_hist").size(), sim.f_hist.size());
    EXPECT_EQ(j.at("bins")[0].at("outage").size(), spec.gamma_grid_db.size());
}
