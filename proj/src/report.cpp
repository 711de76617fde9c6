#include "bestcell/report.hpp"

#include <cmath>
#include <cstdio>

namespace bestcell::report {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

nlohmann::json to_json(const NetworkConfig& cfg) {
    return {{"eta", cfg.eta},
            {"sigma_db", cfg.sigma_db},
            {"k0", cfg.k0},
            {"r0", cfg.r0},
            {"rc", cfg.rc},
            {"marginal_terms", cfg.terms()}};
}

nlohmann::json to_json(const SystemConstants& sys) {
    return {{"noise_density", sys.noise_density},
            {"bandwidth", sys.bandwidth},
            {"interference_ratio", sys.interference_ratio},
            {"subcarriers", sys.subcarriers},
            {"sinr_target", sys.sinr_target},
            {"orthogonality", sys.orthogonality},
            {"awgn_power", sys.awgn_power},
            {"common_control_power", sys.common_control_power}};
}

nlohmann::json to_json(const montecarlo::SimSpec& spec) {
    return {{"network", to_json(spec.cfg)}, {"tiers", spec.tiers},   {"samples", spec.samples},
            {"seed", spec.seed},            {"bins", spec.bins},     {"gamma_grid_db", spec.gamma_grid_db}};
}

nlohmann::json to_json(const montecarlo::Moments& m) {
    return {{"n", m.n}, {"sum", m.sum}, {"sum_sq", m.sum_sq}};
}

nlohmann::json to_json(const montecarlo::SimResult& result) {
    nlohmann::json bins = nlohmann::json::array();
    for (const auto& b : result.bins) {
        bins.push_back({{"r_lo", b.r_lo},
                        {"r_hi", b.r_hi},
                        {"samples", b.samples},
                        {"attached", b.attached},
                        {"own_gain", to_json(b.own_gain)},
                        {"ocif", to_json(b.ocif)},
                        {"ocif_near1", to_json(b.ocif_near1)},
                        {"ocif_near2", to_json(b.ocif_near2)},
                        {"ocif_far", to_json(b.ocif_far)},
                        {"f", to_json(b.f)},
                        {"f_sq", to_json(b.f_sq)},
                        {"f_near1", to_json(b.f_near1)},
                        {"f_near2", to_json(b.f_near2)},
                        {"f_far", to_json(b.f_far)},
                        {"outage", b.outage},
                        {"xi_b_p999", b.xi_b_p999}});
    }
    return {{"spec", to_json(result.spec)},
            {"stations", result.stations},
            {"attached", result.attached},
            {"f", to_json(result.f)},
            {"f_sq", to_json(result.f_sq)},
            {"shadowing", to_json(result.shadowing)},
            {"f_hist_lo_db", result.f_hist_lo_db},
            {"f_hist_step_db", result.f_hist_step_db},
            {"f_below", result.f_below},
            {"f_above", result.f_above},
            {"f_hist", result.f_hist},
            {"bins", bins}};
}

}  // namespace bestcell::report
