#include "bestcell/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>

#include "bestcell/dimensioning.hpp"
#include "bestcell/errors.hpp"
#include "bestcell/geometry.hpp"
#include "bestcell/interference.hpp"
#include "bestcell/iopr.hpp"
#include "bestcell/montecarlo.hpp"
#include "bestcell/numerics.hpp"
#include "bestcell/report.hpp"

namespace bestcell::verification {

namespace {

constexpr double kRc = 1000.0;
constexpr std::size_t kPoints = 400;

std::string printf_string(const char* fmt, ...) {
    char buf[1024];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    return buf;
}

NetworkConfig config(double sigma_db, double rc = kRc) {
    NetworkConfig cfg;
    cfg.eta = 3.0;
    cfg.sigma_db = sigma_db;
    cfg.rc = rc;
    return cfg;
}

double rel_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// Outer radius of the fluid ring that matches the simulated lattice's area.
double lattice_r_inf(double rc) { return geometry::equivalent_network_radius(geometry::build_grid(rc, 3)); }

// Mean of the analytic grid values whose r_b falls inside [lo, hi).
double bin_average(const std::vector<double>& rb, const std::vector<double>& values, double lo, double hi) {
    double sum = 0.0;
    int count = 0;
    for (std::size_t k = 0; k < rb.size(); ++k) {
        if (rb[k] >= lo && rb[k] < hi) {
            sum += values[k];
            ++count;
        }
    }
    return count ? sum / count : 0.0;
}

class Context {
public:
    explicit Context(const Options& options) : options_(options) {}

    const montecarlo::SimResult& sim(double sigma_db) {
        auto& slot = sims_[sigma_db];
        if (!slot) {
            montecarlo::SimSpec spec;
            spec.cfg = config(sigma_db);
            spec.samples = options_.samples;
            spec.seed = options_.seed;
            spec.workers = options_.workers;
            slot = std::make_unique<montecarlo::SimResult>(montecarlo::simulate(spec));
        }
        return *slot;
    }

    const Options& options() const { return options_; }

private:
    Options options_;
    std::map<double, std::unique_ptr<montecarlo::SimResult>> sims_;
};

CriterionResult attachment_agreement(Context& ctx) {
    CriterionResult out{1, "attachment probability vs simulation", true, {}};
    for (double sigma : {8.0, 12.0}) {
        const auto cfg = config(sigma);
        const auto& sim = ctx.sim(sigma);
        double worst = 0.0;
        double worst_at = 0.0;
        for (const auto& bin : sim.bins) {
            if (bin.r_lo < 0.1 * kRc - 1e-9 || bin.r_hi > 1.9 * kRc + 1e-9) continue;
            // Mobiles are uniform in area, so weight the analytic curve by r across the bin.
            double num = 0.0;
            double den = 0.0;
            constexpr int kSub = 16;
            for (int i = 0; i < kSub; ++i) {
                const double r = bin.r_lo + (i + 0.5) * (bin.r_hi - bin.r_lo) / kSub;
                num += r * attachment::attach_probability(r, cfg);
                den += r;
            }
            const double dev = std::abs(num / den - bin.attach_frequency().value);
            if (dev > worst) {
                worst = dev;
                worst_at = bin.centre() / kRc;
            }
        }
        if (!(worst <= 0.03)) out.passed = false;
        out.detail += printf_string("%ssigma=%g max|dev|=%.4f at r/Rc=%.3f (limit 0.03)", out.detail.empty() ? "" : "; ",
                                    sigma, worst, worst_at);
    }
    return out;
}

CriterionResult scale_invariance(Context&) {
    CriterionResult out{2, "cell-size invariance", true, {}};
    const auto gamma_grid = montecarlo::SimSpec::default_gamma_grid();
    struct Snapshot {
        std::vector<double> values;
    };
    auto snapshot = [&](double rc) {
        const auto cfg = config(8.0, rc);
        Snapshot s;
        for (double r : attachment::rb_grid(rc, kPoints)) s.values.push_back(attachment::attach_probability(r, cfg));
        const auto curve = iopr::iopr_spatial_stats(cfg);
        s.values.insert(s.values.end(), curve.mean.begin(), curve.mean.end());
        s.values.insert(s.values.end(), curve.second.begin(), curve.second.end());
        s.values.push_back(curve.mu_f);
        s.values.push_back(curve.var_f);
        s.values.push_back(dimensioning::cell_outage(curve, 1.0));
        for (const auto& p : dimensioning::coverage_curve(curve, gamma_grid)) s.values.push_back(p.coverage);
        return s;
    };
    const auto reference = snapshot(1000.0);
    double worst = 0.0;
    for (double rc : {250.0, 4000.0}) {
        const auto other = snapshot(rc);
        for (std::size_t i = 0; i < reference.values.size(); ++i) {
            worst = std::max(worst, rel_diff(reference.values[i], other.values[i]));
        }
    }
    out.passed = worst <= 1e-6;
    out.detail = printf_string("%zu quantities, max relative difference %.3e over Rc {250,1000,4000} (limit 1e-6)",
                               reference.values.size(), worst);
    return out;
}

CriterionResult ocif_lower_bound(Context& ctx) {
    CriterionResult out{3, "interference gain lower bound", true, {}};
    for (double sigma : {8.0, 12.0}) {
        const auto cfg = config(sigma);
        const auto& sim = ctx.sim(sigma);
        const auto curve = interference::ocif_spatial_distribution(cfg, lattice_r_inf(kRc), kPoints);
        int violations = 0;
        double gap_sum = 0.0;
        for (std::size_t b = 0; b < sim.bins.size(); ++b) {
            const auto& bin = sim.bins[b];
            const double analytic = bin_average(curve.rb, curve.density, bin.r_lo, bin.r_hi);
            const auto simulated = sim.weighted_density(b, bin.ocif);
            if (analytic > simulated.value + 2.0 * simulated.std_error) ++violations;
            gap_sum += (simulated.value - analytic) / simulated.value;
        }
        const double mean_gap = gap_sum / static_cast<double>(sim.bins.size());
        if (violations > 0) out.passed = false;
        if (sigma == 8.0 && !(mean_gap <= 0.2)) out.passed = false;
        out.detail += printf_string("%ssigma=%g bins above sim+2se: %d/%zu, mean relative gap %.4f%s",
                                    out.detail.empty() ? "" : "; ", sigma, violations, sim.bins.size(), mean_gap,
                                    sigma == 8.0 ? " (limit 0.2)" : "");
    }
    return out;
}

CriterionResult ocif_trends(Context&) {
    CriterionResult out{4, "interference gain trends", true, {}};
    const std::vector<double> rcs{250.0, 500.0, 1000.0, 2000.0};
    std::vector<double> mu8;
    std::vector<double> mu12;
    for (double rc : rcs) {
        mu8.push_back(interference::spatial_mean_gain(config(8.0, rc)));
        mu12.push_back(interference::spatial_mean_gain(config(12.0, rc)));
    }
    bool decreasing = true;
    bool ordered = true;
    for (std::size_t i = 0; i < rcs.size(); ++i) {
        if (i > 0 && !(mu8[i] < mu8[i - 1] && mu12[i] < mu12[i - 1])) decreasing = false;
        if (!(mu12[i] > mu8[i])) ordered = false;
    }
    out.passed = decreasing && ordered;
    out.detail = printf_string("mu_G(sigma=8) %.4e..%.4e strictly decreasing: %s; mu_G(12)>mu_G(8) at every Rc: %s",
                               mu8.front(), mu8.back(), decreasing ? "yes" : "no", ordered ? "yes" : "no");
    return out;
}

CriterionResult iopr_moments(Context& ctx) {
    CriterionResult out{5, "interference-to-own-power moments", true, {}};
    struct Peaks {
        double mean_an = 0, mean_mc = 0, second_an = 0, second_mc = 0;
    };
    auto peaks = [&](double sigma) {
        const auto& sim = ctx.sim(sigma);
        const auto curve = iopr::iopr_spatial_stats(config(sigma), lattice_r_inf(kRc), kPoints);
        Peaks p;
        for (std::size_t b = 0; b < sim.bins.size(); ++b) {
            const auto& bin = sim.bins[b];
            p.mean_an = std::max(p.mean_an, bin_average(curve.rb, curve.mean_density, bin.r_lo, bin.r_hi));
            p.second_an = std::max(p.second_an, bin_average(curve.rb, curve.second_density, bin.r_lo, bin.r_hi));
            p.mean_mc = std::max(p.mean_mc, sim.weighted_density(b, bin.f).value);
            p.second_mc = std::max(p.second_mc, sim.weighted_density(b, bin.f_sq).value);
        }
        return p;
    };
    const auto p8 = peaks(8.0);
    const auto p12 = peaks(12.0);
    const double mean_ratio = p8.mean_an / p8.mean_mc;
    const double second_ratio = p8.second_an / p8.second_mc;
    const bool flatter = p12.mean_an < p8.mean_an && p12.second_an < p8.second_an;
    out.passed = std::abs(mean_ratio - 1.0) <= 0.10 && std::abs(second_ratio - 1.0) <= 0.20 && flatter;
    out.detail = printf_string(
        "sigma=8 peak ratio analytic/sim: mean %.4f (limit 10%%), second %.4f (limit 20%%); "
        "sigma=12 peaks below sigma=8: %s (mean %.4e < %.4e, second %.4e < %.4e)",
        mean_ratio, second_ratio, flatter ? "yes" : "no", p12.mean_an, p8.mean_an, p12.second_an, p8.second_an);
    return out;
}

CriterionResult coverage(Context& ctx) {
    CriterionResult out{6, "coverage vs simulation", true, {}};
    std::vector<double> grid;
    for (int g = -10; g <= 20; ++g) grid.push_back(g);
    const double r_inf = lattice_r_inf(kRc);
    const auto an8 = dimensioning::coverage_curve(iopr::iopr_spatial_stats(config(8.0), r_inf, kPoints), grid);
    const auto an12 = dimensioning::coverage_curve(iopr::iopr_spatial_stats(config(12.0), r_inf, kPoints), grid);
    const auto& sim8 = ctx.sim(8.0);
    const auto mc8 = montecarlo::empirical_coverage(sim8, grid);
    const auto mc12 = montecarlo::empirical_coverage(ctx.sim(12.0), grid);

    double worst = 0.0;
    double worst_at = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double dev = std::abs(an8[i].coverage - mc8[i].coverage);
        if (dev > worst) {
            worst = dev;
            worst_at = grid[i];
        }
    }
    bool ordered = true;
    for (double g : {-5.0, 0.0, 5.0}) {
        const auto i = static_cast<std::size_t>(g + 10.0);
        if (!(an12[i].coverage >= an8[i].coverage - 0.02)) ordered = false;
        if (!(mc12[i].coverage >= mc8[i].coverage - 0.02)) ordered = false;
    }
    const bool enough = sim8.attached >= 100'000;
    out.passed = worst <= 0.05 && ordered && enough;
    out.detail = printf_string(
        "sigma=8 max|analytic-sim|=%.4f at %g dB (limit 0.05, %llu attached samples); "
        "sigma=12 >= sigma=8 - 0.02 at -5/0/5 dB: %s",
        worst, worst_at, static_cast<unsigned long long>(sim8.attached), ordered ? "yes" : "no");
    if (!enough) out.detail += "; fewer than 1e5 attached samples";
    return out;
}

CriterionResult pmax_scaling(Context&) {
    CriterionResult out{7, "maximum power scaling", true, {}};
    const std::vector<double> rcs{125.0, 250.0, 500.0, 1000.0, 2000.0};
    const auto points = dimensioning::power_curve(rcs, config(8.0), SystemConstants{});
    double worst_p = 0.0;
    double worst_d = 0.0;
    bool monotone = true;
    for (std::size_t i = 1; i < points.size(); ++i) {
        worst_p = std::max(worst_p, rel_diff(points[i].pmax / points[i - 1].pmax, 8.0));
        worst_d = std::max(worst_d, rel_diff(points[i].power_density / points[i - 1].power_density, 2.0));
        if (!(points[i].pmax > points[i - 1].pmax && points[i].power_density > points[i - 1].power_density)) {
            monotone = false;
        }
    }
    out.passed = worst_p <= 1e-6 && worst_d <= 1e-6 && monotone;
    out.detail = printf_string("P_max doubling ratio error %.3e, power density ratio error %.3e (limit 1e-6); "
                               "monotone increasing: %s",
                               worst_p, worst_d, monotone ? "yes" : "no");
    return out;
}

CriterionResult rate_density(Context&) {
    CriterionResult out{8, "rate density mapping", true, {}};
    constexpr double kTarget = 0.9;
    const std::vector<double> rcs{250.0, 500.0, 1000.0, 2000.0, 4000.0};
    double gamma_lo = std::numeric_limits<double>::infinity();
    double gamma_hi = -gamma_lo;
    double cap_dev = 0.0;
    double scale_dev = 0.0;
    std::optional<double> capacity;
    for (double rc : rcs) {
        const auto curve = dimensioning::rate_density(kTarget, rcs, config(8.0, rc));
        gamma_lo = std::min(gamma_lo, curve.gamma_db);
        gamma_hi = std::max(gamma_hi, curve.gamma_db);
        if (!capacity) capacity = curve.capacity;
        cap_dev = std::max(cap_dev, rel_diff(*capacity, curve.capacity));
        const double ref = curve.points.front().rate_density * rcs.front() * rcs.front();
        for (std::size_t i = 0; i < rcs.size(); ++i) {
            scale_dev = std::max(scale_dev, rel_diff(curve.points[i].rate_density * rcs[i] * rcs[i], ref));
        }
    }
    out.passed = gamma_hi - gamma_lo <= 0.01 && cap_dev <= 1e-6 && scale_dev <= 1e-6;
    out.detail = printf_string("gamma* at %.0f%% coverage %.2f dB, spread %.3f dB (limit 0.01); capacity spread %.3e; "
                               "Rc^-2 scaling error %.3e (limit 1e-6)",
                               kTarget * 100.0, gamma_lo, gamma_hi - gamma_lo, cap_dev, scale_dev);
    return out;
}

CriterionResult identities(Context&) {
    CriterionResult out{9, "numeric identities", true, {}};
    double roundtrip = 0.0;
    for (int i = -600; i <= 600; ++i) {
        const double x = i / 100.0;
        roundtrip = std::max(roundtrip, std::abs(numerics::q_inverse(numerics::q_function(x)) - x));
    }

    const double a = numerics::kDbToNeper;
    double moment_err = 0.0;
    for (double sigma : {8.0, 12.0}) {
        for (double xi_max : {-10.0, 0.0, 10.25, std::numeric_limits<double>::infinity()}) {
            for (int order : {1, 2}) {
                const double closed = numerics::truncated_ln_partial_moment(a, sigma, xi_max, order);
                const double k = order;
                // The integrand is a Gaussian centred on -k·a·σ².
                const double centre = -k * a * sigma * sigma;
                const double upper = std::min(xi_max, centre + 12.0 * sigma);
                const double quad = numerics::integrate(
                    [&](double xi) { return std::exp(-k * a * xi) * numerics::normal_pdf(xi / sigma) / sigma; },
                    centre - 12.0 * sigma, upper, {});
                moment_err = std::max(moment_err, rel_diff(closed, quad));
            }
        }
    }

    double fit_err = 0.0;
    for (double m : {0.1, 2.0, 37.0}) {
        for (double v : {0.0, 0.5, 4.0, 900.0}) {
            const auto fit = dimensioning::fit_lognormal(m, v);
            const double s2 = fit.sigma * fit.sigma;
            const double m_back = std::exp(fit.mu + 0.5 * s2);
            const double v_back = std::expm1(s2) * std::exp(2.0 * fit.mu + s2);
            fit_err = std::max({fit_err, rel_diff(m_back, m), v == 0.0 ? std::abs(v_back) : rel_diff(v_back, v)});
        }
    }

    SystemConstants sys;
    const bool empty_ok = dimensioning::cdma_bs_power({}, sys) == sys.common_control_power;

    bool pole_ok = true;
    const std::vector<std::pair<double, double>> cases{{1.0, 0.0}, {2.0, 0.5}, {0.5, 0.25}};
    for (const auto& [gamma, alpha] : cases) {
        SystemConstants s;
        s.sinr_target = gamma;
        s.orthogonality = alpha;
        // Four users whose loads sum exactly to the pole (1 + αγ)/γ.
        const double per_user = (1.0 + alpha * gamma) / gamma / 4.0 - alpha;
        const std::vector<dimensioning::CdmaUser> users(4, {500.0, per_user, 1e8});
        try {
            (void)dimensioning::cdma_bs_power(users, s);
            pole_ok = false;
        } catch (const InfeasibleLoadError&) {
        }
    }

    out.passed = roundtrip <= 1e-9 && moment_err <= 1e-6 && fit_err <= 1e-12 && empty_ok && pole_ok;
    out.detail = printf_string("Q round trip %.2e (1e-9); truncated moment vs quadrature %.2e (1e-6); "
                               "log-normal fit round trip %.2e (1e-12); no-user power exact: %s; pole detected: %s",
                               roundtrip, moment_err, fit_err, empty_ok ? "yes" : "no", pole_ok ? "yes" : "no");
    return out;
}

CriterionResult determinism(Context& ctx) {
    CriterionResult out{10, "determinism", true, {}};
    montecarlo::SimSpec spec;
    spec.cfg = config(8.0);
    spec.samples = std::min<std::uint64_t>(ctx.options().samples, 200'000);
    spec.seed = ctx.options().seed;
    auto dump = [&](int workers) {
        spec.workers = workers;
        return report::to_json(montecarlo::simulate(spec)).dump();
    };
    const auto one = dump(1);
    const auto eight = dump(8);
    const auto again = dump(8);
    out.passed = one == eight && eight == again;
    out.detail = printf_string("%llu samples, result dumps for workers 1, 8, 8 identical: %s",
                               static_cast<unsigned long long>(spec.samples), out.passed ? "yes" : "no");
    return out;
}

using Check = CriterionResult (*)(Context&);

constexpr Check kChecks[kCriterionCount] = {attachment_agreement, scale_invariance, ocif_lower_bound, ocif_trends,
                                            iopr_moments,         coverage,         pmax_scaling,     rate_density,
                                            identities,           determinism};

}  // namespace

std::vector<CriterionResult> run(const Options& options, std::span<const int> ids) {
    std::vector<int> selected(ids.begin(), ids.end());
    if (selected.empty()) {
        for (int i = 1; i <= kCriterionCount; ++i) selected.push_back(i);
    }
    std::sort(selected.begin(), selected.end());
    selected.erase(std::unique(selected.begin(), selected.end()), selected.end());

    Context ctx(options);
    std::vector<CriterionResult> results;
    for (int id : selected) {
        if (id < 1 || id > kCriterionCount) throw DomainError("unknown criterion id " + std::to_string(id));
        try {
            results.push_back(kChecks[id - 1](ctx));
        } catch (const std::exception& e) {
            results.push_back({id, "criterion " + std::to_string(id), false, std::string("error: ") + e.what()});
        }
    }
    return results;
}

std::string render(const std::vector<CriterionResult>& results) {
    std::string text;
    for (const auto& r : results) {
        text += printf_string("%s %2d %s: ", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str());
        text += r.detail;
        text += '\n';
    }
    return text;
}

bool all_passed(const std::vector<CriterionResult>& results) {
    return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
}

}  // namespace bestcell::verification
