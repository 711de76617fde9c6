#include "bestcell/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <omp.h>

#include "bestcell/errors.hpp"
#include "bestcell/geometry.hpp"
#include "bestcell/rng.hpp"

namespace bestcell::montecarlo {

namespace {

constexpr std::uint64_t kBlockSize = 4096;
constexpr double kXiHistLoDb = -150.0;
constexpr double kXiHistStepDb = 0.25;
constexpr std::size_t kXiHistBins = 1200;
constexpr std::size_t kFHistBins = 20000;

// Floating-point sums for one block of samples, or for the whole run in
// the serial reference.
struct MomentSums {
    struct Bin {
        Moments own_gain, ocif, ocif_near1, ocif_near2, ocif_far;
        Moments f, f_sq, f_near1, f_near2, f_far;
    };
    std::vector<Bin> bins;
    Moments f;
    Moments f_sq;
    Moments shadowing;

    explicit MomentSums(std::size_t n_bins) : bins(n_bins) {}

    void merge(const MomentSums& o) {
        for (std::size_t b = 0; b < bins.size(); ++b) {
            auto& d = bins[b];
            const auto& s = o.bins[b];
            d.own_gain.merge(s.own_gain);
            d.ocif.merge(s.ocif);
            d.ocif_near1.merge(s.ocif_near1);
            d.ocif_near2.merge(s.ocif_near2);
            d.ocif_far.merge(s.ocif_far);
            d.f.merge(s.f);
            d.f_sq.merge(s.f_sq);
            d.f_near1.merge(s.f_near1);
            d.f_near2.merge(s.f_near2);
            d.f_far.merge(s.f_far);
        }
        f.merge(o.f);
        f_sq.merge(o.f_sq);
        shadowing.merge(o.shadowing);
    }
};

// Integer tallies; merge order is irrelevant.
struct Counts {
    std::vector<std::uint64_t> samples;
    std::vector<std::uint64_t> attached;
    std::vector<std::uint64_t> outage;   // bin-major, gamma-minor
    std::vector<std::uint64_t> xi_hist;  // bin-major
    std::vector<std::uint64_t> f_hist;
    std::uint64_t f_below = 0;
    std::uint64_t f_above = 0;

    Counts(std::size_t n_bins, std::size_t n_gamma)
        : samples(n_bins), attached(n_bins), outage(n_bins * n_gamma), xi_hist(n_bins * kXiHistBins),
          f_hist(kFHistBins) {}

    void merge(const Counts& o) {
        auto add = [](std::vector<std::uint64_t>& d, const std::vector<std::uint64_t>& s) {
            for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
        };
        add(samples, o.samples);
        add(attached, o.attached);
        add(outage, o.outage);
        add(xi_hist, o.xi_hist);
        add(f_hist, o.f_hist);
        f_below += o.f_below;
        f_above += o.f_above;
    }
};

class Kernel {
public:
    explicit Kernel(const SimSpec& spec)
        : spec_(spec),
          layout_(geometry::build_grid(spec.cfg.rc, spec.tiers)),
          engine_(spec.seed),
          radius_(2.0 * spec.cfg.rc),
          gain_scale_(spec.cfg.k0 * std::pow(spec.cfg.r0, spec.cfg.eta)),
          r0_sq_(spec.cfg.r0 * spec.cfg.r0) {
        thresholds_.reserve(spec.gamma_grid_db.size());
        for (double g : spec.gamma_grid_db) thresholds_.push_back(std::pow(10.0, -g / 10.0));
    }

    std::size_t stations() const { return layout_.size(); }

    // Scratch buffers are per caller so the kernel itself stays read-only.
    struct Scratch {
        std::vector<double> xi;
        std::vector<double> dist_sq;
        std::vector<double> score;
    };

    Scratch scratch() const {
        const auto n = layout_.size();
        return {std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
    }

    void run(std::uint64_t sample, Scratch& s, MomentSums& m, Counts& c) const {
        const auto& cfg = spec_.cfg;
        const std::size_t n = layout_.size();
        rng::SampleStream stream(engine_, sample);

        const double r_b = radius_ * std::sqrt(stream.uniform());
        const double angle = 2.0 * std::numbers::pi * stream.uniform();
        const double px = r_b * std::cos(angle);
        const double py = r_b * std::sin(angle);

        for (std::size_t i = 0; i < n; i += 2) {
            const auto z = stream.normal_pair();
            s.xi[i] = cfg.sigma_db * z[0];
            if (i + 1 < n) s.xi[i + 1] = cfg.sigma_db * z[1];
        }
        double xi_sum = 0.0;
        double xi_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            xi_sum += s.xi[i];
            xi_sq += s.xi[i] * s.xi[i];
        }
        m.shadowing.n += n;
        m.shadowing.sum += xi_sum;
        m.shadowing.sum_sq += xi_sq;

        // Log of the link gain over k0·r0^η: -η·ln(max(d, r0)) - a·ξ.
        const double a = cfg.a();
        double best = -std::numeric_limits<double>::infinity();
        std::size_t best_index = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dx = px - layout_.positions[i].x;
            const double dy = py - layout_.positions[i].y;
            s.dist_sq[i] = dx * dx + dy * dy;
            s.score[i] = -0.5 * cfg.eta * std::log(std::max(s.dist_sq[i], r0_sq_)) - a * s.xi[i];
            if (s.score[i] > best) {
                best = s.score[i];
                best_index = i;
            }
        }

        const auto bin = std::min(static_cast<std::size_t>(r_b / radius_ * static_cast<double>(spec_.bins)),
                                  static_cast<std::size_t>(spec_.bins - 1));
        ++c.samples[bin];
        if (best_index != 0) return;
        ++c.attached[bin];

        // Two nearest interferers by true distance.
        std::size_t first = 0;
        std::size_t second = 0;
        for (std::size_t i = 1; i < n; ++i) {
            if (first == 0 || s.dist_sq[i] < s.dist_sq[first]) {
                second = first;
                first = i;
            } else if (second == 0 || s.dist_sq[i] < s.dist_sq[second]) {
                second = i;
            }
        }

        const double own = s.score[0];
        double f = 0.0;
        double f1 = 0.0;
        double f2 = 0.0;
        for (std::size_t i = 1; i < n; ++i) {
            const double ratio = std::exp(s.score[i] - own);
            f += ratio;
            if (i == first) f1 = ratio;
            if (i == second) f2 = ratio;
        }
        const double f_far = f - f1 - f2;
        const double own_gain = gain_scale_ * std::exp(own);

        auto& b = m.bins[bin];
        b.own_gain.add(own_gain);
        b.ocif.add(own_gain * f);
        b.ocif_near1.add(own_gain * f1);
        b.ocif_near2.add(own_gain * f2);
        b.ocif_far.add(own_gain * f_far);
        b.f.add(f);
        b.f_sq.add(f * f);
        b.f_near1.add(f1);
        b.f_near2.add(f2);
        b.f_far.add(f_far);
        m.f.add(f);
        m.f_sq.add(f * f);

        const std::size_t n_gamma = thresholds_.size();
        for (std::size_t g = 0; g < n_gamma; ++g) {
            if (f > thresholds_[g]) ++c.outage[bin * n_gamma + g];
        }

        const double xi_pos = std::floor((s.xi[0] - kXiHistLoDb) / kXiHistStepDb);
        const auto xi_index = static_cast<std::size_t>(std::clamp(xi_pos, 0.0, double(kXiHistBins - 1)));
        ++c.xi_hist[bin * kXiHistBins + xi_index];

        const double f_db = 10.0 * std::log10(f);
        const double f_pos = std::floor((f_db - kFHistLoDb) / kFHistStepDb);
        if (f_pos < 0.0) {
            ++c.f_below;
        } else if (f_pos >= double(kFHistBins)) {
            ++c.f_above;
        } else {
            ++c.f_hist[static_cast<std::size_t>(f_pos)];
        }
    }

    static constexpr double kFHistLoDb = -100.0;
    static constexpr double kFHistStepDb = 0.01;

private:
    const SimSpec& spec_;
    geometry::GridLayout layout_;
    rng::Philox4x32 engine_;
    double radius_;
    double gain_scale_;
    double r0_sq_;
    std::vector<double> thresholds_;
};

double xi_percentile(const std::uint64_t* hist, std::uint64_t total, double q) {
    if (total == 0) return 0.0;
    const double need = q * static_cast<double>(total);
    std::uint64_t seen = 0;
    for (std::size_t k = 0; k < kXiHistBins; ++k) {
        seen += hist[k];
        if (static_cast<double>(seen) >= need) return kXiHistLoDb + static_cast<double>(k + 1) * kXiHistStepDb;
    }
    return kXiHistLoDb + static_cast<double>(kXiHistBins) * kXiHistStepDb;
}

SimResult assemble(const SimSpec& spec, std::size_t stations, const MomentSums& m, const Counts& c) {
    SimResult r;
    r.spec = spec;
    r.stations = stations;
    r.f = m.f;
    r.f_sq = m.f_sq;
    r.shadowing = m.shadowing;
    r.f_hist_lo_db = Kernel::kFHistLoDb;
    r.f_hist_step_db = Kernel::kFHistStepDb;
    r.f_below = c.f_below;
    r.f_above = c.f_above;
    r.f_hist = c.f_hist;

    const auto n_bins = static_cast<std::size_t>(spec.bins);
    const std::size_t n_gamma = spec.gamma_grid_db.size();
    const double width = 2.0 * spec.cfg.rc / static_cast<double>(spec.bins);
    r.bins.resize(n_bins);
    for (std::size_t b = 0; b < n_bins; ++b) {
        auto& out = r.bins[b];
        const auto& s = m.bins[b];
        out.r_lo = width * static_cast<double>(b);
        out.r_hi = width * static_cast<double>(b + 1);
        out.samples = c.samples[b];
        out.attached = c.attached[b];
        out.own_gain = s.own_gain;
        out.ocif = s.ocif;
        out.ocif_near1 = s.ocif_near1;
        out.ocif_near2 = s.ocif_near2;
        out.ocif_far = s.ocif_far;
        out.f = s.f;
        out.f_sq = s.f_sq;
        out.f_near1 = s.f_near1;
        out.f_near2 = s.f_near2;
        out.f_far = s.f_far;
        out.outage.assign(c.outage.begin() + static_cast<std::ptrdiff_t>(b * n_gamma),
                          c.outage.begin() + static_cast<std::ptrdiff_t>((b + 1) * n_gamma));
        out.xi_b_p999 = xi_percentile(c.xi_hist.data() + b * kXiHistBins, out.attached, 0.999);
        r.attached += out.attached;
    }
    return r;
}

}  // namespace

std::vector<double> SimSpec::default_gamma_grid() {
    std::vector<double> grid;
    for (int g = -10; g <= 20; ++g) grid.push_back(static_cast<double>(g));
    return grid;
}

void SimSpec::validate() const {
    cfg.validate();
    if (tiers < 1) throw DomainError("tiers must be >= 1");
    if (samples < 1) throw DomainError("samples must be >= 1");
    if (bins < 1) throw DomainError("bins must be >= 1");
    if (workers < 0) throw DomainError("workers must be >= 0");
    for (double g : gamma_grid_db) {
        if (!std::isfinite(g)) throw DomainError("gamma grid entries must be finite");
    }
}

double Moments::variance() const {
    if (n < 2) return 0.0;
    const double dn = static_cast<double>(n);
    const double mu = sum / dn;
    return std::max(0.0, (sum_sq - dn * mu * mu) / (dn - 1.0));
}

double Moments::stderr_of_mean() const { return n ? std::sqrt(variance() / static_cast<double>(n)) : 0.0; }

Estimate BinStats::attach_frequency() const {
    if (samples == 0) return {};
    const double p = static_cast<double>(attached) / static_cast<double>(samples);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

Estimate BinStats::outage_frequency(std::size_t gamma_index) const {
    if (attached == 0) return {};
    const double p = static_cast<double>(outage.at(gamma_index)) / static_cast<double>(attached);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(attached))};
}

double SimResult::bin_width() const { return 2.0 * spec.cfg.rc / static_cast<double>(spec.bins); }

Estimate SimResult::attached_fraction() const {
    const double n = static_cast<double>(spec.samples);
    const double p = static_cast<double>(attached) / n;
    return {p, std::sqrt(p * (1.0 - p) / n)};
}

double SimResult::var_f() const {
    const double mu = f.mean();
    return f_sq.mean() - mu * mu;
}

Estimate SimResult::attached_density(std::size_t bin) const {
    Moments indicator;
    const auto count = bins.at(bin).attached;
    indicator.n = count;
    indicator.sum = static_cast<double>(count);
    indicator.sum_sq = static_cast<double>(count);
    return weighted_density(bin, indicator);
}

Estimate SimResult::weighted_density(std::size_t bin, const Moments& quantity) const {
    (void)bins.at(bin);
    if (attached == 0) return {};
    const double n = static_cast<double>(spec.samples);
    const double w = bin_width();
    const double scale = n / static_cast<double>(attached);
    // Y = X·1{attached, in bin}/w over all n samples.
    const double mean_y = quantity.sum / (n * w);
    double var_y = 0.0;
    if (spec.samples > 1) var_y = std::max(0.0, (quantity.sum_sq / (w * w) / n - mean_y * mean_y) * n / (n - 1.0));
    return {mean_y * scale, std::sqrt(var_y / n) * scale};
}

SimResult simulate_serial(const SimSpec& spec) {
    spec.validate();
    const Kernel kernel(spec);
    const auto n_bins = static_cast<std::size_t>(spec.bins);
    MomentSums sums(n_bins);
    Counts counts(n_bins, spec.gamma_grid_db.size());
    auto scratch = kernel.scratch();
    for (std::uint64_t i = 0; i < spec.samples; ++i) kernel.run(i, scratch, sums, counts);
    return assemble(spec, kernel.stations(), sums, counts);
}

SimResult simulate(const SimSpec& spec) {
    spec.validate();
    const Kernel kernel(spec);
    const auto n_bins = static_cast<std::size_t>(spec.bins);
    const std::size_t n_gamma = spec.gamma_grid_db.size();
    const std::uint64_t blocks = (spec.samples + kBlockSize - 1) / kBlockSize;
    const int threads = spec.workers > 0 ? spec.workers : omp_get_max_threads();

    std::vector<MomentSums> partial(blocks, MomentSums(n_bins));
    std::vector<Counts> tallies(static_cast<std::size_t>(threads), Counts(n_bins, n_gamma));

#pragma omp parallel num_threads(threads)
    {
        auto scratch = kernel.scratch();
        auto& counts = tallies[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(dynamic)
        for (std::int64_t blk = 0; blk < static_cast<std::int64_t>(blocks); ++blk) {
            const auto begin = static_cast<std::uint64_t>(blk) * kBlockSize;
            const auto end = std::min(begin + kBlockSize, spec.samples);
            auto& sums = partial[static_cast<std::size_t>(blk)];
            for (std::uint64_t i = begin; i < end; ++i) kernel.run(i, scratch, sums, counts);
        }
    }

    MomentSums sums(n_bins);
    for (const auto& p : partial) sums.merge(p);
    Counts counts(n_bins, n_gamma);
    for (const auto& t : tallies) counts.merge(t);
    return assemble(spec, kernel.stations(), sums, counts);
}

std::vector<CoverageEstimate> empirical_coverage(const SimResult& result, std::span<const double> gamma_grid_db) {
    std::vector<CoverageEstimate> out;
    out.reserve(gamma_grid_db.size());
    const double total = static_cast<double>(result.attached);
    const auto n_hist = result.f_hist.size();
    for (double g : gamma_grid_db) {
        CoverageEstimate e{g, 0.0, 0.0};
        if (result.attached > 0) {
            // f <= 1/γ  <=>  10·log10 f <= -γ_dB; count whole bins below the edge.
            const double edges = std::floor((-g - result.f_hist_lo_db) / result.f_hist_step_db + 1e-6);
            const auto full = static_cast<std::size_t>(std::clamp(edges, 0.0, static_cast<double>(n_hist)));
            std::uint64_t covered = (-g >= result.f_hist_lo_db) ? result.f_below : 0;
            for (std::size_t k = 0; k < full; ++k) covered += result.f_hist[k];
            e.coverage = static_cast<double>(covered) / total;
            e.std_error = std::sqrt(e.coverage * (1.0 - e.coverage) / total);
        }
        out.push_back(e);
    }
    return out;
}

}  // namespace bestcell::montecarlo
