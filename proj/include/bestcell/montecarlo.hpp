#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bestcell/attachment.hpp"
#include "bestcell/parallel.hpp"

namespace bestcell::montecarlo {

struct SimSpec {
    NetworkConfig cfg;
    int tiers = 3;  // 37 stations
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 42;
    int workers = 0;  // 0: OpenMP default; never affects results
    int bins = 40;
    /// SIR thresholds (dB) for the per-bin outage counts.
    std::vector<double> gamma_grid_db = default_gamma_grid();

    static std::vector<double> default_gamma_grid();

    void validate() const;
};

/// Running sums of one per-sample quantity.
struct Moments {
    std::uint64_t n = 0;
    double sum = 0.0;
    double sum_sq = 0.0;

    void add(double v) {
        ++n;
        sum += v;
        sum_sq += v * v;
    }
    void merge(const Moments& o) {
        n += o.n;
        sum += o.sum;
        sum_sq += o.sum_sq;
    }
    double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
    /// Unbiased sample variance; zero below two samples.
    double variance() const;
    double stderr_of_mean() const;
};

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Statistics of mobiles dropped at serving distance [r_lo, r_hi).
///
/// Gains are linear; "near" and "far" split interferers by their true
/// distance rank (1st, 2nd nearest, everything else).
struct BinStats {
    double r_lo = 0.0;
    double r_hi = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t attached = 0;
    Moments own_gain;
    Moments ocif;
    Moments ocif_near1;
    Moments ocif_near2;
    Moments ocif_far;
    Moments f;
    Moments f_sq;  // samples of f², so mean() is E[f²]
    Moments f_near1;
    Moments f_near2;
    Moments f_far;
    std::vector<std::uint64_t> outage;  // attached samples with f > 1/γ, per gamma_grid_db
    double xi_b_p999 = 0.0;             // 99.9th percentile of ξ_b among attached, dB

    double centre() const { return 0.5 * (r_lo + r_hi); }
    Estimate attach_frequency() const;
    Estimate outage_frequency(std::size_t gamma_index) const;
};

struct SimResult {
    SimSpec spec;
    std::size_t stations = 0;
    std::uint64_t attached = 0;
    std::vector<BinStats> bins;
    Moments f;     // over all attached mobiles
    Moments f_sq;  // samples of f²
    Moments shadowing;  // every ξ draw, all stations

    /// Histogram of 10·log10(f) for attached mobiles.
    double f_hist_lo_db = -100.0;
    double f_hist_step_db = 0.01;
    std::uint64_t f_below = 0;  // below f_hist_lo_db
    std::uint64_t f_above = 0;  // at or above the top edge
    std::vector<std::uint64_t> f_hist;

    double bin_width() const;
    Estimate attached_fraction() const;
    double mu_f() const { return f.mean(); }
    double var_f() const;

    /// Radial density of attached mobiles in a bin, normalised over all attached mobiles.
    Estimate attached_density(std::size_t bin) const;

    /// ∫-normalised density of a per-sample quantity: E[X·1{bin}]/(P_attached·width).
    ///
    /// The simulated counterpart of p(r_b)·X̄(r_b)/∫p.
    Estimate weighted_density(std::size_t bin, const Moments& quantity) const;
};

/// Deterministic simulation; blocks of samples run under OpenMP and are
/// merged in block order, so `spec.workers` never changes the result.
SimResult simulate(const SimSpec& spec);

/// Single-threaded reference: one pass, one accumulator.
///
/// Integer counts match simulate() exactly; floating sums agree to rounding.
SimResult simulate_serial(const SimSpec& spec);

struct CoverageEstimate {
    double gamma_db = 0.0;
    double coverage = 0.0;
    double std_error = 0.0;
};

/// Fraction of attached mobiles with f <= 1/γ, from the f histogram.
///
/// Exact for thresholds on the histogram's 0.01 dB lattice.
std::vector<CoverageEstimate> empirical_coverage(const SimResult& result, std::span<const double> gamma_grid_db);

}  // namespace bestcell::montecarlo
