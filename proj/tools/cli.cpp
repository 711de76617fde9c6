#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bestcell/attachment.hpp"
#include "bestcell/dimensioning.hpp"
#include "bestcell/errors.hpp"
#include "bestcell/geometry.hpp"
#include "bestcell/interference.hpp"
#include "bestcell/iopr.hpp"
#include "bestcell/montecarlo.hpp"
#include "bestcell/report.hpp"
#include "bestcell/verification.hpp"

namespace bestcell::cli {

namespace {

using report::format_double;

constexpr const char* kOutputDirEnv = "BESTCELL_OUTPUT_DIR";
constexpr double kSquareMetresPerKm2 = 1e6;

/// Bad configuration detected after parsing; maps to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Settings {
    NetworkConfig net;
    int marginal_terms = 0;  // 0: derived from sigma
    SystemConstants sys;
    int tiers = 3;
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 42;
    int workers = 0;
    int bins = 40;
    std::size_t points = 400;
    std::string r_inf = "inf";
    bool no_compensate = false;
    double gamma_min_db = -10.0;
    double gamma_max_db = 20.0;
    double gamma_step_db = 1.0;
    std::string rc_list = "125,250,500,1000,2000,4000";
    double coverage_target = 0.9;
    double rel_tol = 1e-10;
    double tail_cutoff = 10.0;
    std::size_t max_subdivisions = numerics::QuadratureSpec{}.max_subdivisions;
    std::string criteria;
    std::string format = "csv";
    std::string output;
    std::string config_file;
};

/// One named setting: a CLI flag and a config-file key at once.
struct Entry {
    std::string key;
    CLI::Option* option = nullptr;
    std::function<void(const std::string&)> assign;
    std::function<std::string()> show;
};

class Registry {
public:
    explicit Registry(CLI::App& app) : app_(app) {}

    template <class T>
    CLI::Option* add(const std::string& key, T& target, const std::string& help) {
        Entry e;
        e.key = key;
        e.option = app_.add_option("--" + key, target, help);
        e.assign = [key, &target](const std::string& text) {
            if (!CLI::detail::lexical_cast(text, target)) {
                throw ConfigError("config key '" + key + "': cannot parse value '" + text + "'");
            }
        };
        e.show = [&target] { return show_value(target); };
        entries_.push_back(std::move(e));
        return entries_.back().option;
    }

    void add_flag(const std::string& key, bool& target, const std::string& help) {
        Entry e;
        e.key = key;
        e.option = app_.add_flag("--" + key, target, help);
        e.assign = [key, &target](const std::string& text) {
            if (text == "true" || text == "1" || text == "yes") {
                target = true;
            } else if (text == "false" || text == "0" || text == "no") {
                target = false;
            } else {
                throw ConfigError("config key '" + key + "': expected true or false, got '" + text + "'");
            }
        };
        e.show = [&target] { return std::string(target ? "true" : "false"); };
        entries_.push_back(std::move(e));
    }

    /// Applies `key = value` lines to every setting not given on the command line.
    void apply_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file '" + path + "'");
        std::string line;
        int number = 0;
        while (std::getline(in, line)) {
            ++number;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto text = CLI::detail::trim_copy(line);
            if (text.empty()) continue;
            const auto eq = text.find('=');
            if (eq == std::string::npos) {
                throw ConfigError(path + ":" + std::to_string(number) + ": expected key = value");
            }
            auto key = CLI::detail::trim_copy(text.substr(0, eq));
            const auto value = CLI::detail::trim_copy(text.substr(eq + 1));
            std::replace(key.begin(), key.end(), '_', '-');
            auto* entry = find(key);
            if (entry == nullptr) throw ConfigError(path + ":" + std::to_string(number) + ": unknown key '" + key + "'");
            if (entry->option->count() == 0) entry->assign(value);
        }
    }

    const std::vector<Entry>& entries() const { return entries_; }

private:
    template <class T>
    static std::string show_value(const T& v) {
        if constexpr (std::is_floating_point_v<T>) {
            return format_double(v);
        } else if constexpr (std::is_same_v<T, std::string>) {
            return v;
        } else {
            return std::to_string(v);
        }
    }

    Entry* find(const std::string& key) {
        for (auto& e : entries_) {
            if (e.key == key) return &e;
        }
        return nullptr;
    }

    CLI::App& app_;
    std::vector<Entry> entries_;
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, std::string>> notes;  // extra header lines
};

std::vector<double> parse_list(const std::string& text, const std::string& key) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double v = 0.0;
        if (!CLI::detail::lexical_cast(CLI::detail::trim_copy(item), v)) {
            throw ConfigError(key + ": cannot parse '" + item + "' as a number");
        }
        values.push_back(v);
    }
    if (values.empty()) throw ConfigError(key + ": empty list");
    return values;
}

class Runner {
public:
    Runner(const Settings& s, std::string command) : s_(s), command_(std::move(command)) {
        cfg_ = s.net;
        if (s.marginal_terms != 0) cfg_.marginal_terms = s.marginal_terms;
        quad_.relative_tolerance = s.rel_tol;
        quad_.tail_cutoff = s.tail_cutoff;
        quad_.max_subdivisions = s.max_subdivisions;
        policy_.workers = s.workers;
    }

    void validate() {
        cfg_.validate();
        s_.sys.validate();
        quad_.validate();
        sim_spec().validate();
        if (s_.points < 2) throw DomainError("points must be >= 2");
        if (!(s_.gamma_step_db > 0.0)) throw DomainError("gamma-step-db must be > 0");
        if (!(s_.gamma_max_db >= s_.gamma_min_db)) throw DomainError("gamma-max-db must be >= gamma-min-db");
        if (!(s_.coverage_target > 0.0 && s_.coverage_target < 1.0)) {
            throw DomainError("coverage-target must lie in (0, 1)");
        }
        for (double rc : rc_list()) {
            if (!(rc > 0.0)) throw DomainError("rc-list entries must be > 0");
        }
        (void)r_inf(cfg_.rc);
    }

    double r_inf(double rc) const {
        if (s_.r_inf == "inf") return interference::kInfiniteNetwork;
        if (s_.r_inf == "grid") return geometry::equivalent_network_radius(geometry::build_grid(rc, s_.tiers));
        double v = 0.0;
        if (!CLI::detail::lexical_cast(s_.r_inf, v) || !(v > 0.0)) {
            throw DomainError("r-inf must be 'inf', 'grid' or a positive distance in metres");
        }
        // A fixed distance belongs to the configured cell size; keep the ratio when R_c varies.
        return v * rc / cfg_.rc;
    }

    std::vector<double> rc_list() const { return parse_list(s_.rc_list, "rc-list"); }

    std::vector<double> gamma_grid() const {
        std::vector<double> grid;
        const auto steps = static_cast<long>(std::floor((s_.gamma_max_db - s_.gamma_min_db) / s_.gamma_step_db + 1e-9));
        for (long i = 0; i <= steps; ++i) grid.push_back(s_.gamma_min_db + static_cast<double>(i) * s_.gamma_step_db);
        return grid;
    }

    montecarlo::SimSpec sim_spec() const {
        montecarlo::SimSpec spec;
        spec.cfg = cfg_;
        spec.tiers = s_.tiers;
        spec.samples = s_.samples;
        spec.seed = s_.seed;
        spec.workers = s_.workers;
        spec.bins = s_.bins;
        spec.gamma_grid_db = gamma_grid();
        return spec;
    }

    bool compensate() const { return !s_.no_compensate; }

    Table attach() const {
        const auto profile = attachment::attachment_profile(cfg_, s_.points, s_.tail_cutoff);
        const auto sim = montecarlo::simulate(sim_spec());
        Table t;
        t.columns = {"rb_m",         "rb_over_rc",         "p_attach_analytic", "density_per_m_analytic",
                     "xi_b_max_db",  "p_attach_mc",        "p_attach_mc_stderr", "xi_b_p999_mc_db"};
        for (std::size_t k = 0; k < profile.rb.size(); ++k) {
            const auto& bin = bin_of(sim, profile.rb[k]);
            const auto freq = bin.attach_frequency();
            t.rows.push_back({profile.rb[k], profile.rb[k] / cfg_.rc, profile.p_attach[k], profile.density[k],
                              profile.xi_max[k], freq.value, freq.std_error, bin.xi_b_p999});
        }
        t.notes.push_back({"attached_mass_analytic", format_double(profile.attached_mass())});
        t.notes.push_back({"attached_fraction_mc", format_double(sim.attached_fraction().value)});
        return t;
    }

    Table ocif() const {
        const auto curve = interference::ocif_spatial_distribution(cfg_, r_inf(cfg_.rc), s_.points, quad_, policy_);
        const auto sim = montecarlo::simulate(sim_spec());
        Table t;
        t.columns = {"rb_m", "g1", "g2", "g3plus", "total", "density_analytic", "density_mc", "density_mc_stderr"};
        for (std::size_t k = 0; k < curve.rb.size(); ++k) {
            const auto b = bin_index(sim, curve.rb[k]);
            const auto d = sim.weighted_density(b, sim.bins[b].ocif);
            t.rows.push_back({curve.rb[k], curve.g1[k], curve.g2[k], curve.g3plus[k], curve.total[k],
                              curve.density[k], d.value, d.std_error});
        }
        t.notes.push_back({"mu_g", format_double(curve.mu_g)});
        return t;
    }

    Table iopr() const {
        const auto curve = iopr::iopr_spatial_stats(cfg_, r_inf(cfg_.rc), s_.points, policy_);
        const auto sim = montecarlo::simulate(sim_spec());
        Table t;
        t.columns = {"rb_m",
                     "f_mean",
                     "f_second",
                     "f_mean_density_analytic",
                     "f_second_density_analytic",
                     "f_mean_density_mc",
                     "f_mean_density_mc_stderr",
                     "f_second_density_mc",
                     "f_second_density_mc_stderr"};
        for (std::size_t k = 0; k < curve.rb.size(); ++k) {
            const auto b = bin_index(sim, curve.rb[k]);
            const auto m1 = sim.weighted_density(b, sim.bins[b].f);
            const auto m2 = sim.weighted_density(b, sim.bins[b].f_sq);
            t.rows.push_back({curve.rb[k], curve.mean[k], curve.second[k], curve.mean_density[k],
                              curve.second_density[k], m1.value, m1.std_error, m2.value, m2.std_error});
        }
        t.notes.push_back({"mu_f", format_double(curve.mu_f)});
        t.notes.push_back({"var_f", format_double(curve.var_f)});
        t.notes.push_back({"mu_f_mc", format_double(sim.mu_f())});
        t.notes.push_back({"var_f_mc", format_double(sim.var_f())});
        return t;
    }

    Table coverage() const {
        const auto grid = gamma_grid();
        const auto curve = iopr::iopr_spatial_stats(cfg_, r_inf(cfg_.rc), s_.points, policy_);
        const auto analytic = dimensioning::coverage_curve(curve, grid, compensate());
        const auto sim = montecarlo::simulate(sim_spec());
        const auto mc = montecarlo::empirical_coverage(sim, grid);
        Table t;
        t.columns = {"gamma_db", "coverage_analytic", "coverage_mc", "mc_stderr"};
        for (std::size_t i = 0; i < grid.size(); ++i) {
            t.rows.push_back({grid[i], analytic[i].coverage, mc[i].coverage, mc[i].std_error});
        }
        t.notes.push_back({"attached_samples_mc", std::to_string(sim.attached)});
        return t;
    }

    Table pmax() const {
        Table t;
        t.columns = {"rc_m", "pmax_w", "power_density_w_per_km2"};
        for (const auto& p : power_points()) {
            t.rows.push_back({p.rc, p.pmax, p.power_density * kSquareMetresPerKm2});
        }
        return t;
    }

    Table powerdensity() const {
        Table t;
        t.columns = {"rc_m", "bs_density_per_km2", "mu_g", "power_density_w_per_km2"};
        for (const auto& p : power_points()) {
            t.rows.push_back(
                {p.rc, geometry::bs_density(p.rc) * kSquareMetresPerKm2, p.mu_g, p.power_density * kSquareMetresPerKm2});
        }
        return t;
    }

    Table ratedensity() const {
        const auto rcs = rc_list();
        const auto curve = dimensioning::rate_density(s_.coverage_target, rcs, cfg_, r_inf(cfg_.rc), compensate());
        Table t;
        t.columns = {"rc_m", "cell_density_per_km2", "rate_density_bps_per_hz_per_km2"};
        for (const auto& p : curve.points) {
            t.rows.push_back({p.rc, p.cell_density * kSquareMetresPerKm2, p.rate_density * kSquareMetresPerKm2});
        }
        t.notes.push_back({"gamma_db", format_double(curve.gamma_db)});
        t.notes.push_back({"cell_capacity_bps_per_hz", format_double(curve.capacity)});
        return t;
    }

    Table simulate_table(const montecarlo::SimResult& sim) const {
        Table t;
        t.columns = {"r_lo_m", "r_hi_m", "samples", "attached", "attach_frequency", "own_gain_mean", "ocif_mean",
                     "f_mean", "f_sq_mean", "xi_b_p999_db"};
        for (const auto& b : sim.bins) {
            t.rows.push_back({b.r_lo, b.r_hi, static_cast<double>(b.samples), static_cast<double>(b.attached),
                              b.attach_frequency().value, b.own_gain.mean(), b.ocif.mean(), b.f.mean(),
                              b.f_sq.mean(), b.xi_b_p999});
        }
        return t;
    }

    std::vector<std::pair<std::string, std::string>> header(const Registry& registry) const {
        std::vector<std::pair<std::string, std::string>> lines{{"command", command_}};
        for (const auto& e : registry.entries()) {
            // The thread count never changes results, so it stays out of the echoed config.
            if (e.key == "workers") continue;
            lines.push_back({e.key, e.show()});
        }
        lines.push_back({"marginal-terms-resolved", std::to_string(cfg_.terms())});
        lines.push_back({"r-inf-resolved-m", format_double(r_inf(cfg_.rc))});
        for (const auto& w : cfg_.warnings()) lines.push_back({"warning", w});
        return lines;
    }

private:
    std::vector<dimensioning::PowerPoint> power_points() const {
        // r_inf scales with each cell size through r_inf(rc).
        std::vector<dimensioning::PowerPoint> out;
        for (double rc : rc_list()) {
            const std::vector<double> one{rc};
            auto p = dimensioning::power_curve(one, cfg_, s_.sys, r_inf(rc));
            out.push_back(p.front());
        }
        return out;
    }

    static std::size_t bin_index(const montecarlo::SimResult& sim, double r) {
        const auto b = static_cast<std::size_t>(r / sim.bin_width());
        return std::min(b, sim.bins.size() - 1);
    }

    static const montecarlo::BinStats& bin_of(const montecarlo::SimResult& sim, double r) {
        return sim.bins[bin_index(sim, r)];
    }

    const Settings& s_;
    std::string command_;
    NetworkConfig cfg_;
    numerics::QuadratureSpec quad_;
    ExecPolicy policy_;
};

std::string render_csv(const Table& t, const std::vector<std::pair<std::string, std::string>>& header) {
    std::string text;
    for (const auto& [k, v] : header) text += "# " + k + " = " + v + "\n";
    for (const auto& [k, v] : t.notes) text += "# " + k + " = " + v + "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) text += (i ? "," : "") + t.columns[i];
    text += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) text += (i ? "," : "") + format_double(row[i]);
        text += '\n';
    }
    return text;
}

nlohmann::ordered_json header_json(const std::vector<std::pair<std::string, std::string>>& header) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [k, v] : header) {
        if (k == "warning") {
            j["warnings"].push_back(v);
        } else {
            j[k] = v;
        }
    }
    return j;
}

std::string render_json(const Table& t, const std::vector<std::pair<std::string, std::string>>& header) {
    nlohmann::ordered_json j;
    j["config"] = header_json(header);
    for (const auto& [k, v] : t.notes) j["summary"][k] = v;
    j["columns"] = t.columns;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) j["rows"].push_back(row);
    return j.dump(2) + "\n";
}

void emit(const std::string& text, const Settings& s, const std::string& command, const std::string& extension,
          std::ostream& out) {
    std::filesystem::path path = s.output;
    if (path.empty()) {
        const char* dir = std::getenv(kOutputDirEnv);
        if (dir == nullptr || *dir == '\0') {
            out << text;
            return;
        }
        path = std::filesystem::path(dir) / (command + extension);
    }
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot write output file '" + path.string() + "'");
    file << text;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Settings s;
    CLI::App app{"Best-cell downlink coverage and capacity model on a hexagonal grid"};
    app.require_subcommand(1);
    app.fallthrough();

    Registry reg(app);
    reg.add("eta", s.net.eta, "path-loss exponent (> 2)");
    reg.add("sigma-db", s.net.sigma_db, "shadowing standard deviation, dB");
    reg.add("k0", s.net.k0, "linear gain at the reference distance");
    reg.add("r0", s.net.r0, "reference distance, m");
    reg.add("rc", s.net.rc, "half the base-station spacing, m");
    reg.add("marginal-terms", s.marginal_terms, "nearest cells in the attachment product (0: from sigma)");
    reg.add("noise-density", s.sys.noise_density, "thermal noise density N0, W/Hz");
    reg.add("bandwidth", s.sys.bandwidth, "system bandwidth, Hz");
    reg.add("interference-ratio", s.sys.interference_ratio, "interference-to-noise ratio at P_max");
    reg.add("subcarriers", s.sys.subcarriers, "OFDMA subcarrier count");
    reg.add("sinr-target", s.sys.sinr_target, "CDMA SINR target, linear");
    reg.add("orthogonality", s.sys.orthogonality, "CDMA orthogonality factor");
    reg.add("awgn-power", s.sys.awgn_power, "CDMA receiver noise power, W");
    reg.add("control-power", s.sys.common_control_power, "CDMA common control channel power, W");
    reg.add("tiers", s.tiers, "hexagonal rings in the simulated lattice");
    reg.add("samples", s.samples, "Monte Carlo samples");
    reg.add("seed", s.seed, "Monte Carlo seed");
    reg.add("workers", s.workers, "OpenMP threads (0: runtime default); never changes results");
    reg.add("bins", s.bins, "radial bins of the simulation");
    reg.add("points", s.points, "analytic r_b grid points");
    reg.add("r-inf", s.r_inf, "outer radius of the fluid interference ring: inf, grid, or metres");
    reg.add_flag("no-compensate", s.no_compensate, "disable the sqrt(2) widening of the log-normal fit");
    reg.add("gamma-min-db", s.gamma_min_db, "lowest SIR threshold, dB");
    reg.add("gamma-max-db", s.gamma_max_db, "highest SIR threshold, dB");
    reg.add("gamma-step-db", s.gamma_step_db, "SIR threshold step, dB");
    reg.add("rc-list", s.rc_list, "comma-separated cell sizes R_c, m");
    reg.add("coverage-target", s.coverage_target, "cell coverage target for ratedensity");
    reg.add("rel-tol", s.rel_tol, "quadrature relative tolerance");
    reg.add("tail-cutoff", s.tail_cutoff, "Gaussian tails are cut beyond this many sigma");
    reg.add("max-subdivisions", s.max_subdivisions, "adaptive quadrature panel budget");
    reg.add("criteria", s.criteria, "verify: comma-separated criterion ids (default all)");
    reg.add("format", s.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("-o,--output", s.output, "output file (default: stdout, or $" + std::string(kOutputDirEnv) + ")");
    app.add_option("--config", s.config_file, "flat key = value file; command-line flags take precedence");

    const std::vector<std::pair<std::string, std::string>> commands{
        {"attach", "attachment probability and attached-mobile density vs r_b"},
        {"ocif", "other-cell interference gain vs r_b"},
        {"iopr", "interference-to-own-power moments vs r_b"},
        {"coverage", "cell coverage vs SIR threshold"},
        {"pmax", "maximum base-station power vs cell size"},
        {"powerdensity", "transmit power per area vs cell size"},
        {"ratedensity", "rate per area vs cell size at a coverage target"},
        {"simulate", "raw Monte Carlo result"},
        {"verify", "analytic-vs-simulation checks, one line per criterion"},
    };
    for (const auto& [name, help] : commands) app.add_subcommand(name, help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        if (!s.config_file.empty()) reg.apply_file(s.config_file);
        Runner runner(s, command);
        runner.validate();
        const auto header = runner.header(reg);

        if (command == "verify") {
            verification::Options opt{s.seed, s.samples, s.workers};
            std::vector<int> ids;
            if (!s.criteria.empty()) {
                for (double v : parse_list(s.criteria, "criteria")) ids.push_back(static_cast<int>(v));
            }
            const auto results = verification::run(opt, ids);
            std::string text;
            if (s.format == "json") {
                nlohmann::ordered_json j;
                j["config"] = header_json(header);
                j["criteria"] = nlohmann::ordered_json::array();
                for (const auto& r : results) {
                    j["criteria"].push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
                }
                text = j.dump(2) + "\n";
            } else {
                for (const auto& [k, v] : header) {
                    if (k == "seed" || k == "samples" || k == "command") text += "# " + k + " = " + v + "\n";
                }
                text += verification::render(results);
            }
            emit(text, s, command, s.format == "json" ? ".json" : ".txt", out);
            return verification::all_passed(results) ? kOk : kVerificationFailed;
        }

        if (command == "simulate") {
            const auto sim = montecarlo::simulate(runner.sim_spec());
            std::string text;
            if (s.format == "csv") {
                text = render_csv(runner.simulate_table(sim), header);
            } else {
                nlohmann::ordered_json j;
                j["config"] = header_json(header);
                j["result"] = report::to_json(sim);
                text = j.dump(2) + "\n";
            }
            emit(text, s, command, "." + s.format, out);
            return kOk;
        }

        Table table;
        if (command == "attach") table = runner.attach();
        if (command == "ocif") table = runner.ocif();
        if (command == "iopr") table = runner.iopr();
        if (command == "coverage") table = runner.coverage();
        if (command == "pmax") table = runner.pmax();
        if (command == "powerdensity") table = runner.powerdensity();
        if (command == "ratedensity") table = runner.ratedensity();
        emit(s.format == "json" ? render_json(table, header) : render_csv(table, header), s, command,
             "." + s.format, out);
        return kOk;
    } catch (const ConvergenceError& e) {
        err << "error: convergence failure: " << e.what() << " (best estimate " << format_double(e.best_estimate())
            << ")\n";
        return kConvergenceError;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const DomainError& e) {
        err << "error: invalid configuration: " << e.what() << "\n";
        return kConfigError;
    } catch (const RangeError& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }
}

}  // namespace bestcell::cli
