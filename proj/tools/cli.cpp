#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "kiosk/analysis.hpp"
#include "kiosk/breakeven.hpp"
#include "kiosk/config.hpp"
#include "kiosk/digest.hpp"
#include "kiosk/engine.hpp"
#include "kiosk/errors.hpp"
#include "kiosk/report.hpp"

namespace kiosk::cli {

namespace {

namespace fs = std::filesystem;

constexpr const char* kParallelismEnv = "KIOSK_SIM_PARALLELISM";

/// Flags shared by every command that builds a model.
struct ModelFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> customers;
    std::string rule;
    std::string accounting;

    void attach(CLI::App& cmd) {
        cmd.add_option("--config", config_path, "JSON run configuration");
        cmd.add_option("--seed", seed, "master seed (overrides config)");
        cmd.add_option("--customers", customers, "customers per cell (overrides config)");
        cmd.add_option("--rule", rule, "intention update rule: multiplicative | additive");
        cmd.add_option("--accounting", accounting,
                       "margin accounting: discount_all_display_buyers | discount_incremental_only");
    }

    // Precedence: built-in defaults, then the config file, then flags.
    RunConfig resolve() const {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
        if (seed) cfg.model.master_seed = *seed;
        if (customers) cfg.model.customers_per_cell = *customers;
        if (!rule.empty()) {
            auto r = parse_rule(rule);
            if (!r) throw ConfigError("--rule", "must be multiplicative or additive");
            cfg.model.rule = *r;
        }
        if (!accounting.empty()) {
            auto a = parse_accounting(accounting);
            if (!a) {
                throw ConfigError("--accounting", "must be discount_all_display_buyers or discount_incremental_only");
            }
            cfg.model.accounting = *a;
        }
        cfg.validate();
        return cfg;
    }
};

std::optional<unsigned> parallelism_from_env() {
    const char* value = std::getenv(kParallelismEnv);
    if (value == nullptr || *value == '\0') return std::nullopt;
    char* end = nullptr;
    const unsigned long n = std::strtoul(value, &end, 10);
    if (*end != '\0') throw ConfigError(kParallelismEnv, "must be a non-negative integer");
    return static_cast<unsigned>(n);
}

std::string iso8601_utc(std::chrono::system_clock::time_point tp) {
    const std::time_t t = std::chrono::system_clock::to_time_t(tp);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

template <typename Writer>
OutputFile write_output(const fs::path& dir, const std::string& name, Writer&& writer) {
    const fs::path path = dir / name;
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + path.string() + " for writing");
        writer(out);
        out.flush();
        if (!out) throw IoError("error while writing " + path.string());
    }
    return OutputFile{name, sha256_file(path), fs::file_size(path)};
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text << '\n';
    if (!out.flush()) throw IoError("error while writing " + path.string());
}

std::vector<CellResult> read_sweep_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    return read_sweep_csv(in);
}

void warn_catalog(const RunConfig& cfg, std::ostream& err) {
    for (const auto& c : cfg.model.catalog.categories()) {
        if (c.truncation_warning()) {
            err << "warning: category '" << c.name << "' has mean/std < 2; positive truncation biases prices\n";
        }
    }
}

// ---------------------------------------------------------------------------
// sweep

struct SweepCommand {
    ModelFlags model;
    std::string out_dir;
    std::optional<unsigned> parallelism;
    bool quiet = false;

    int execute(const std::string& command_line, std::ostream& out, std::ostream& err) const {
        const RunConfig cfg = model.resolve();
        warn_catalog(cfg, err);
        unsigned workers = parallelism ? *parallelism : parallelism_from_env().value_or(0);

        const fs::path dir(out_dir);
        ensure_directory(dir);

        SweepOptions options;
        options.parallelism = workers;
        if (workers == 0) options.parallelism = std::max(1u, std::thread::hardware_concurrency());
        std::size_t last_decile = 0;
        if (!quiet) {
            options.progress = [&err, &last_decile](std::size_t done, std::size_t total) {
                const std::size_t decile = done * 10 / total;
                if (decile != last_decile) {
                    last_decile = decile;
                    err << "sweep: " << done << "/" << total << " cells\n";
                }
            };
        }

        const auto started = std::chrono::system_clock::now();
        const auto t0 = std::chrono::steady_clock::now();
        const SweepOutcome outcome = run_sweep(cfg.grid, cfg.model, options);
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        RunManifest manifest;
        manifest.tool_version = KIOSK_VERSION;
        manifest.command = command_line;
        manifest.config = cfg;
        manifest.parallelism = options.parallelism;
        manifest.started_at = iso8601_utc(started);
        manifest.elapsed_seconds = elapsed;
        manifest.cells = outcome.results.size() + outcome.failures.size();
        manifest.simulated_customers = manifest.cells * cfg.model.customers_per_cell;
        manifest.failures = outcome.failures;

        manifest.outputs.push_back(write_output(dir, "sweep.csv", [&](std::ostream& os) {
            write_sweep_csv(os, outcome.results);
        }));
        if (!outcome.results.empty()) {
            const std::string text = summary_to_json(summary(outcome.results));
            manifest.outputs.push_back(write_output(dir, "summary.json", [&](std::ostream& os) { os << text << '\n'; }));
        }
        manifest.finished_at = iso8601_utc(std::chrono::system_clock::now());
        write_text(dir / "manifest.json", manifest_to_json(manifest));

        out << "sweep: " << outcome.results.size() << " cells (" << manifest.simulated_customers
            << " customers) in " << elapsed << " s -> " << dir.string() << '\n';
        if (!outcome.failures.empty()) {
            err << "sweep: " << outcome.failures.size() << " cells failed; see manifest.json\n";
            return kPartialFailure;
        }
        return kOk;
    }
};

// ---------------------------------------------------------------------------
// cell

struct CellCommand {
    ModelFlags model;
    double u = 0.0;
    double pi = 0.0;
    double d = 0.0;
    double m = 0.0;
    std::uint64_t index = 0;
    std::string format = "json";

    int execute(std::ostream& out, std::ostream& err) const {
        const RunConfig cfg = model.resolve();
        warn_catalog(cfg, err);
        const CellParams cell{u, pi, d, m};
        try {
            cell.validate();
        } catch (const DomainError& e) {
            throw ConfigError("cell", e.what());
        }
        const CellResult result = simulate_cell(cell, cfg.model, index);
        if (format == "csv") {
            write_sweep_csv(out, std::span(&result, 1));
        } else {
            out << cell_result_to_json(result) << '\n';
        }
        return kOk;
    }
};

// ---------------------------------------------------------------------------
// breakeven

struct BreakevenCommand {
    ModelFlags model;
    std::vector<double> margins;
    std::vector<double> pis;
    std::optional<double> pi_start;
    std::optional<double> pi_stop;
    std::optional<double> pi_step;
    double d_lo = 0.0;
    double d_hi = 0.7;
    std::string method = "analytic";
    std::string input;
    std::string out_dir = ".";
    std::string format = "csv";

    int execute(std::ostream& out, std::ostream& /*err*/) const {
        const RunConfig cfg = model.resolve();
        std::vector<BreakEvenCurve> curves;

        if (method == "empirical") {
            if (input.empty()) throw ConfigError("--in", "is required for the empirical method");
            const auto results = read_sweep_file(input);
            std::vector<double> wanted = margins;
            if (wanted.empty()) {
                std::set<double> seen;
                for (const auto& r : results) seen.insert(r.cell.m);
                wanted.assign(seen.begin(), seen.end());
            }
            for (double m : wanted) {
                BreakEvenCurve curve = empirical_breakeven(results, m);
                if (!pis.empty()) {
                    std::erase_if(curve.points, [&](const BreakEvenPoint& p) {
                        return std::find(pis.begin(), pis.end(), p.pi) == pis.end();
                    });
                }
                curves.push_back(std::move(curve));
            }
        } else {
            std::vector<double> pi_values = pis;
            if (pi_values.empty()) {
                AxisRange axis = cfg.grid.pi;
                if (pi_start) axis.start = *pi_start;
                if (pi_stop) axis.stop = *pi_stop;
                if (pi_step) axis.step = *pi_step;
                SweepGrid probe = cfg.grid;
                probe.pi = axis;
                probe.validate();
                pi_values = axis.points();
            }
            const std::vector<double> wanted = margins.empty() ? cfg.grid.margins : margins;
            const DiscountDomain domain{d_lo, d_hi};
            for (double m : wanted) {
                try {
                    curves.push_back(analytic_breakeven_curve(m, pi_values, cfg.model.law, cfg.model.rule,
                                                              cfg.model.accounting, domain));
                } catch (const DomainError& e) {
                    throw ConfigError("breakeven", e.what());
                }
            }
        }

        const fs::path dir(out_dir);
        ensure_directory(dir);
        if (format == "json") {
            nlohmann::ordered_json j = nlohmann::ordered_json::array();
            for (const auto& c : curves) {
                for (const auto& p : c.points) {
                    nlohmann::ordered_json intervals = nlohmann::ordered_json::array();
                    for (const auto& iv : p.intervals) intervals.push_back({iv.lo, iv.hi});
                    j.push_back({{"margin", c.margin}, {"pi", p.pi}, {"method", to_string(c.method)},
                                 {"intervals", intervals}});
                }
            }
            write_text(dir / "breakeven.json", j.dump(2));
            out << "breakeven: wrote " << (dir / "breakeven.json").string() << '\n';
        } else {
            write_output(dir, "breakeven.csv", [&](std::ostream& os) { write_breakeven_csv(os, curves); });
            out << "breakeven: wrote " << (dir / "breakeven.csv").string() << '\n';
        }
        return kOk;
    }
};

// ---------------------------------------------------------------------------
// report

struct ReportCommand {
    std::string input;
    std::string out_dir;
    std::vector<std::string> metrics{"r_margin", "r_customers"};
    std::vector<std::string> axes{"by_discount", "by_intention"};
    std::vector<double> margins;
    std::string source = "analytic";
    bool breakeven = false;

    int execute(std::ostream& out, std::ostream& /*err*/) const {
        const auto results = read_sweep_file(input);

        std::vector<Metric> metric_list;
        for (const auto& name : metrics) {
            bool found = false;
            for (auto mt : {Metric::RMargin, Metric::RCustomers, Metric::RMarginPopulation,
                            Metric::RCustomersPopulation}) {
                if (name == to_string(mt)) {
                    metric_list.push_back(mt);
                    found = true;
                }
            }
            if (!found) throw ConfigError("--metric", "unknown metric '" + name + "'");
        }
        std::vector<Axis> axis_list;
        for (const auto& name : axes) {
            if (name == "by_discount") {
                axis_list.push_back(Axis::ByDiscount);
            } else if (name == "by_intention") {
                axis_list.push_back(Axis::ByIntention);
            } else {
                throw ConfigError("--axis", "unknown axis '" + name + "'");
            }
        }
        const MetricSource src = source == "mc" ? MetricSource::MonteCarlo : MetricSource::Analytic;

        std::vector<double> wanted = margins;
        if (wanted.empty()) {
            std::set<double> seen;
            for (const auto& r : results) seen.insert(r.cell.m);
            wanted.assign(seen.begin(), seen.end());
        }

        const fs::path dir(out_dir);
        std::vector<std::pair<std::string, AggregateCurve>> files;
        for (double m : wanted) {
            for (auto metric : metric_list) {
                for (auto axis : axis_list) {
                    AggregateCurve curve = aggregate(results, metric, axis, m, src);
                    files.emplace_back(aggregate_file_name(curve), std::move(curve));
                }
            }
        }
        std::vector<BreakEvenCurve> frontier;
        if (breakeven) {
            for (double m : wanted) frontier.push_back(empirical_breakeven(results, m, src));
        }

        ensure_directory(dir);
        for (const auto& [name, curve] : files) {
            write_output(dir, name, [&](std::ostream& os) { write_aggregate_csv(os, curve); });
            out << "report: wrote " << (dir / name).string() << '\n';
        }
        if (breakeven) {
            write_output(dir, "breakeven_empirical.csv", [&](std::ostream& os) { write_breakeven_csv(os, frontier); });
            out << "report: wrote " << (dir / "breakeven_empirical.csv").string() << '\n';
        }
        return kOk;
    }
};

template <typename Fn>
int guarded(Fn&& fn, std::ostream& err) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        err << "error: invalid configuration: " << e.what() << '\n';
        return kInvalidInput;
    } catch (const DataError& e) {
        err << "error: invalid input: " << e.what() << '\n';
        return kInvalidInput;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidInput;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIoFailure;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kIoFailure;
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Monte Carlo and analytic engine for kiosk discount recommendations", "kiosk-sim"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(KIOSK_VERSION));

    SweepCommand sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "simulate the full parameter grid");
    sweep.model.attach(*sweep_cmd);
    sweep_cmd->add_option("--out", sweep.out_dir, "output directory")->required();
    sweep_cmd->add_option("--parallelism", sweep.parallelism,
                          std::string("worker threads, 0 = all cores (default: $") + kParallelismEnv + " or 0)");
    sweep_cmd->add_flag("--quiet", sweep.quiet, "no progress output");
    std::string sweep_format = "csv";
    sweep_cmd->add_option("--format", sweep_format, "per-cell output format")->check(CLI::IsMember({"csv"}));

    CellCommand cell;
    auto* cell_cmd = app.add_subcommand("cell", "simulate one cell and print it");
    cell.model.attach(*cell_cmd);
    cell_cmd->add_option("--u", cell.u, "display-usage probability")->required();
    cell_cmd->add_option("--pi", cell.pi, "initial purchase intention")->required();
    cell_cmd->add_option("--d", cell.d, "discount fraction")->required();
    cell_cmd->add_option("--m", cell.m, "margin fraction")->required();
    cell_cmd->add_option("--index", cell.index, "cell index used for seed derivation");
    cell_cmd->add_option("--format", cell.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));

    BreakevenCommand be;
    auto* be_cmd = app.add_subcommand("breakeven", "profitable discount intervals per margin and intention");
    be.model.attach(*be_cmd);
    be_cmd->add_option("--margins", be.margins, "margins (default: config grid margins)")->delimiter(',');
    be_cmd->add_option("--pi", be.pis, "explicit intention values")->delimiter(',');
    be_cmd->add_option("--pi-start", be.pi_start, "intention grid start");
    be_cmd->add_option("--pi-stop", be.pi_stop, "intention grid stop (inclusive)");
    be_cmd->add_option("--pi-step", be.pi_step, "intention grid step");
    be_cmd->add_option("--d-lo", be.d_lo, "lower end of the discount domain");
    be_cmd->add_option("--d-hi", be.d_hi, "upper end of the discount domain");
    be_cmd->add_option("--method", be.method, "analytic | empirical")->check(CLI::IsMember({"analytic", "empirical"}));
    be_cmd->add_option("--in", be.input, "sweep.csv for the empirical method");
    be_cmd->add_option("--out", be.out_dir, "output directory");
    be_cmd->add_option("--format", be.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

    ReportCommand report;
    auto* report_cmd = app.add_subcommand("report", "aggregate a sweep into figure data");
    report_cmd->add_option("--in", report.input, "sweep.csv from the sweep command")->required();
    report_cmd->add_option("--out", report.out_dir, "output directory")->required();
    report_cmd->add_option("--metric", report.metrics, "r_margin, r_customers, r_margin_population, r_customers_population")
        ->delimiter(',');
    report_cmd->add_option("--axis", report.axes, "by_discount, by_intention")->delimiter(',');
    report_cmd->add_option("--margins", report.margins, "margins to report (default: all)")->delimiter(',');
    report_cmd->add_option("--source", report.source, "analytic | mc")->check(CLI::IsMember({"analytic", "mc"}));
    report_cmd->add_flag("--breakeven", report.breakeven, "also write breakeven_empirical.csv");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kInvalidInput;
    }

    std::string command_line;
    for (const auto& a : args) command_line += (command_line.empty() ? "" : " ") + a;

    if (*sweep_cmd) return guarded([&] { return sweep.execute(command_line, out, err); }, err);
    if (*cell_cmd) return guarded([&] { return cell.execute(out, err); }, err);
    if (*be_cmd) return guarded([&] { return be.execute(out, err); }, err);
    if (*report_cmd) return guarded([&] { return report.execute(out, err); }, err);
    return kUsage;
}

}  // namespace kiosk::cli
