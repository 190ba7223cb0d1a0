#pragma once
/**
 * @file report.hpp
 * @brief CSV and JSON serialization of sweep outputs.
 *
 * CSV files use a header row, comma separators and LF line endings. Numbers
 * are printed with 17 significant digits ("%.17g"), which re-parses to the
 * identical double. A missing value is an empty field. Booleans are 0/1.
 */

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kiosk/analysis.hpp"
#include "kiosk/config.hpp"
#include "kiosk/engine.hpp"

namespace kiosk {

inline constexpr std::array<std::string_view, 23> kSweepColumns{
    "cell_index",
    "u",
    "pi",
    "d",
    "m",
    "customers",
    "display_users",
    "buyers_baseline",
    "buyers_display_scenario",
    "buyers_among_display_users",
    "counterfactual_buyers_among_display_users",
    "margin_sum_baseline",
    "margin_sum_display_scenario",
    "turnover_baseline",
    "turnover_display_scenario",
    "r_customers_mc",
    "r_margin_mc",
    "pii",
    "pi_eff",
    "r_customers_analytic",
    "r_margin_analytic",
    "clamp_active",
    "seed",
};

/// "%.17g".
std::string format_number(double value);

void write_sweep_header(std::ostream& out);
void write_sweep_row(std::ostream& out, const CellResult& result);
void write_sweep_csv(std::ostream& out, std::span<const CellResult> results);

/**
 * Reads a file produced by write_sweep_csv. Throws DataError naming the
 * first bad line (1-based, header is line 1) and column. An input without
 * data rows is an error. Fields absent from the CSV (display-user margin
 * sums, standard errors) are left at their defaults.
 */
std::vector<CellResult> read_sweep_csv(std::istream& in);

/// Every CellResult field, analytic and Monte Carlo values side by side.
std::string cell_result_to_json(const CellResult& result, int indent = 2);

std::string summary_to_json(const RunSummary& summary, int indent = 2);

/// Columns: <axis name>,<metric>_mean
void write_aggregate_csv(std::ostream& out, const AggregateCurve& curve);
/// e.g. "aggregate_r_margin_by_discount_m0.3.csv"; "_mc" is appended to the
/// metric for Monte Carlo sources.
std::string aggregate_file_name(const AggregateCurve& curve);

/// Columns: margin,pi,interval_lo,interval_hi. One row per interval; a pi
/// without profitable discounts gets one row with empty interval fields.
void write_breakeven_csv(std::ostream& out, std::span<const BreakEvenCurve> curves);

struct OutputFile {
    std::string name;
    std::string sha256;
    std::uintmax_t bytes = 0;
};

struct RunManifest {
    std::string tool_version;
    std::string command;
    RunConfig config;
    unsigned parallelism = 1;
    std::string started_at;   ///< ISO-8601 UTC
    std::string finished_at;  ///< ISO-8601 UTC
    double elapsed_seconds = 0.0;
    std::uint64_t cells = 0;
    std::uint64_t simulated_customers = 0;
    std::vector<OutputFile> outputs;
    std::vector<CellFailure> failures;
};

std::string manifest_to_json(const RunManifest& manifest, int indent = 2);

}  // namespace kiosk
