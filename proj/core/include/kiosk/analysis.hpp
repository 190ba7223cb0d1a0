#pragma once
/**
 * @file analysis.hpp
 * @brief Reductions of sweep results into averaged curves, break-even
 *        frontiers and run summaries.
 *
 * Per-display-user metrics (r_margin, r_customers) do not depend on u. The
 * population-level variants scale the per-user change by the usage share,
 * 1 + u * (r - 1), and are kept as separate metrics.
 */

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "kiosk/breakeven.hpp"
#include "kiosk/engine.hpp"

namespace kiosk {

enum class Metric { RMargin, RCustomers, RMarginPopulation, RCustomersPopulation };
enum class Axis { ByDiscount, ByIntention };
enum class MetricSource { Analytic, MonteCarlo };

std::string_view to_string(Metric metric) noexcept;
std::string_view to_string(Axis axis) noexcept;
std::string_view to_string(MetricSource source) noexcept;

/// Value of `metric` for one cell; nullopt when a Monte Carlo ratio is missing.
std::optional<double> metric_value(const CellResult& result, Metric metric, MetricSource source);

struct CurvePoint {
    double axis_value = 0.0;
    double mean = 0.0;  ///< NaN when every contributing Monte Carlo value was missing
};

struct AggregateCurve {
    Axis axis = Axis::ByDiscount;
    Metric metric = Metric::RMargin;
    MetricSource source = MetricSource::Analytic;
    double margin = 0.0;
    std::vector<CurvePoint> points;  ///< ascending axis_value
};

/**
 * Mean of `metric` over the averaged-out axis (pi for ByDiscount, d for
 * ByIntention) for each value of the retained axis, at one margin. Values
 * are first averaged over u. Throws DataError listing missing cells when the
 * margin slice is not a full rectangular (u, pi, d) grid.
 *
 * Summation runs in sorted key order, so the result does not depend on the
 * order of `results`.
 */
AggregateCurve aggregate(std::span<const CellResult> results, Metric metric, Axis axis, double margin,
                         MetricSource source = MetricSource::Analytic);

enum class BreakEvenMethod { Analytic, Empirical };
std::string_view to_string(BreakEvenMethod method) noexcept;

struct BreakEvenPoint {
    double pi = 0.0;
    std::vector<ProfitInterval> intervals;
};

struct BreakEvenCurve {
    double margin = 0.0;
    BreakEvenMethod method = BreakEvenMethod::Analytic;
    std::vector<BreakEvenPoint> points;  ///< ascending pi
};

/**
 * Profit intervals read off the sweep grid: for every pi, the sign changes of
 * r_margin - 1 along the d grid, linearly interpolated. Accurate to one d
 * grid step. r_margin is averaged over u first.
 */
BreakEvenCurve empirical_breakeven(std::span<const CellResult> results, double margin,
                                   MetricSource source = MetricSource::Analytic);

/// Analytic intervals for each pi of `pis`.
BreakEvenCurve analytic_breakeven_curve(double margin, std::span<const double> pis,
                                        const DiscountLaw& law, IntentionUpdateRule rule,
                                        MarginAccounting accounting, DiscountDomain domain = {});

struct Extremum {
    double value = 0.0;
    std::uint64_t cell_index = 0;
    CellParams cell;
};

struct MetricExtrema {
    std::optional<Extremum> min;
    std::optional<Extremum> max;
};

struct ScenarioTotals {
    std::uint64_t customers = 0;
    std::uint64_t display_users = 0;
    std::uint64_t buyers_baseline = 0;
    std::uint64_t buyers_display_scenario = 0;
    double margin_baseline = 0.0;
    double margin_display_scenario = 0.0;
    double turnover_baseline = 0.0;
    double turnover_display_scenario = 0.0;
};

struct RunSummary {
    std::size_t cells = 0;
    MetricExtrema r_customers_analytic;
    MetricExtrema r_margin_analytic;
    MetricExtrema r_customers_mc;
    MetricExtrema r_margin_mc;
    std::size_t cells_missing_mc = 0;
    ScenarioTotals totals;
};

/// Extrema (ties to the lowest cell_index) and scenario totals. Throws
/// DataError on empty input.
RunSummary summary(std::span<const CellResult> results);

}  // namespace kiosk
