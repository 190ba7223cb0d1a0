#include "kiosk/analysis.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "kiosk/errors.hpp"

namespace kiosk {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Cells of one margin, keyed by (pi, d, u).
struct MarginSlice {
    std::vector<double> us;
    std::vector<double> pis;
    std::vector<double> ds;
    std::map<std::array<double, 3>, const CellResult*> cells;

    const CellResult& at(double pi, double d, double u) const { return *cells.at({pi, d, u}); }
};

MarginSlice slice_for_margin(std::span<const CellResult> results, double margin) {
    MarginSlice slice;
    std::set<double> us;
    std::set<double> pis;
    std::set<double> ds;
    for (const auto& r : results) {
        if (r.cell.m != margin) continue;
        const auto [it, inserted] = slice.cells.emplace(std::array{r.cell.pi, r.cell.d, r.cell.u}, &r);
        if (!inserted) {
            std::ostringstream msg;
            msg << "duplicate cell (u=" << r.cell.u << ", pi=" << r.cell.pi << ", d=" << r.cell.d
                << ", m=" << margin << ") at cell_index " << r.cell_index;
            throw DataError(msg.str());
        }
        us.insert(r.cell.u);
        pis.insert(r.cell.pi);
        ds.insert(r.cell.d);
    }
    if (slice.cells.empty()) {
        std::ostringstream msg;
        msg << "no cells with margin " << margin;
        throw DataError(msg.str());
    }
    slice.us.assign(us.begin(), us.end());
    slice.pis.assign(pis.begin(), pis.end());
    slice.ds.assign(ds.begin(), ds.end());

    const std::size_t expected = slice.us.size() * slice.pis.size() * slice.ds.size();
    if (slice.cells.size() != expected) {
        std::ostringstream msg;
        msg << "incomplete grid for margin " << margin << ": " << (expected - slice.cells.size())
            << " missing cells";
        std::size_t listed = 0;
        for (double pi : slice.pis) {
            for (double d : slice.ds) {
                for (double u : slice.us) {
                    if (slice.cells.count({pi, d, u})) continue;
                    if (listed == 20) {
                        msg << " ...";
                        throw DataError(msg.str());
                    }
                    msg << (listed++ == 0 ? ": " : "; ") << "(u=" << u << ", pi=" << pi << ", d=" << d << ")";
                }
            }
        }
        throw DataError(msg.str());
    }
    return slice;
}

// Mean over u at fixed (pi, d); NaN when every value is missing.
double mean_over_u(const MarginSlice& slice, double pi, double d, Metric metric, MetricSource source) {
    double sum = 0.0;
    std::size_t n = 0;
    for (double u : slice.us) {
        if (auto v = metric_value(slice.at(pi, d, u), metric, source)) {
            sum += *v;
            ++n;
        }
    }
    return n == 0 ? kNaN : sum / static_cast<double>(n);
}

void update_extrema(MetricExtrema& extrema, std::optional<double> value, const CellResult& r) {
    if (!value || std::isnan(*value)) return;
    const Extremum candidate{*value, r.cell_index, r.cell};
    auto better = [&](const std::optional<Extremum>& current, bool want_max) {
        if (!current) return true;
        if (*value == current->value) return r.cell_index < current->cell_index;
        return want_max ? *value > current->value : *value < current->value;
    };
    if (better(extrema.min, false)) extrema.min = candidate;
    if (better(extrema.max, true)) extrema.max = candidate;
}

std::optional<double> ratio(double num, double den) {
    if (den == 0.0) return std::nullopt;
    return num / den;
}

}  // namespace

std::string_view to_string(Metric metric) noexcept {
    switch (metric) {
        case Metric::RMargin: return "r_margin";
        case Metric::RCustomers: return "r_customers";
        case Metric::RMarginPopulation: return "r_margin_population";
        case Metric::RCustomersPopulation: return "r_customers_population";
    }
    return "unknown";
}

std::string_view to_string(Axis axis) noexcept {
    switch (axis) {
        case Axis::ByDiscount: return "by_discount";
        case Axis::ByIntention: return "by_intention";
    }
    return "unknown";
}

std::string_view to_string(MetricSource source) noexcept {
    switch (source) {
        case MetricSource::Analytic: return "analytic";
        case MetricSource::MonteCarlo: return "mc";
    }
    return "unknown";
}

std::string_view to_string(BreakEvenMethod method) noexcept {
    switch (method) {
        case BreakEvenMethod::Analytic: return "analytic";
        case BreakEvenMethod::Empirical: return "empirical";
    }
    return "unknown";
}

std::optional<double> metric_value(const CellResult& r, Metric metric, MetricSource source) {
    const bool analytic = source == MetricSource::Analytic;
    switch (metric) {
        case Metric::RMargin:
            return analytic ? std::optional(r.analytic.r_margin) : r.r_margin_mc;
        case Metric::RCustomers:
            return analytic ? std::optional(r.analytic.r_customers) : r.r_customers_mc;
        case Metric::RMarginPopulation:
            if (analytic) return 1.0 + r.cell.u * (r.analytic.r_margin - 1.0);
            return ratio(r.margin_sum_display_scenario, r.margin_sum_baseline);
        case Metric::RCustomersPopulation:
            if (analytic) return 1.0 + r.cell.u * (r.analytic.r_customers - 1.0);
            return ratio(static_cast<double>(r.buyers_display_scenario), static_cast<double>(r.buyers_baseline));
    }
    return std::nullopt;
}

AggregateCurve aggregate(std::span<const CellResult> results, Metric metric, Axis axis, double margin,
                         MetricSource source) {
    const MarginSlice slice = slice_for_margin(results, margin);
    AggregateCurve curve{axis, metric, source, margin, {}};

    const bool by_discount = axis == Axis::ByDiscount;
    const auto& kept = by_discount ? slice.ds : slice.pis;
    const auto& averaged = by_discount ? slice.pis : slice.ds;
    curve.points.reserve(kept.size());
    for (double k : kept) {
        double sum = 0.0;
        std::size_t n = 0;
        for (double a : averaged) {
            const double v = by_discount ? mean_over_u(slice, a, k, metric, source)
                                         : mean_over_u(slice, k, a, metric, source);
            if (std::isnan(v)) continue;
            sum += v;
            ++n;
        }
        curve.points.push_back({k, n == 0 ? kNaN : sum / static_cast<double>(n)});
    }
    return curve;
}

BreakEvenCurve empirical_breakeven(std::span<const CellResult> results, double margin, MetricSource source) {
    const MarginSlice slice = slice_for_margin(results, margin);
    BreakEvenCurve curve{margin, BreakEvenMethod::Empirical, {}};
    for (double pi : slice.pis) {
        BreakEvenPoint point{pi, {}};
        std::optional<ProfitInterval> open;
        double prev_d = 0.0;
        double prev_g = 0.0;
        bool first = true;
        for (double d : slice.ds) {
            const double g = mean_over_u(slice, pi, d, Metric::RMargin, source) - 1.0;
            const bool profit = g > 0.0;  // NaN counts as no profit
            if (first) {
                if (profit) open = ProfitInterval{d, d, false, false};
                first = false;
            } else {
                const bool was_profit = prev_g > 0.0;
                if (!was_profit && profit) {
                    const double x = std::isnan(prev_g) ? prev_d : prev_d + (0.0 - prev_g) * (d - prev_d) / (g - prev_g);
                    open = ProfitInterval{x, x, true, false};
                } else if (was_profit && !profit) {
                    const double x = std::isnan(g) ? d : prev_d + (0.0 - prev_g) * (d - prev_d) / (g - prev_g);
                    open->hi = x;
                    open->hi_is_root = true;
                    point.intervals.push_back(*open);
                    open.reset();
                }
            }
            prev_d = d;
            prev_g = g;
        }
        if (open) {
            open->hi = slice.ds.back();
            point.intervals.push_back(*open);
        }
        curve.points.push_back(std::move(point));
    }
    return curve;
}

BreakEvenCurve analytic_breakeven_curve(double margin, std::span<const double> pis, const DiscountLaw& law,
                                        IntentionUpdateRule rule, MarginAccounting accounting,
                                        DiscountDomain domain) {
    BreakEvenCurve curve{margin, BreakEvenMethod::Analytic, {}};
    curve.points.reserve(pis.size());
    for (double pi : pis) {
        curve.points.push_back({pi, breakeven(margin, pi, law, rule, accounting, domain)});
    }
    return curve;
}

RunSummary summary(std::span<const CellResult> results) {
    if (results.empty()) throw DataError("summary needs at least one cell result");
    RunSummary s;
    s.cells = results.size();
    for (const auto& r : results) {
        update_extrema(s.r_customers_analytic, r.analytic.r_customers, r);
        update_extrema(s.r_margin_analytic, r.analytic.r_margin, r);
        update_extrema(s.r_customers_mc, r.r_customers_mc, r);
        update_extrema(s.r_margin_mc, r.r_margin_mc, r);
        if (!r.r_customers_mc || !r.r_margin_mc) ++s.cells_missing_mc;

        auto& t = s.totals;
        t.customers += r.customers;
        t.display_users += r.display_users;
        t.buyers_baseline += r.buyers_baseline;
        t.buyers_display_scenario += r.buyers_display_scenario;
        t.margin_baseline += r.margin_sum_baseline;
        t.margin_display_scenario += r.margin_sum_display_scenario;
        t.turnover_baseline += r.turnover_baseline;
        t.turnover_display_scenario += r.turnover_display_scenario;
    }
    return s;
}

}  // namespace kiosk
