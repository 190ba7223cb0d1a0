#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "kiosk/analysis.hpp"
#include "kiosk/errors.hpp"
#include "oracles.hpp"

using namespace kiosk;

namespace {

CellResult analytic_only(const CellParams& c, const ModelConfig& cfg, std::uint64_t index) {
    CellResult r;
    r.cell = c;
    r.cell_index = index;
    r.analytic = analytic_metrics(cfg.law, cfg.rule, cfg.accounting, c);
    r.seed = derive_cell_seed(cfg.master_seed, index);
    return r;
}

std::vector<CellResult> analytic_sweep(const SweepGrid& grid = {}, const ModelConfig& cfg = {}) {
    SweepOptions opts;
    opts.simulate = analytic_only;
    return run_sweep(grid, cfg, opts).results;
}

const std::vector<CellResult>& default_results() {
    static const auto results = analytic_sweep();
    return results;
}

}  // namespace

TEST_CASE("aggregate of a single cell is that cell's metric") {
    SweepGrid g;
    g.u = g.pi = g.d = {0.3, 0.3, 0.02};
    g.margins = {0.4};
    const auto results = analytic_sweep(g);
    REQUIRE(results.size() == 1);
    for (auto metric : {Metric::RMargin, Metric::RCustomers}) {
        for (auto axis : {Axis::ByDiscount, Axis::ByIntention}) {
            const auto curve = aggregate(results, metric, axis, 0.4);
            REQUIRE(curve.points.size() == 1);
            CHECK(curve.points[0].mean == *metric_value(results[0], metric, MetricSource::Analytic));
        }
    }
}

TEST_CASE("aggregate matches brute-force means on the default grid") {
    const auto& results = default_results();
    const auto pis = AxisRange{}.points();
    const auto ds = AxisRange{}.points();
    for (double m : {0.3, 0.4, 0.5}) {
        const auto by_d = aggregate(results, Metric::RMargin, Axis::ByDiscount, m);
        REQUIRE(by_d.points.size() == 31);
        for (std::size_t k = 0; k < ds.size(); ++k) {
            double sum = 0.0;
            for (double pi : pis) sum += oracle::r_margin_default(pi, m, ds[k]);
            CHECK(by_d.points[k].axis_value == ds[k]);
            CHECK(by_d.points[k].mean == doctest::Approx(sum / 31.0).epsilon(1e-12));
        }
        const auto by_pi = aggregate(results, Metric::RCustomers, Axis::ByIntention, m);
        for (std::size_t k = 0; k < pis.size(); ++k) {
            double sum = 0.0;
            for (double d : ds) sum += oracle::pi_eff_multiplicative(pis[k], d) / pis[k];
            CHECK(by_pi.points[k].mean == doctest::Approx(sum / 31.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("averaged buyer uplift is nondecreasing in d") {
    for (double m : {0.3, 0.4, 0.5}) {
        const auto curve = aggregate(default_results(), Metric::RCustomers, Axis::ByDiscount, m);
        for (std::size_t k = 1; k < curve.points.size(); ++k) {
            CHECK(curve.points[k].axis_value > curve.points[k - 1].axis_value);
            CHECK(curve.points[k].mean >= curve.points[k - 1].mean);
        }
        CHECK(curve.points.back().mean > 1.0);
    }
}

TEST_CASE("buyer uplift plateaus beyond the clamp threshold") {
    SweepGrid g;
    g.pi = {0.7, 0.7, 0.02};
    const auto results = analytic_sweep(g);
    const auto threshold = clamp_threshold(IntentionUpdateRule::Multiplicative, DiscountLaw{}, 0.7);
    REQUIRE(threshold);
    const auto curve = aggregate(results, Metric::RCustomers, Axis::ByDiscount, 0.3);
    std::size_t flat = 0;
    for (const auto& p : curve.points) {
        if (p.axis_value >= *threshold) {
            CHECK(p.mean == 1.0 / 0.7);
            ++flat;
        } else {
            CHECK(p.mean < 1.0 / 0.7);
        }
    }
    CHECK(flat == 30);
}

TEST_CASE("aggregate is permutation invariant") {
    auto shuffled = default_results();
    std::mt19937_64 rng(5);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    for (auto metric : {Metric::RMargin, Metric::RCustomers, Metric::RMarginPopulation}) {
        for (auto axis : {Axis::ByDiscount, Axis::ByIntention}) {
            const auto a = aggregate(default_results(), metric, axis, 0.4);
            const auto b = aggregate(shuffled, metric, axis, 0.4);
            REQUIRE(a.points.size() == b.points.size());
            for (std::size_t i = 0; i < a.points.size(); ++i) {
                CHECK(a.points[i].axis_value == b.points[i].axis_value);
                CHECK(a.points[i].mean == b.points[i].mean);
            }
        }
    }
}

TEST_CASE("aggregate rejects incomplete grids") {
    auto partial = default_results();
    partial.erase(partial.begin() + 1234);
    const double m = default_results()[1234].cell.m;
    try {
        aggregate(partial, Metric::RMargin, Axis::ByDiscount, m);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("1 missing") != std::string::npos);
        CHECK(msg.find("u=") != std::string::npos);
    }
    // other margins stay usable
    const double other = m == 0.3 ? 0.4 : 0.3;
    CHECK_NOTHROW(aggregate(partial, Metric::RMargin, Axis::ByDiscount, other));
    CHECK_THROWS_AS(aggregate(default_results(), Metric::RMargin, Axis::ByDiscount, 0.9), DataError);

    auto duplicated = default_results();
    duplicated.push_back(duplicated.front());
    CHECK_THROWS_AS(aggregate(duplicated, Metric::RMargin, Axis::ByDiscount, 0.3), DataError);
}

TEST_CASE("population metrics scale the per-user change by u") {
    const auto& r = default_results()[5000];
    const double u = r.cell.u;
    CHECK(*metric_value(r, Metric::RMarginPopulation, MetricSource::Analytic) ==
          doctest::Approx(1.0 + u * (r.analytic.r_margin - 1.0)));
    CHECK(*metric_value(r, Metric::RCustomersPopulation, MetricSource::Analytic) ==
          doctest::Approx(1.0 + u * (r.analytic.r_customers - 1.0)));
}

TEST_CASE("Monte Carlo aggregation skips missing values") {
    SweepGrid g;
    g.u = {0.0, 0.5, 0.5};
    g.pi = {0.3, 0.3, 0.02};
    g.d = {0.2, 0.4, 0.2};
    g.margins = {0.5};
    ModelConfig cfg;
    cfg.customers_per_cell = 2000;
    const auto results = run_sweep(g, cfg).results;
    REQUIRE(results.size() == 4);
    const auto curve = aggregate(results, Metric::RCustomers, Axis::ByDiscount, 0.5, MetricSource::MonteCarlo);
    REQUIRE(curve.points.size() == 2);
    for (std::size_t k = 0; k < 2; ++k) {
        // u = 0 cells carry no ratio, so the mean is the u = 0.5 cell's value
        const auto& with_users = results[2 + k];
        CHECK(with_users.cell.u == 0.5);
        CHECK(curve.points[k].mean == *with_users.r_customers_mc);
    }

    SweepGrid none = g;
    none.u = {0.0, 0.0, 0.1};
    const auto empty_mc = run_sweep(none, cfg).results;
    const auto nan_curve = aggregate(empty_mc, Metric::RMargin, Axis::ByDiscount, 0.5, MetricSource::MonteCarlo);
    for (const auto& p : nan_curve.points) CHECK(std::isnan(p.mean));
}

TEST_CASE("empirical break-even follows the analytic frontier") {
    const auto& results = default_results();
    const auto curve = empirical_breakeven(results, 0.5);
    REQUIRE(curve.points.size() == 31);
    const auto& first = curve.points.front();
    CHECK(first.pi == 0.1);
    REQUIRE(first.intervals.size() == 1);
    // the grid starts at d = 0.1, above the analytic lower root 0.0941
    CHECK(std::abs(first.intervals[0].lo - 0.094117) <= 0.02);
    CHECK(std::abs(first.intervals[0].hi - 0.355413) <= 0.02);

    for (const auto& p : empirical_breakeven(results, 0.3).points) CHECK(p.intervals.empty());
}

TEST_CASE("empirical intervals bracket the analytic ones within one grid step") {
    const double h = 0.02;
    const auto& results = default_results();
    const auto pis = AxisRange{}.points();
    const DiscountLaw law;
    for (double m : {0.3, 0.4, 0.5}) {
        const auto empirical = empirical_breakeven(results, m);
        const auto analytic = analytic_breakeven_curve(m, pis, law, IntentionUpdateRule::Multiplicative,
                                                       MarginAccounting::DiscountAllDisplayBuyers, {0.1, 0.7});
        REQUIRE(empirical.points.size() == analytic.points.size());
        for (std::size_t i = 0; i < pis.size(); ++i) {
            const auto& e = empirical.points[i].intervals;
            const auto& a = analytic.points[i].intervals;
            auto covered = [](const std::vector<ProfitInterval>& ivs, double lo, double hi) {
                for (const auto& iv : ivs) {
                    if (iv.lo <= lo && hi <= iv.hi) return true;
                }
                return false;
            };
            for (const auto& iv : a) {
                if (iv.hi - iv.lo > 2 * h) CHECK(covered(e, iv.lo + h, iv.hi - h));
            }
            for (const auto& iv : e) {
                bool inside = false;
                for (const auto& ai : a) inside |= (ai.lo - h <= iv.lo && iv.hi <= ai.hi + h);
                CHECK(inside);
            }
        }
    }
}

TEST_CASE("empirical break-even on a synthetic all-profit grid spans the domain") {
    auto results = analytic_sweep();
    for (auto& r : results) r.analytic.r_margin = 2.0;
    const auto curve = empirical_breakeven(results, 0.4);
    for (const auto& p : curve.points) {
        REQUIRE(p.intervals.size() == 1);
        CHECK(p.intervals[0].lo == 0.1);
        CHECK(p.intervals[0].hi == 0.7);
        CHECK_FALSE(p.intervals[0].lo_is_root);
        CHECK_FALSE(p.intervals[0].hi_is_root);
    }
}

TEST_CASE("profit is available for every intention only with margin at least 0.4") {
    const auto& results = default_results();
    for (double m : {0.3, 0.4, 0.5}) {
        bool every_pi = true;
        for (double pi : AxisRange{}.points()) {
            bool any = false;
            for (const auto& r : results) {
                if (r.cell.m == m && r.cell.pi == pi && r.cell.d < 0.20 && r.analytic.r_margin > 1.0) any = true;
            }
            every_pi = every_pi && any;
        }
        CHECK(every_pi == (m >= 0.4));
    }
    for (const auto& r : results) {
        if (r.cell.m == 0.3) CHECK(r.analytic.r_margin <= 1.0);
    }
}

TEST_CASE("summary extrema equal brute-force extrema of the closed form") {
    const auto s = summary(default_results());
    CHECK(s.cells == 89'373);

    double best = -1e300;
    double worst = 1e300;
    for (double pi : AxisRange{}.points()) {
        for (double d : AxisRange{}.points()) {
            best = std::max(best, oracle::pi_eff_multiplicative(pi, d) / pi);
            for (double m : {0.3, 0.4, 0.5}) worst = std::min(worst, oracle::r_margin_default(pi, m, d));
        }
    }
    REQUIRE(s.r_customers_analytic.max);
    CHECK(s.r_customers_analytic.max->value == doctest::Approx(best).epsilon(1e-14));
    CHECK(s.r_customers_analytic.max->value == doctest::Approx(6.394).epsilon(1e-13));
    CHECK(s.r_customers_analytic.max->cell.pi == 0.1);
    CHECK(s.r_customers_analytic.max->cell.d == 0.7);
    // ties across u and m resolve to the lowest cell index
    CHECK(s.r_customers_analytic.max->cell.u == 0.1);
    CHECK(s.r_customers_analytic.max->cell.m == 0.3);
    CHECK(s.r_customers_analytic.max->cell_index == 90);

    REQUIRE(s.r_margin_analytic.min);
    CHECK(s.r_margin_analytic.min->value == doctest::Approx(worst).epsilon(1e-14));
    CHECK(s.r_margin_analytic.min->value == doctest::Approx(-8.525333333).epsilon(1e-9));
    CHECK(s.r_margin_analytic.min->cell.m == 0.3);
    CHECK_FALSE(s.r_customers_mc.max);
    CHECK(s.cells_missing_mc == 89'373);
}

TEST_CASE("summary tie-breaking does not depend on input order") {
    auto reversed = default_results();
    std::reverse(reversed.begin(), reversed.end());
    const auto s = summary(reversed);
    CHECK(s.r_customers_analytic.max->cell_index == 90);
}

TEST_CASE("summary of a single cell and of nothing") {
    ModelConfig cfg;
    cfg.customers_per_cell = 500;
    const auto r = simulate_cell({0.4, 0.2, 0.3, 0.5}, cfg, 3);
    const std::vector<CellResult> one{r};
    const auto s = summary(one);
    CHECK(s.cells == 1);
    CHECK(s.r_margin_analytic.min->value == r.analytic.r_margin);
    CHECK(s.r_margin_analytic.max->value == r.analytic.r_margin);
    CHECK(s.r_customers_mc.max->value == *r.r_customers_mc);
    CHECK(s.totals.customers == 500);
    CHECK(s.totals.margin_baseline == r.margin_sum_baseline);
    CHECK(s.totals.turnover_display_scenario == r.turnover_display_scenario);
    CHECK_THROWS_AS(summary(std::vector<CellResult>{}), DataError);
}
