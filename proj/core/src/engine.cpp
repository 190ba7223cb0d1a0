#include "kiosk/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "kiosk/errors.hpp"

namespace kiosk {

namespace {

constexpr std::size_t kMaxAxisPoints = 100000;

std::size_t axis_count(const AxisRange& axis) {
    return static_cast<std::size_t>(std::floor((axis.stop - axis.start) / axis.step + 0.5)) + 1;
}

void validate_axis(const AxisRange& axis, const std::string& name, double lo, double hi,
                   bool lo_inclusive, bool hi_inclusive) {
    if (!std::isfinite(axis.start)) throw ConfigError(name + ".start", "must be finite");
    if (!std::isfinite(axis.stop)) throw ConfigError(name + ".stop", "must be finite");
    if (!std::isfinite(axis.step) || !(axis.step > 0.0)) {
        throw ConfigError(name + ".step", "must be positive");
    }
    if (axis.start > axis.stop) throw ConfigError(name + ".stop", "must not be below start");
    if (axis_count(axis) > kMaxAxisPoints) {
        throw ConfigError(name + ".step", "yields more than " + std::to_string(kMaxAxisPoints) + " points");
    }
    for (double v : axis.points()) {
        const bool lo_ok = lo_inclusive ? v >= lo : v > lo;
        const bool hi_ok = hi_inclusive ? v <= hi : v < hi;
        if (!lo_ok || !hi_ok) {
            const std::string range = std::string(lo_inclusive ? "[" : "(") + std::to_string(lo) + ", " +
                                      std::to_string(hi) + (hi_inclusive ? "]" : ")");
            throw ConfigError(v == axis.start ? name + ".start" : name + ".stop",
                              "grid point " + std::to_string(v) + " outside " + range);
        }
    }
}

// Customer visit with the effective intention already resolved.
CustomerRecord visit(RandomStream& stream, const CellParams& cell, const ModelConfig& config,
                     double pi_eff) {
    CustomerRecord rec;
    rec.uses_display = bernoulli(stream, cell.u).success;
    rec.category = sample_category(stream, config.catalog);
    rec.price = sample_price(stream, config.catalog[rec.category]);
    rec.q_buy = stream.uniform();

    rec.bought_baseline = rec.q_buy < cell.pi;
    if (rec.bought_baseline) {
        rec.margin_baseline = rec.price * cell.m;
        rec.turnover_baseline = rec.price;
    }

    if (!rec.uses_display) {
        rec.bought_display_scenario = rec.bought_baseline;
        rec.margin_display_scenario = rec.margin_baseline;
        rec.turnover_display_scenario = rec.turnover_baseline;
        return rec;
    }

    bool full_price = false;
    switch (config.accounting) {
        case MarginAccounting::DiscountAllDisplayBuyers:
            rec.discounted = rec.q_buy < pi_eff;
            break;
        case MarginAccounting::DiscountIncrementalOnly:
            full_price = rec.q_buy < std::min(cell.pi, pi_eff);
            rec.discounted = !full_price && rec.q_buy < pi_eff;
            break;
    }
    rec.bought_display_scenario = full_price || rec.discounted;
    if (rec.discounted) {
        rec.margin_display_scenario = rec.price * (cell.m - cell.d);
        rec.turnover_display_scenario = rec.price * (1.0 - cell.d);
    } else if (full_price) {
        rec.margin_display_scenario = rec.price * cell.m;
        rec.turnover_display_scenario = rec.price;
    }
    return rec;
}

}  // namespace

std::vector<double> AxisRange::points() const {
    const std::size_t n = axis_count(*this);
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double raw = start + static_cast<double>(k) * step;
        out.push_back(std::round(raw * 1e12) / 1e12);
    }
    return out;
}

void SweepGrid::validate() const {
    validate_axis(u, "grid.u", 0.0, 1.0, true, true);
    validate_axis(pi, "grid.pi", 0.0, 1.0, false, true);
    validate_axis(d, "grid.d", 0.0, 1.0, true, false);
    if (margins.empty()) throw ConfigError("grid.margins", "needs at least one margin");
    for (std::size_t i = 0; i < margins.size(); ++i) {
        if (!(margins[i] > 0.0 && margins[i] <= 1.0)) {
            throw ConfigError("grid.margins[" + std::to_string(i) + "]", "must lie in (0, 1]");
        }
    }
}

std::size_t SweepGrid::cell_count() const {
    return axis_count(u) * axis_count(pi) * axis_count(d) * margins.size();
}

void ModelConfig::validate() const {
    try {
        law.validate();
    } catch (const DomainError& e) {
        throw ConfigError("law", e.what());
    }
    if (customers_per_cell < 1) throw ConfigError("customers_per_cell", "must be at least 1");
}

std::vector<IndexedCell> grid_cells(const SweepGrid& grid) {
    const auto us = grid.u.points();
    const auto pis = grid.pi.points();
    const auto ds = grid.d.points();
    std::vector<IndexedCell> cells;
    cells.reserve(us.size() * pis.size() * ds.size() * grid.margins.size());
    std::uint64_t index = 0;
    for (double u : us) {
        for (double pi : pis) {
            for (double d : ds) {
                for (double m : grid.margins) {
                    cells.push_back({index++, CellParams{u, pi, d, m}});
                }
            }
        }
    }
    return cells;
}

void RatioMoments::add(double a, double b) noexcept {
    ++n;
    sum_a += a;
    sum_b += b;
    sum_aa += a * a;
    sum_bb += b * b;
    sum_ab += a * b;
}

std::optional<double> RatioMoments::ratio() const noexcept {
    if (sum_b == 0.0) return std::nullopt;
    return sum_a / sum_b;
}

std::optional<double> RatioMoments::standard_error() const noexcept {
    if (n < 2 || sum_b == 0.0) return std::nullopt;
    const double r = sum_a / sum_b;
    const double count = static_cast<double>(n);
    const double mean_b = sum_b / count;
    const double resid_ss = std::max(0.0, sum_aa - 2.0 * r * sum_ab + r * r * sum_bb);
    const double variance = resid_ss / (count - 1.0);
    return std::sqrt(variance / count) / std::abs(mean_b);
}

CustomerRecord simulate_customer(RandomStream& stream, const CellParams& cell, const ModelConfig& config) {
    cell.validate();
    return visit(stream, cell, config, effective_intention(config.rule, config.law, cell.pi, cell.d));
}

CellResult simulate_cell(const CellParams& cell, const ModelConfig& config, std::uint64_t cell_index) {
    CellResult out;
    out.cell = cell;
    out.cell_index = cell_index;
    out.analytic = analytic_metrics(config.law, config.rule, config.accounting, cell);
    out.seed = derive_cell_seed(config.master_seed, cell_index);

    RandomStream stream(out.seed);
    RatioMoments buyers;
    RatioMoments margin;
    for (std::uint64_t i = 0; i < config.customers_per_cell; ++i) {
        const CustomerRecord rec = visit(stream, cell, config, out.analytic.pi_eff);
        ++out.customers;
        out.buyers_baseline += rec.bought_baseline;
        out.buyers_display_scenario += rec.bought_display_scenario;
        out.margin_sum_baseline += rec.margin_baseline;
        out.margin_sum_display_scenario += rec.margin_display_scenario;
        out.turnover_baseline += rec.turnover_baseline;
        out.turnover_display_scenario += rec.turnover_display_scenario;
        if (rec.uses_display) {
            ++out.display_users;
            out.buyers_among_display_users += rec.bought_display_scenario;
            out.counterfactual_buyers_among_display_users += rec.bought_baseline;
            out.display_margin_realized += rec.margin_display_scenario;
            out.display_margin_counterfactual += rec.margin_baseline;
            buyers.add(rec.bought_display_scenario ? 1.0 : 0.0, rec.bought_baseline ? 1.0 : 0.0);
            margin.add(rec.margin_display_scenario, rec.margin_baseline);
        }
    }
    out.r_customers_mc = buyers.ratio();
    out.r_margin_mc = margin.ratio();
    out.se_r_customers_mc = buyers.standard_error();
    out.se_r_margin_mc = margin.standard_error();
    return out;
}

SweepOutcome run_sweep(const SweepGrid& grid, const ModelConfig& config, const SweepOptions& options) {
    grid.validate();
    config.validate();
    const std::vector<IndexedCell> cells = grid_cells(grid);
    const std::size_t total = cells.size();

    std::vector<std::optional<CellResult>> slots(total);
    std::vector<std::string> errors(total);

    unsigned workers = options.parallelism;
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(total, 1)));

    constexpr std::size_t kChunk = 64;
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex progress_mutex;

    auto work = [&] {
        for (;;) {
            const std::size_t begin = next.fetch_add(kChunk);
            if (begin >= total) return;
            const std::size_t end = std::min(total, begin + kChunk);
            for (std::size_t i = begin; i < end; ++i) {
                try {
                    slots[i] = options.simulate ? options.simulate(cells[i].params, config, cells[i].index)
                                                : simulate_cell(cells[i].params, config, cells[i].index);
                } catch (const std::exception& e) {
                    errors[i] = e.what();
                    if (errors[i].empty()) errors[i] = "unknown error";
                }
            }
            const std::size_t finished = done.fetch_add(end - begin) + (end - begin);
            if (options.progress) {
                std::lock_guard lock(progress_mutex);
                options.progress(finished, total);
            }
        }
    };

    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    SweepOutcome outcome;
    outcome.results.reserve(total);
    for (std::size_t i = 0; i < total; ++i) {
        if (slots[i]) {
            outcome.results.push_back(std::move(*slots[i]));
        } else {
            outcome.failures.push_back({cells[i].index, errors[i]});
        }
    }
    return outcome;
}

}  // namespace kiosk
