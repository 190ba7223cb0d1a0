#pragma once
/**
 * @file engine.hpp
 * @brief Monte Carlo simulation of kiosk visits and the parameter sweep.
 *
 * Each cell of the (u, pi, d, m) grid is simulated with its own random
 * stream, seeded by derive_cell_seed(master_seed, cell_index). A single
 * uniform per customer decides the purchase in both the no-display baseline
 * and the display scenario (common random numbers), so display-scenario
 * buyers are a superset of baseline buyers whenever pii >= 0.
 *
 * Per customer the stream is consumed in a fixed order: display usage,
 * category, price (one or more normals), purchase uniform.
 */

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kiosk/catalog.hpp"
#include "kiosk/model.hpp"
#include "kiosk/random.hpp"

namespace kiosk {

/// Inclusive arithmetic progression start, start + step, ..., stop.
struct AxisRange {
    double start = 0.10;
    double stop = 0.70;
    double step = 0.02;

    /// Points start + k*step for every k with start + k*step <= stop + step/2.
    /// Each point is snapped to the nearest multiple of 1e-12 so that, e.g.,
    /// the 16th default point is the double nearest 0.4.
    std::vector<double> points() const;
};

struct SweepGrid {
    AxisRange u;
    AxisRange pi;
    AxisRange d;
    std::vector<double> margins{0.3, 0.4, 0.5};

    /// Throws ConfigError naming e.g. "grid.d.step".
    void validate() const;
    std::size_t cell_count() const;
};

struct ModelConfig {
    DiscountLaw law;
    IntentionUpdateRule rule = IntentionUpdateRule::Multiplicative;
    MarginAccounting accounting = MarginAccounting::DiscountAllDisplayBuyers;
    CategoryCatalog catalog = CategoryCatalog::defaults();
    std::uint64_t customers_per_cell = 1000;
    std::uint64_t master_seed = 20210616;

    void validate() const;
};

struct IndexedCell {
    std::uint64_t index = 0;
    CellParams params;
};

/// Row-major enumeration: u outermost, then pi, then d, margin innermost.
std::vector<IndexedCell> grid_cells(const SweepGrid& grid);

/// Streaming sums for a ratio-of-sums estimator sum(a) / sum(b).
struct RatioMoments {
    std::uint64_t n = 0;
    double sum_a = 0.0;
    double sum_b = 0.0;
    double sum_aa = 0.0;
    double sum_bb = 0.0;
    double sum_ab = 0.0;

    void add(double a, double b) noexcept;
    std::optional<double> ratio() const noexcept;
    /// Delta-method standard error of the ratio; nullopt when n < 2 or
    /// sum(b) == 0.
    std::optional<double> standard_error() const noexcept;
};

struct CustomerRecord {
    bool uses_display = false;
    std::size_t category = 0;
    double price = 0.0;
    double q_buy = 0.0;
    bool bought_baseline = false;
    bool bought_display_scenario = false;
    bool discounted = false;
    double margin_baseline = 0.0;
    double margin_display_scenario = 0.0;
    double turnover_baseline = 0.0;
    double turnover_display_scenario = 0.0;
};

/// One customer visit, evaluated under both scenarios with shared draws.
CustomerRecord simulate_customer(RandomStream& stream, const CellParams& cell,
                                 const ModelConfig& config);

struct CellResult {
    CellParams cell;
    std::uint64_t cell_index = 0;
    std::uint64_t customers = 0;
    std::uint64_t display_users = 0;
    std::uint64_t buyers_baseline = 0;
    std::uint64_t buyers_display_scenario = 0;
    std::uint64_t buyers_among_display_users = 0;
    std::uint64_t counterfactual_buyers_among_display_users = 0;
    double margin_sum_baseline = 0.0;
    double margin_sum_display_scenario = 0.0;
    double turnover_baseline = 0.0;
    double turnover_display_scenario = 0.0;
    /// Margin realized by display users, and what they would have produced
    /// at full price with intention pi.
    double display_margin_realized = 0.0;
    double display_margin_counterfactual = 0.0;
    std::optional<double> r_customers_mc;
    std::optional<double> r_margin_mc;
    std::optional<double> se_r_customers_mc;
    std::optional<double> se_r_margin_mc;
    AnalyticMetrics analytic;
    std::uint64_t seed = 0;
};

/// Simulates config.customers_per_cell visits with the stream seeded by
/// derive_cell_seed(config.master_seed, cell_index).
CellResult simulate_cell(const CellParams& cell, const ModelConfig& config,
                         std::uint64_t cell_index);

struct CellFailure {
    std::uint64_t cell_index = 0;
    std::string message;
};

struct SweepOptions {
    /// Worker threads; 0 selects std::thread::hardware_concurrency().
    unsigned parallelism = 1;
    /// Called with (cells done, total) from worker threads; must be thread safe.
    std::function<void(std::size_t, std::size_t)> progress;
    /// Replaces simulate_cell when set (e.g. analytic-only sweeps).
    std::function<CellResult(const CellParams&, const ModelConfig&, std::uint64_t)> simulate;
};

struct SweepOutcome {
    std::vector<CellResult> results;  ///< ascending cell_index, failed cells omitted
    std::vector<CellFailure> failures;
};

/// Simulates every grid cell. Output is independent of `options.parallelism`.
SweepOutcome run_sweep(const SweepGrid& grid, const ModelConfig& config,
                       const SweepOptions& options = {});

}  // namespace kiosk
