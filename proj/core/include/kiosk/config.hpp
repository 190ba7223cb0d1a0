#pragma once
/**
 * @file config.hpp
 * @brief JSON run configuration.
 *
 * Schema (every key optional, defaults in parentheses):
 *
 *     {
 *       "law": {"slope": 8.52, "intercept": -0.57},
 *       "rule": "multiplicative" | "additive",
 *       "accounting": "discount_all_display_buyers" | "discount_incremental_only",
 *       "catalog": [{"name": "...", "weight": 1, "mean": 29, "std": 8}, ...],
 *       "grid": {
 *         "u":  {"start": 0.1, "stop": 0.7, "step": 0.02},
 *         "pi": {...}, "d": {...},
 *         "margins": [0.3, 0.4, 0.5]
 *       },
 *       "customers_per_cell": 1000,
 *       "master_seed": 20210616
 *     }
 *
 * Unknown keys are rejected so that typos do not silently fall back to
 * defaults.
 */

#include <filesystem>
#include <string>
#include <string_view>

#include "kiosk/engine.hpp"

namespace kiosk {

struct RunConfig {
    ModelConfig model;
    SweepGrid grid;

    void validate() const {
        model.validate();
        grid.validate();
    }
};

/// Parses and validates; throws ConfigError whose field() is a dotted path
/// such as "grid.d.step" or "catalog[2].std".
RunConfig parse_run_config(std::string_view json_text);

/// Reads a config file; IoError when unreadable, ConfigError when invalid.
RunConfig load_run_config(const std::filesystem::path& path);

/// Full snapshot with every field explicit. Parsing it back reproduces the
/// configuration exactly.
std::string run_config_to_json(const RunConfig& config, int indent = 2);

}  // namespace kiosk
