#include "kiosk/catalog.hpp"

#include <cmath>
#include <string>

#include "kiosk/errors.hpp"

namespace kiosk {

void Category::validate() const {
    if (!std::isfinite(weight) || !(weight > 0.0)) throw ConfigError("weight", "must be positive");
    if (!std::isfinite(price_mean) || !(price_mean > 0.0)) throw ConfigError("mean", "must be positive");
    if (!std::isfinite(price_std) || !(price_std > 0.0)) throw ConfigError("std", "must be positive");
}

CategoryCatalog::CategoryCatalog(std::vector<Category> categories)
    : categories_(std::move(categories)) {
    if (categories_.empty()) throw ConfigError("catalog", "needs at least one category");
    double total = 0.0;
    for (std::size_t i = 0; i < categories_.size(); ++i) {
        try {
            categories_[i].validate();
        } catch (const ConfigError& e) {
            throw ConfigError("catalog[" + std::to_string(i) + "]." + e.field(), e.message());
        }
        total += categories_[i].weight;
    }
    normalized_.reserve(categories_.size());
    cumulative_.reserve(categories_.size());
    double running = 0.0;
    for (const auto& c : categories_) {
        normalized_.push_back(c.weight / total);
        running += c.weight / total;
        cumulative_.push_back(running);
    }
    cumulative_.back() = 1.0;
}

CategoryCatalog CategoryCatalog::defaults() {
    // Prices from the reference telecom kiosk. Category shares are not
    // published, so every category gets the same weight.
    return CategoryCatalog({
        {"cases and protectors", 1.0, 29.0, 8.0},
        {"GSM accessories", 1.0, 35.0, 8.0},
        {"smartphones and tablets", 1.0, 700.0, 200.0},
        {"hobby & sport", 1.0, 45.0, 10.0},
        {"moto accessories", 1.0, 80.0, 21.0},
        {"electronics", 1.0, 50.0, 13.0},
    });
}

double expected_price(const CategoryCatalog& catalog) {
    double sum = 0.0;
    const auto& w = catalog.normalized_weights();
    for (std::size_t i = 0; i < catalog.size(); ++i) {
        sum += w[i] * catalog[i].price_mean;
    }
    return sum;
}

}  // namespace kiosk
