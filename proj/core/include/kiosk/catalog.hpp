#pragma once

#include <string>
#include <vector>

namespace kiosk {

/// A product category with a popularity weight and a normal price model.
struct Category {
    std::string name;
    double weight = 1.0;
    double price_mean = 1.0;
    double price_std = 1.0;

    void validate() const;
    /// True when price_mean / price_std < 2, where positive truncation of the
    /// normal visibly biases the sampled prices upward.
    bool truncation_warning() const noexcept { return price_mean < 2.0 * price_std; }
};

class CategoryCatalog {
public:
    /// Throws ConfigError when empty or when any category is invalid.
    explicit CategoryCatalog(std::vector<Category> categories);

    /// Six telecom-kiosk categories with equal weights.
    static CategoryCatalog defaults();

    const std::vector<Category>& categories() const noexcept { return categories_; }
    std::size_t size() const noexcept { return categories_.size(); }
    const Category& operator[](std::size_t i) const { return categories_.at(i); }

    /// Weights scaled to sum to 1.
    const std::vector<double>& normalized_weights() const noexcept { return normalized_; }
    /// Running sum of normalized weights; the last entry is exactly 1.
    const std::vector<double>& cumulative_weights() const noexcept { return cumulative_; }

private:
    std::vector<Category> categories_;
    std::vector<double> normalized_;
    std::vector<double> cumulative_;
};

/// Weighted mean list price. Ignores the small upward bias from positive
/// truncation of each category's normal.
double expected_price(const CategoryCatalog& catalog);

}  // namespace kiosk
