#pragma once
/**
 * @file breakeven.hpp
 * @brief Discount intervals over which the display scenario beats the
 *        no-display baseline (r_margin > 1).
 *
 * The solver is numeric: r_margin(d) - 1 is scanned on a fine grid for sign
 * changes and each change is refined by bisection. r_margin is piecewise
 * smooth with at most one kink (at the clamp threshold), so the scan cannot
 * miss a pair of roots closer than the scan step only where the function is
 * tangent to 1.
 */

#include <optional>
#include <utility>
#include <vector>

#include "kiosk/model.hpp"

namespace kiosk {

struct DiscountDomain {
    double lo = 0.0;
    double hi = 0.7;
};

/// Maximal open interval of profitable discounts.
struct ProfitInterval {
    double lo = 0.0;
    double hi = 0.0;
    /// False when the endpoint is a domain boundary rather than a root.
    bool lo_is_root = false;
    bool hi_is_root = false;
};

struct BreakEvenOptions {
    double scan_step = 1e-3;
    double tolerance = 1e-12;
};

/// Every maximal sub-interval of `domain` where r_margin(d) > 1. Empty when
/// no discount is profitable.
std::vector<ProfitInterval> breakeven(double m, double pi, const DiscountLaw& law,
                                      IntentionUpdateRule rule, MarginAccounting accounting,
                                      DiscountDomain domain = {}, BreakEvenOptions options = {});

/**
 * Closed-form roots of r_margin(d) = 1 for the multiplicative rule with
 * all display buyers discounted, ignoring clamping:
 *
 *     slope*d^2 - (slope*m - (1 + intercept))*d + (-intercept)*m = 0
 *
 * Returns the roots in ascending order, or nullopt when the discriminant is
 * negative.
 */
std::optional<std::pair<double, double>> unclamped_breakeven_roots(double m, const DiscountLaw& law);

}  // namespace kiosk
