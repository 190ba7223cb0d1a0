#pragma once
/**
 * @file model.hpp
 * @brief Behavioral laws of the kiosk discount model and their closed-form
 *        per-display-user expectations.
 *
 * A customer who uses the display is offered a discount `d`. The discount
 * raises the purchase intention through a linear law
 *
 *     pii(d) = slope * d + intercept        (default 8.52 * d - 0.57)
 *
 * and the raised intention is composed with the initial intention `pi` by an
 * IntentionUpdateRule, then clamped to [0, 1]. All relative metrics are per
 * display user, so the display-usage share `u` cancels out of them.
 */

#include <optional>
#include <string>
#include <string_view>

namespace kiosk {

struct DiscountLaw {
    double slope = 8.52;
    double intercept = -0.57;

    /// Throws DomainError unless slope > 0 and the root lies in [0, 1).
    void validate() const;

    /// Discount at which the increase is exactly zero.
    double root() const noexcept { return -intercept / slope; }
};

enum class IntentionUpdateRule {
    Multiplicative,  ///< pi_eff = pi * (1 + pii)
    Additive,        ///< pi_eff = pi + pii
};

enum class MarginAccounting {
    DiscountAllDisplayBuyers,  ///< every buying display user pays the discounted price
    DiscountIncrementalOnly,   ///< only buyers beyond the baseline intention get the discount
};

std::string_view to_string(IntentionUpdateRule rule) noexcept;
std::string_view to_string(MarginAccounting accounting) noexcept;
/// Parses the names produced by to_string; nullopt for anything else.
std::optional<IntentionUpdateRule> parse_rule(std::string_view name) noexcept;
std::optional<MarginAccounting> parse_accounting(std::string_view name) noexcept;

/// One point of the (u, pi, d, m) grid.
struct CellParams {
    double u = 0.0;   ///< display-usage probability, [0, 1]
    double pi = 0.0;  ///< initial purchase intention, (0, 1]
    double d = 0.0;   ///< discount fraction, [0, 1)
    double m = 0.0;   ///< margin (overhead) fraction, (0, 1]

    /// Throws DomainError naming the first out-of-range field.
    void validate() const;
};

struct AnalyticMetrics {
    double pii = 0.0;
    double pi_eff = 0.0;
    double r_customers = 0.0;
    double r_margin = 0.0;
    bool clamp_active = false;
};

/// Purchase intention increase for discount `d` in [0, 1). May be negative
/// below the law's root.
double pii(const DiscountLaw& law, double d);

/// Post-discount purchase probability, clamped to [0, 1].
double effective_intention(IntentionUpdateRule rule, const DiscountLaw& law, double pi, double d);

/// Effective intention before clamping.
double raw_effective_intention(IntentionUpdateRule rule, const DiscountLaw& law, double pi, double d);

/**
 * Smallest discount at which the effective intention saturates at 1.
 *
 * Returns nullopt ("never in domain") when that discount exceeds `d_max`
 * (the sweep maximum, 0.7 by default).
 */
std::optional<double> clamp_threshold(IntentionUpdateRule rule, const DiscountLaw& law, double pi,
                                      double d_max = 0.7);

/**
 * Expected margin per display user per unit price.
 *
 * A discounted sale keeps fraction (m - d) of the list price, a full-price
 * sale keeps m.
 *  - DiscountAllDisplayBuyers: pi_eff * (m - d)
 *  - DiscountIncrementalOnly:  pi * m + (pi_eff - pi) * (m - d)
 *
 * For the incremental variant with pi_eff < pi (negative increase) the
 * baseline buyers beyond pi_eff are lost at full margin, giving pi_eff * m.
 */
double margin_fraction(MarginAccounting accounting, double pi, double pi_eff, double m, double d);

/// All closed-form metrics of one cell. Bit-identical for any `cell.u`.
AnalyticMetrics analytic_metrics(const DiscountLaw& law, IntentionUpdateRule rule,
                                 MarginAccounting accounting, const CellParams& cell);

}  // namespace kiosk
