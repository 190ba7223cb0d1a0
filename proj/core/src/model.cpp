#include "kiosk/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kiosk/errors.hpp"

namespace kiosk {

namespace {

void require_discount(double d) {
    if (!(d >= 0.0 && d < 1.0)) {
        throw DomainError("discount must lie in [0, 1), got " + std::to_string(d));
    }
}

void require_intention(double pi) {
    if (!(pi > 0.0 && pi <= 1.0)) {
        throw DomainError("purchase intention must lie in (0, 1], got " + std::to_string(pi));
    }
}

}  // namespace

void DiscountLaw::validate() const {
    if (!std::isfinite(slope) || !(slope > 0.0)) {
        throw DomainError("law.slope must be positive");
    }
    if (!std::isfinite(intercept)) {
        throw DomainError("law.intercept must be finite");
    }
    const double r = root();
    if (!(r >= 0.0 && r < 1.0)) {
        throw DomainError("law root -intercept/slope must lie in [0, 1)");
    }
}

std::string_view to_string(IntentionUpdateRule rule) noexcept {
    switch (rule) {
        case IntentionUpdateRule::Multiplicative: return "multiplicative";
        case IntentionUpdateRule::Additive: return "additive";
    }
    return "unknown";
}

std::string_view to_string(MarginAccounting accounting) noexcept {
    switch (accounting) {
        case MarginAccounting::DiscountAllDisplayBuyers: return "discount_all_display_buyers";
        case MarginAccounting::DiscountIncrementalOnly: return "discount_incremental_only";
    }
    return "unknown";
}

std::optional<IntentionUpdateRule> parse_rule(std::string_view name) noexcept {
    for (auto rule : {IntentionUpdateRule::Multiplicative, IntentionUpdateRule::Additive}) {
        if (name == to_string(rule)) return rule;
    }
    return std::nullopt;
}

std::optional<MarginAccounting> parse_accounting(std::string_view name) noexcept {
    for (auto acc : {MarginAccounting::DiscountAllDisplayBuyers,
                     MarginAccounting::DiscountIncrementalOnly}) {
        if (name == to_string(acc)) return acc;
    }
    return std::nullopt;
}

void CellParams::validate() const {
    if (!(u >= 0.0 && u <= 1.0)) throw DomainError("u must lie in [0, 1]");
    if (!(pi > 0.0 && pi <= 1.0)) throw DomainError("pi must lie in (0, 1]");
    if (!(d >= 0.0 && d < 1.0)) throw DomainError("d must lie in [0, 1)");
    if (!(m > 0.0 && m <= 1.0)) throw DomainError("m must lie in (0, 1]");
}

double pii(const DiscountLaw& law, double d) {
    require_discount(d);
    return law.slope * d + law.intercept;
}

double raw_effective_intention(IntentionUpdateRule rule, const DiscountLaw& law, double pi, double d) {
    require_intention(pi);
    const double increase = pii(law, d);
    switch (rule) {
        case IntentionUpdateRule::Multiplicative: return pi * (1.0 + increase);
        case IntentionUpdateRule::Additive: return pi + increase;
    }
    throw DomainError("unknown intention update rule");
}

double effective_intention(IntentionUpdateRule rule, const DiscountLaw& law, double pi, double d) {
    return std::clamp(raw_effective_intention(rule, law, pi, d), 0.0, 1.0);
}

std::optional<double> clamp_threshold(IntentionUpdateRule rule, const DiscountLaw& law, double pi,
                                      double d_max) {
    require_intention(pi);
    double d = 0.0;
    switch (rule) {
        case IntentionUpdateRule::Multiplicative:
            d = (1.0 / pi - 1.0 - law.intercept) / law.slope;
            break;
        case IntentionUpdateRule::Additive:
            d = (1.0 - pi - law.intercept) / law.slope;
            break;
    }
    // Already saturated at d = 0 can only happen with a positive intercept.
    d = std::max(d, 0.0);
    if (d > d_max) return std::nullopt;
    return d;
}

double margin_fraction(MarginAccounting accounting, double pi, double pi_eff, double m, double d) {
    switch (accounting) {
        case MarginAccounting::DiscountAllDisplayBuyers:
            return pi_eff * (m - d);
        case MarginAccounting::DiscountIncrementalOnly:
            if (pi_eff < pi) return pi_eff * m;
            return pi * m + (pi_eff - pi) * (m - d);
    }
    throw DomainError("unknown margin accounting");
}

AnalyticMetrics analytic_metrics(const DiscountLaw& law, IntentionUpdateRule rule,
                                 MarginAccounting accounting, const CellParams& cell) {
    cell.validate();
    AnalyticMetrics out;
    out.pii = pii(law, cell.d);
    const double raw = raw_effective_intention(rule, law, cell.pi, cell.d);
    out.pi_eff = std::clamp(raw, 0.0, 1.0);
    out.clamp_active = raw > 1.0;
    out.r_customers = out.pi_eff / cell.pi;
    out.r_margin = margin_fraction(accounting, cell.pi, out.pi_eff, cell.m, cell.d) / (cell.pi * cell.m);
    return out;
}

}  // namespace kiosk
