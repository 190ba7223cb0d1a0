#include "kiosk/breakeven.hpp"

#include <cmath>
#include <string>

#include "kiosk/errors.hpp"

namespace kiosk {

namespace {

struct ExcessMargin {
    double m;
    double pi;
    const DiscountLaw& law;
    IntentionUpdateRule rule;
    MarginAccounting accounting;

    // r_margin(d) - 1
    double operator()(double d) const {
        const double pi_eff = effective_intention(rule, law, pi, d);
        return margin_fraction(accounting, pi, pi_eff, m, d) / (pi * m) - 1.0;
    }
};

// `below` has f <= 0, `above` has f > 0; shrinks the bracket to `tolerance`.
double bisect_crossing(const ExcessMargin& f, double below, double above, double tolerance) {
    for (int iter = 0; iter < 200 && std::abs(above - below) > tolerance; ++iter) {
        const double mid = 0.5 * (below + above);
        if (mid == below || mid == above) break;
        if (f(mid) > 0.0) {
            above = mid;
        } else {
            below = mid;
        }
    }
    return 0.5 * (below + above);
}

}  // namespace

std::vector<ProfitInterval> breakeven(double m, double pi, const DiscountLaw& law,
                                      IntentionUpdateRule rule, MarginAccounting accounting,
                                      DiscountDomain domain, BreakEvenOptions options) {
    law.validate();
    if (!(m > 0.0 && m <= 1.0)) throw DomainError("margin must lie in (0, 1]");
    if (!(pi > 0.0 && pi <= 1.0)) throw DomainError("purchase intention must lie in (0, 1]");
    if (!(domain.lo >= 0.0 && domain.hi < 1.0 && domain.lo < domain.hi)) {
        throw DomainError("discount domain must satisfy 0 <= lo < hi < 1");
    }
    if (!(options.scan_step > 0.0) || !(options.tolerance > 0.0)) {
        throw DomainError("scan step and tolerance must be positive");
    }

    const ExcessMargin f{m, pi, law, rule, accounting};
    const auto steps = static_cast<long>(std::ceil((domain.hi - domain.lo) / options.scan_step));

    std::vector<ProfitInterval> intervals;
    std::optional<ProfitInterval> open;

    double prev_d = domain.lo;
    double prev_f = f(prev_d);
    if (prev_f > 0.0) open = ProfitInterval{domain.lo, domain.lo, false, false};

    for (long k = 1; k <= steps; ++k) {
        const double d = (k == steps) ? domain.hi : domain.lo + static_cast<double>(k) * options.scan_step;
        const double fd = f(d);
        const bool was_profit = prev_f > 0.0;
        const bool is_profit = fd > 0.0;
        if (!was_profit && is_profit) {
            const double root = (prev_f == 0.0) ? prev_d : bisect_crossing(f, prev_d, d, options.tolerance);
            open = ProfitInterval{root, root, true, false};
        } else if (was_profit && !is_profit) {
            const double root = (fd == 0.0) ? d : bisect_crossing(f, d, prev_d, options.tolerance);
            open->hi = root;
            open->hi_is_root = true;
            intervals.push_back(*open);
            open.reset();
        }
        prev_d = d;
        prev_f = fd;
    }
    if (open) {
        open->hi = domain.hi;
        open->hi_is_root = false;
        intervals.push_back(*open);
    }
    return intervals;
}

std::optional<std::pair<double, double>> unclamped_breakeven_roots(double m, const DiscountLaw& law) {
    const double a = law.slope;
    const double b = -(law.slope * m - (1.0 + law.intercept));
    const double c = -law.intercept * m;
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return std::nullopt;
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    double r1 = q / a;
    double r2 = (q != 0.0) ? c / q : r1;
    if (r1 > r2) std::swap(r1, r2);
    return std::make_pair(r1, r2);
}

}  // namespace kiosk
