#pragma once

#include "repokva/collateral_model.hpp"

namespace repokva {

struct RepoTerms {
    double principal = 1.0;    // N_p
    double haircut = 0.0;      // h in [0, 1)
    double liq_discount = 0.0; // g in [0, 1)
    double recovery = 0.4;     // R in [0, 1)
    double maturity = 1.0;     // T, years
    double mpr = 10.0 / 252.0; // u, years
    double confidence = 0.999; // q in (0.5, 1)

    void validate() const;

    // (1 - g) / (1 - h): collateral recovered per unit of lent principal per unit return.
    double coverage_ratio() const { return (1.0 - liq_discount) / (1.0 - haircut); }
    // (1 - R) N_p: the largest possible settlement loss.
    double loss_cap() const { return (1.0 - recovery) * principal; }
    // Gross return at or above which settlement is loss free.
    double breakeven_return() const { return 1.0 / coverage_ratio(); }
};

// Lender loss at default settlement for a collateral gross return x over the MPR:
// (1 - R) N_p max(0, 1 - (1-g)/(1-h) x).
double settlement_loss(const RepoTerms& terms, double x);

// El: sample average of the settlement loss.
double expected_loss(const RepoTerms& terms, const ReturnDistribution& dist);

// Pr(l > y) on the empirical distribution (strict exceedance).
double loss_tail(const RepoTerms& terms, const ReturnDistribution& dist, double y);

// E[(l - b)^+], exact on the empirical distribution via prefix sums.
double expected_excess_loss(const RepoTerms& terms, const ReturnDistribution& dist, double b);

} // namespace repokva
