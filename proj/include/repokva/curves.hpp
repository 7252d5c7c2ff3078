#pragma once

// Flat-curve discounting, survival and annuity helpers. All rates are
// continuously compounded decimals per year and times are in years.

namespace repokva {

inline constexpr double kTradingDaysPerYear = 252.0;
inline constexpr double kCalendarDaysPerYear = 365.0;

struct RatesEnv {
    double r = 0.0;             // risk-free short rate
    double funding_basis = 0.0; // r_f - r
    double r_c = 0.0;           // counterparty senior unsecured rate (earned on v >= 0)
    double s_k = 0.0;           // capital charge spread r_k - r
    double s_p = 0.0;           // repo spread r_p - r_f

    double r_f() const { return r + funding_basis; }
    double r_e() const { return r_c; }

    // Throws std::invalid_argument when an invariant is broken.
    void validate() const;
};

struct HazardCurve {
    double lambda = 0.0;
    double recovery = 0.4;

    void validate() const;
};

double discount_factor(double rate, double t);
double survival_probability(const HazardCurve& curve, double t);

// Credit-triangle intensity: spread / (1 - recovery).
double hazard_from_cds(double spread, double recovery);

// \int_0^T exp(-rate t) Q(t) dt for a flat rate and flat intensity.
double risky_annuity(double discount_rate, const HazardCurve& curve, double maturity);

double trading_days_to_years(double days);
double calendar_days_to_years(double days);

} // namespace repokva
