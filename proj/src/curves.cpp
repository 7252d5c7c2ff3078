#include "repokva/curves.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace repokva {

namespace {

void require_time(double t, const char* what) {
    if (!(t >= 0.0) || !std::isfinite(t))
        throw std::invalid_argument(std::string(what) + ": time must be finite and >= 0");
}

} // namespace

void RatesEnv::validate() const {
    for (double x : {r, funding_basis, r_c, s_k, s_p})
        if (!std::isfinite(x)) throw std::invalid_argument("RatesEnv: rates must be finite");
    if (funding_basis < 0.0) throw std::invalid_argument("RatesEnv: r_f must be >= r");
    if (r_c < r) throw std::invalid_argument("RatesEnv: r_c must be >= r");
    if (s_k < 0.0 || s_p < 0.0) throw std::invalid_argument("RatesEnv: s_p and s_k must be >= 0");
}

void HazardCurve::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("HazardCurve: lambda must be finite and >= 0");
    if (!(recovery >= 0.0 && recovery < 1.0))
        throw std::invalid_argument("HazardCurve: recovery must lie in [0, 1)");
}

double discount_factor(double rate, double t) {
    require_time(t, "discount_factor");
    return std::exp(-rate * t);
}

double survival_probability(const HazardCurve& curve, double t) {
    require_time(t, "survival_probability");
    curve.validate();
    return std::exp(-curve.lambda * t);
}

double hazard_from_cds(double spread, double recovery) {
    if (!(recovery >= 0.0 && recovery < 1.0))
        throw std::invalid_argument("hazard_from_cds: recovery must lie in [0, 1)");
    if (!(spread >= 0.0)) throw std::invalid_argument("hazard_from_cds: spread must be >= 0");
    return spread / (1.0 - recovery);
}

double risky_annuity(double discount_rate, const HazardCurve& curve, double maturity) {
    require_time(maturity, "risky_annuity");
    const double a = discount_rate + curve.lambda;
    // expm1 keeps full precision when a*T is tiny; a == 0 is the undiscounted limit.
    if (a == 0.0) return maturity;
    return -std::expm1(-a * maturity) / a;
}

double trading_days_to_years(double days) { return days / kTradingDaysPerYear; }
double calendar_days_to_years(double days) { return days / kCalendarDaysPerYear; }

} // namespace repokva
