#pragma once

#include "repokva/curves.hpp"
#include "repokva/economic_capital.hpp"
#include "repokva/gap_loss.hpp"

#include <functional>

namespace repokva {

inline double to_bp(double amount, double principal) { return amount / principal * 1e4; }

// Repo value and its adjustments, in bp of principal.
struct ValuationBreakdown {
    double npv_star = 0.0;
    double cra = 0.0;
    double gap_eva = 0.0;
    double kva = 0.0;
    double npv = 0.0;
    double breakeven_spread = 0.0; // CRA + GAP-EVA + KVA
};

// Risk-free value of the spread leg: s_p N_p \int_0^T e^{-r t} dt.
double npv_star(const RepoTerms& terms, const RatesEnv& env);

// Rate used by the repo ODE when survival weighting enters as discounting: r_c + lambda.
double ode_discount_rate(const RatesEnv& env, const HazardCurve& hazard);

// Closed-form fair value for constant El and N_c:
// v = (s_p N_p - s_k N_c - lambda El) * apv(r_c, lambda, T).
double fair_value_ode(const RepoTerms& terms, const RatesEnv& env, const HazardCurve& hazard, double el,
                      double nc_avg);

// Backward RK4 for dv/dt - rate v + source(t) = 0 with v(T) = 0. Returns v(0).
double fair_value_ode_rk4(const std::function<double(double)>& source, double discount_rate, double maturity,
                          double max_step = 1.0 / 252.0);

struct Breakeven {
    double rate = 0.0;              // r_f + s_k N_c/N_p + lambda El/N_p
    double closed_form_spread = 0.0; // rate - r_f, bp
    double root_spread = 0.0;       // s_p solving npv(s_p) = 0 with CRA included, bp
};

Breakeven breakeven_rate(const RepoTerms& terms, const RatesEnv& env, const HazardCurve& hazard, double el,
                         double nc_avg);

ValuationBreakdown valuation_adjustments(const RepoTerms& terms, const RatesEnv& env, const HazardCurve& hazard,
                                         double el, const ECProfile& profile);

struct CreditDerivativeView {
    double dpv = 0.0;        // fraction of principal
    double apv = 0.0;        // years
    double npv_credit = 0.0; // -dpv + s_p apv, fraction of principal
};

// Default present value and risky annuity on unit notional, by quadrature
// over the cumulative expected-loss schedule E[l(t)] = \int_0^t lambda El(s) Q(s) ds.
CreditDerivativeView dpv_apv(const RepoTerms& terms, const RatesEnv& env, const HazardCurve& hazard,
                             const std::function<double(double)>& el_schedule);

struct RcSchedule {
    double reg_haircut = 0.15;
    double risk_weight = 1.0;
    double capital_ratio = 0.08;
    double roe = 0.10;

    void validate() const;
};

// risk_weight * capital_ratio * N_p * max(reg_haircut - h, 0) / (1 - h).
double regulatory_capital(const RepoTerms& terms, const RcSchedule& rc);

// pv with the RC charge, bp: npv* - CRA - roe * RC * apv(r_c, lambda, T).
double regulatory_capital_value(const RepoTerms& terms, const RatesEnv& env, const HazardCurve& hazard,
                                const RcSchedule& rc);

// risk_weight * capital_ratio that makes pv_RC equal `target_pv_bp` at haircut h.
double calibrate_rc_scale(const RepoTerms& terms, const RatesEnv& env, const HazardCurve& hazard,
                          const RcSchedule& rc, double target_pv_bp);

} // namespace repokva
