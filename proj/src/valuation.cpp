#include "repokva/valuation.hpp"

#include "repokva/errors.hpp"
#include "repokva/numerics.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace repokva {

namespace {

// \int_t^T e^{-rate (s - t)} ds
double flat_annuity(double rate, double tenor) { return risky_annuity(rate, HazardCurve{0.0, 0.0}, tenor); }

double counterparty_risk_adjustment(const RepoTerms& terms, const RatesEnv& env) {
    const double T = terms.maturity;
    const double spread_leg = env.s_p * terms.principal;
    auto integrand = [&](double s) {
        const double v_star = spread_leg * flat_annuity(env.r, T - s);
        return (env.r_e() - env.r) * v_star * std::exp(-env.r_e() * s);
    };
    return adaptive_simpson(integrand, 0.0, T, 200, 1e-16 * terms.principal, 8);
}

double capital_charge_pv(const RatesEnv& env, const HazardCurve& hazard, const ECProfile& profile) {
    std::vector<double> weighted(profile.nc.size());
    for (std::size_t i = 0; i < weighted.size(); ++i) {
        const double s = profile.times[i];
        weighted[i] = profile.nc[i] * std::exp(-env.r_e() * s) * survival_probability(hazard, s);
    }
    return env.s_k * trapezoid(profile.times, weighted);
}

} // namespace

double npv_star(const RepoTerms& terms, const RatesEnv& env) {
    return env.s_p * terms.principal * flat_annuity(env.r, terms.maturity);
}

double ode_discount_rate(const RatesEnv& env, const HazardCurve& hazard) { return env.r_e() + hazard.lambda; }

double fair_value_ode(const RepoTerms& terms, const RatesEnv& env, const HazardCurve& hazard, double el,
                      double nc_avg) {
    const double apv = risky_annuity(env.r_e(), hazard, terms.maturity);
    return (env.s_p * terms.principal - env.s_k * nc_avg - hazard.lambda * el) * apv;
}

double fair_value_ode_rk4(const std::function<double(double)>& source, double discount_rate, double maturity,
                          double max_step) {
    if (!(maturity > 0.0)) throw std::invalid_argument("fair_value_ode_rk4: maturity must be > 0");
    if (!(max_step > 0.0)) throw std::invalid_argument("fair_value_ode_rk4: max_step must be > 0");
    const auto n = static_cast<std::int64_t>(std::ceil(maturity / max_step - 1e-12));
    const double h = maturity / static_cast<double>(n);
    // dv/dt = rate v - source(t), integrated from T down to 0.
    auto deriv = [&](double t, double v) { return discount_rate * v - source(t); };
    double v = 0.0;
    for (std::int64_t i = n; i > 0; --i) {
        const double t = static_cast<double>(i) * h;
        const double k1 = deriv(t, v);
        const double k2 = deriv(t - 0.5 * h, v - 0.5 * h * k1);
        const double k3 = deriv(t - 0.5 * h, v - 0.5 * h * k2);
        const double k4 = deriv(t - h, v - h * k3);
        v -= h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return v;
}

Breakeven breakeven_rate(const RepoTerms& terms, const RatesEnv& env, const HazardCurve& hazard, double el,
                         double nc_avg) {
    const double np = terms.principal;
    if (!(np > 0.0)) throw std::invalid_argument("breakeven_rate: principal must be > 0");
    Breakeven out;
    const double running = env.s_k * nc_avg / np + hazard.lambda * el / np;
    out.rate = env.r_f() + running;
    out.closed_form_spread = running * 1e4;

    const double apv = risky_annuity(env.r_e(), hazard, terms.maturity);
    const double charges = (env.s_k * nc_avg + hazard.lambda * el) * apv;
    auto npv_at = [&](double s_p) {
        RatesEnv e = env;
        e.s_p = s_p;
        return npv_star(terms, e) - counterparty_risk_adjustment(terms, e) - charges;
    };
    if (charges == 0.0) return out;
    double hi = 2.0 * running + 1e-4;
    for (int i = 0; npv_at(hi) < 0.0; ++i) {
        if (i > 60) throw NumericalError("breakeven_rate: could not bracket the break-even spread");
        hi *= 2.0;
    }
    std::uintmax_t iters = 200;
    boost::math::tools::eps_tolerance<double> tol(50);
    const auto [lo_s, hi_s] = boost::math::tools::toms748_solve(npv_at, 0.0, hi, npv_at(0.0), npv_at(hi), tol, iters);
    out.root_spread = 0.5 * (lo_s + hi_s) * 1e4;
    return out;
}

ValuationBreakdown valuation_adjustments(const RepoTerms& terms, const RatesEnv& env, const HazardCurve& hazard,
                                         double el, const ECProfile& profile) {
    if (profile.times.size() < 2 || profile.times.front() > 0.0 || profile.times.back() < terms.maturity)
        throw std::invalid_argument("valuation_adjustments: profile must cover [0, T]");
    const double np = terms.principal;
    ValuationBreakdown b;
    b.npv_star = to_bp(npv_star(terms, env), np);
    b.cra = to_bp(counterparty_risk_adjustment(terms, env), np);
    b.gap_eva = to_bp(hazard.lambda * el * risky_annuity(env.r_e(), hazard, terms.maturity), np);
    b.kva = to_bp(capital_charge_pv(env, hazard, profile), np);
    b.npv = b.npv_star - b.cra - b.gap_eva - b.kva;
    b.breakeven_spread = b.cra + b.gap_eva + b.kva;
    return b;
}

CreditDerivativeView dpv_apv(const RepoTerms& terms, const RatesEnv& env, const HazardCurve& hazard,
                             const std::function<double(double)>& el_schedule) {
    const double T = terms.maturity;
    if (!(T > 0.0)) throw std::invalid_argument("dpv_apv: maturity must be > 0");
    const double np = terms.principal;
    auto beta = [&](double t) { return discount_factor(env.r, t); };
    auto loss_rate = [&](double s) { return hazard.lambda * el_schedule(s) / np * survival_probability(hazard, s); };
    // Cumulative expected loss E[l(t)], tabulated on a fine grid.
    constexpr int kSteps = 2000;
    const double h = T / kSteps;
    std::vector<double> t(kSteps + 1), cum(kSteps + 1, 0.0);
    for (int i = 0; i <= kSteps; ++i) t[i] = i * h;
    for (int i = 1; i <= kSteps; ++i)
        cum[i] = cum[i - 1] + adaptive_simpson(loss_rate, t[i - 1], t[i], 1, 1e-16, 4);
    // dpv = beta(T) E[l(T)] - \int E[l(t)] dbeta(t), with dbeta = -r beta dt.
    std::vector<double> integrand(kSteps + 1);
    for (int i = 0; i <= kSteps; ++i) integrand[i] = cum[i] * env.r * beta(t[i]);
    CreditDerivativeView out;
    out.dpv = beta(T) * cum.back() + trapezoid(t, integrand);
    out.apv = adaptive_simpson([&](double s) { return beta(s) * survival_probability(hazard, s); }, 0.0, T, 200,
                               1e-15, 6);
    out.npv_credit = -out.dpv + env.s_p * out.apv;
    return out;
}

void RcSchedule::validate() const {
    if (!(reg_haircut >= 0.0 && reg_haircut < 1.0))
        throw std::invalid_argument("RcSchedule: reg_haircut must lie in [0, 1)");
    if (!(risk_weight >= 0.0) || !(capital_ratio >= 0.0) || !(roe >= 0.0))
        throw std::invalid_argument("RcSchedule: risk_weight, capital_ratio and roe must be >= 0");
}

double regulatory_capital(const RepoTerms& terms, const RcSchedule& rc) {
    const double h = terms.haircut;
    return rc.risk_weight * rc.capital_ratio * terms.principal * std::max(rc.reg_haircut - h, 0.0) / (1.0 - h);
}

double regulatory_capital_value(const RepoTerms& terms, const RatesEnv& env, const HazardCurve& hazard,
                                const RcSchedule& rc) {
    const double apv = risky_annuity(env.r_e(), hazard, terms.maturity);
    const double pv = npv_star(terms, env) - counterparty_risk_adjustment(terms, env) -
                      rc.roe * regulatory_capital(terms, rc) * apv;
    return to_bp(pv, terms.principal);
}

double calibrate_rc_scale(const RepoTerms& terms, const RatesEnv& env, const HazardCurve& hazard,
                          const RcSchedule& rc, double target_pv_bp) {
    RcSchedule unit = rc;
    unit.risk_weight = 1.0;
    unit.capital_ratio = 1.0;
    const double uncharged = regulatory_capital_value(terms, env, hazard, RcSchedule{rc.reg_haircut, 0.0, 0.0, rc.roe});
    const double per_unit = uncharged - regulatory_capital_value(terms, env, hazard, unit);
    if (per_unit <= 0.0) throw NumericalError("calibrate_rc_scale: haircut carries no regulatory charge");
    return (uncharged - target_pv_bp) / per_unit;
}

} // namespace repokva
