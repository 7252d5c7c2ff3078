#include "repokva/commands.hpp"

#include "repokva/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace repokva {

PricingPipeline::PricingPipeline(RunConfig config)
    : config_(std::move(config)),
      dist_(sample_mpr_returns(config_.model, config_.trade.mpr, config_.n_paths, config_.seed)) {}

HedgingErrorModel PricingPipeline::model_at(double haircut) const {
    return HedgingErrorModel(config_.terms_at(haircut), config_.hazard(), dist_, config_.rates.r);
}

HaircutResult PricingPipeline::evaluate(double haircut, RiskMeasure measure) const {
    const HedgingErrorModel model = model_at(haircut);
    HaircutResult res;
    res.haircut = haircut;
    res.measure = measure;
    res.el = model.el();
    const auto grid = uniform_time_grid(model.terms().maturity, config_.grid_points);
    res.profile = ec_profile(model, grid, model.terms().confidence, measure);
    res.breakdown = valuation_adjustments(model.terms(), config_.rates, model.hazard(), res.el, res.profile);
    res.breakeven = breakeven_rate(model.terms(), config_.rates, model.hazard(), res.el, res.profile.average());
    return res;
}

Table cmd_price(const PricingPipeline& pipeline) {
    Table t;
    t.columns = {"haircut", "measure", "npv_star_bp", "cra_bp", "gap_eva_bp", "kva_bp", "npv_bp", "breakeven_bp",
                 "breakeven_running_bp"};
    for (double h : pipeline.config().haircuts) {
        for (RiskMeasure m : pipeline.config().measures) {
            const auto r = pipeline.evaluate(h, m);
            const auto& b = r.breakdown;
            t.add_row({h, std::string(to_string(m)), b.npv_star, b.cra, b.gap_eva, b.kva, b.npv,
                       b.breakeven_spread, r.breakeven.root_spread});
        }
    }
    return t;
}

Table cmd_ec_profile(const PricingPipeline& pipeline) {
    Table t;
    t.columns = {"haircut", "measure", "t", "nc_frac"};
    const double np = pipeline.config().trade.principal;
    for (double h : pipeline.config().haircuts) {
        for (RiskMeasure m : pipeline.config().measures) {
            const auto r = pipeline.evaluate(h, m);
            for (std::size_t i = 0; i < r.profile.times.size(); ++i)
                t.add_row({h, std::string(to_string(m)), r.profile.times[i], r.profile.nc[i] / np});
        }
    }
    return t;
}

Table cmd_haircut_sweep(const PricingPipeline& pipeline) {
    const auto& cfg = pipeline.config();
    const RiskMeasure m = cfg.measures.front();
    Table t;
    t.columns = {"h", "pv_ec_bp", "pv_rc_bp"};
    for (double h : cfg.sweep.haircuts()) {
        const auto r = pipeline.evaluate(h, m);
        const double pv_rc = regulatory_capital_value(cfg.terms_at(h), cfg.rates, cfg.hazard(), cfg.rc);
        t.add_row({h, r.breakdown.npv, pv_rc});
    }
    return t;
}

namespace {

double interp(const std::vector<double>& x, const std::vector<double>& y, double at) {
    if (at <= x.front()) return y.front();
    if (at >= x.back()) return y.back();
    const auto it = std::upper_bound(x.begin(), x.end(), at);
    const std::size_t i = static_cast<std::size_t>(it - x.begin());
    const double w = (at - x[i - 1]) / (x[i] - x[i - 1]);
    return y[i - 1] + w * (y[i] - y[i - 1]);
}

} // namespace

PdeCheck run_pde_check(const PricingPipeline& pipeline) {
    const auto& cfg = pipeline.config();
    const auto& ps = cfg.pde;
    const double h = cfg.haircuts.front();
    const RepoTerms terms = cfg.terms_at(h);
    const HazardCurve hazard = cfg.hazard();
    const HaircutResult res = pipeline.evaluate(h, cfg.measures.front());
    const double nc_avg = res.profile.average();
    const double T = terms.maturity;

    PdeCoefficients coeffs;
    coeffs.financing_rate = PdeCoefficients::effective_financing_rate(ps.rebate_rate, ps.sec_haircut, ps.note_rate);
    coeffs.sigma = cfg.model.sigma;
    coeffs.discount_rate = ode_discount_rate(cfg.rates, hazard);
    coeffs.maturity = T;
    coeffs.sources.spread_income = cfg.rates.s_p * terms.principal;
    const double loss_rate = hazard.lambda * res.el;
    coeffs.sources.expected_loss_decay = [loss_rate](double) { return loss_rate; };
    const double charge = cfg.rates.s_k * nc_avg;
    coeffs.sources.capital_charge = [charge](double, double) { return charge; };

    const double width = ps.half_width * std::max(cfg.model.sigma, 0.01) * std::sqrt(T);
    auto grid_at = [&](std::size_t n_s, int n_t, Scheme sch) { return Grid::log_spaced(ps.s0, width, n_s, n_t, sch); };

    PdeCheck out;
    out.closed_form = fair_value_ode(terms, cfg.rates, hazard, res.el, nc_avg);
    const auto sol = solve_pde(coeffs, grid_at(ps.s_intervals, ps.t_steps, Scheme::CrankNicolson));
    out.pde_scheme = sol.scheme_used;
    out.pde_value = sol.value_at(ps.s0);
    for (double v : sol.slice(0)) out.pde_max_abs_error = std::max(out.pde_max_abs_error, std::abs(v - out.closed_form));
    out.mc = feynman_kac_mc(coeffs, ps.s0, ps.mc_paths, cfg.seed);

    // Full N_c(t) profile instead of its average.
    const std::vector<double> times = res.profile.times;
    const std::vector<double> nc = res.profile.nc;
    const double s_k = cfg.rates.s_k;
    const double income = coeffs.sources.spread_income;
    out.rk4_profile = fair_value_ode_rk4(
        [&](double t) { return income - loss_rate - s_k * interp(times, nc, t); }, coeffs.discount_rate, T);
    PdeCoefficients profiled = coeffs;
    profiled.sources.capital_charge = [&](double, double t) { return s_k * interp(times, nc, t); };
    out.mc_profile = feynman_kac_mc(profiled, ps.s0, ps.mc_paths, cfg.seed, 1000);

    auto order_of = [&](const PdeCoefficients& c, Scheme sch, bool refine_space) {
        std::vector<Grid> grids;
        for (int k : {50, 100, 200}) {
            const std::size_t n_s = refine_space ? static_cast<std::size_t>(2 * k) : ps.s_intervals;
            grids.push_back(grid_at(n_s, k, sch));
        }
        const auto rep = convergence_report(c, grids, ps.s0);
        return rep.exact ? INFINITY : rep.observed_order;
    };
    out.cn_time_order = order_of(coeffs, Scheme::CrankNicolson, false);
    out.implicit_time_order = order_of(coeffs, Scheme::Implicit, false);

    // Capital growing like sqrt(S): E[S_t^{1/2}] is known, so v has a closed form.
    PdeCoefficients ramp = coeffs;
    const double s0 = ps.s0;
    ramp.sources.capital_charge = [charge, s0](double s, double) { return charge * std::sqrt(s / s0); };
    ramp.sources.capital_varies_with_price = true;
    const double g = 0.5 * coeffs.financing_rate - 0.125 * coeffs.sigma * coeffs.sigma;
    const double rho = coeffs.discount_rate;
    auto annuity = [T](double a) { return a == 0.0 ? T : -std::expm1(-a * T) / a; };
    out.ramp_exact = (income - loss_rate) * annuity(rho) - charge * annuity(rho - g);
    out.cn_space_order = order_of(ramp, Scheme::CrankNicolson, true);
    out.ramp_pde = solve_pde(ramp, grid_at(ps.s_intervals, ps.t_steps, Scheme::CrankNicolson)).value_at(s0);
    out.ramp_mc = feynman_kac_mc(ramp, s0, ps.mc_paths, cfg.seed);
    return out;
}

Table cmd_pde_check(const PricingPipeline& pipeline) {
    const PdeCheck c = run_pde_check(pipeline);
    const double np = pipeline.config().trade.principal;
    // Floor for Monte Carlo comparisons whose standard error is zero by construction.
    const double floor = 1e-9 * np;
    Table t;
    t.columns = {"check", "value", "tolerance", "pass"};
    auto row = [&](const std::string& name, double value, double tol, bool pass) {
        t.add_row({name, value, tol, std::string(pass ? "yes" : "no")});
    };
    row("pde_vs_closed_form_max_abs", c.pde_max_abs_error, 1e-6 * np, c.pde_max_abs_error <= 1e-6 * np);
    const double mc_tol = std::max(3.0 * c.mc.std_error, floor);
    const double mc_err = std::abs(c.mc.estimate - c.closed_form);
    row("mc_vs_closed_form_abs", mc_err, mc_tol, mc_err <= mc_tol);
    const double mcp_tol = std::max(3.0 * c.mc_profile.std_error, 1e-7 * np);
    const double mcp_err = std::abs(c.mc_profile.estimate - c.rk4_profile);
    row("mc_vs_ode_profile_abs", mcp_err, mcp_tol, mcp_err <= mcp_tol);
    row("cn_time_order", c.cn_time_order, 0.2, std::abs(c.cn_time_order - 2.0) <= 0.2);
    row("implicit_time_order", c.implicit_time_order, 0.2, std::abs(c.implicit_time_order - 1.0) <= 0.2);
    row("cn_joint_order_sqrt_ramp", c.cn_space_order, 0.2, std::abs(c.cn_space_order - 2.0) <= 0.2);
    const double ramp_err = std::abs(c.ramp_pde - c.ramp_exact);
    row("ramp_pde_vs_exact_abs", ramp_err, 1e-6 * np, ramp_err <= 1e-6 * np);
    const double ramp_tol = std::max(3.0 * c.ramp_mc.std_error, floor);
    const double ramp_mc_err = std::abs(c.ramp_mc.estimate - c.ramp_pde);
    row("ramp_mc_vs_pde_abs", ramp_mc_err, ramp_tol, ramp_mc_err <= ramp_tol);
    return t;
}

} // namespace repokva
