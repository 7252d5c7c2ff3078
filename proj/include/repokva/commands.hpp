#pragma once

#include "repokva/config.hpp"
#include "repokva/economic_capital.hpp"
#include "repokva/pde_engine.hpp"
#include "repokva/report.hpp"
#include "repokva/valuation.hpp"

#include <optional>
#include <vector>

namespace repokva {

struct HaircutResult {
    double haircut = 0.0;
    RiskMeasure measure = RiskMeasure::ExpectedShortfall;
    double el = 0.0;
    ECProfile profile;
    ValuationBreakdown breakdown;
    Breakeven breakeven;
};

// Samples the collateral distribution once per config and prices any number
// of haircuts against it (common random numbers across haircuts).
class PricingPipeline {
public:
    explicit PricingPipeline(RunConfig config);

    const RunConfig& config() const { return config_; }
    const ReturnDistribution& distribution() const { return dist_; }
    HedgingErrorModel model_at(double haircut) const;
    HaircutResult evaluate(double haircut, RiskMeasure measure) const;

private:
    RunConfig config_;
    ReturnDistribution dist_;
};

Table cmd_price(const PricingPipeline& pipeline);
Table cmd_ec_profile(const PricingPipeline& pipeline);
Table cmd_haircut_sweep(const PricingPipeline& pipeline);

struct PdeCheck {
    double closed_form = 0.0;       // constant-coefficient closed form, fraction of N_p
    double pde_value = 0.0;         // v(s0, 0)
    double pde_max_abs_error = 0.0; // max over S of |v(S,0) - closed form|
    Scheme pde_scheme = Scheme::CrankNicolson;
    MonteCarloEstimate mc;          // Feynman-Kac on the same problem
    double rk4_profile = 0.0;       // ODE with the full N_c(t) profile
    MonteCarloEstimate mc_profile;  // Feynman-Kac with the full profile
    double cn_time_order = 0.0;
    double implicit_time_order = 0.0;
    double cn_space_order = 0.0;
    double ramp_exact = 0.0;        // S-dependent capital ramp, closed form
    double ramp_pde = 0.0;
    MonteCarloEstimate ramp_mc;
};

// PDE / ODE closed form / Feynman-Kac triangle for the first configured haircut.
PdeCheck run_pde_check(const PricingPipeline& pipeline);
Table cmd_pde_check(const PricingPipeline& pipeline);

} // namespace repokva
