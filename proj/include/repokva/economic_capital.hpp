#pragma once

#include "repokva/collateral_model.hpp"
#include "repokva/curves.hpp"
#include "repokva/gap_loss.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace repokva {

enum class RiskMeasure { VaR, ExpectedShortfall };

RiskMeasure parse_risk_measure(std::string_view text);
std::string_view to_string(RiskMeasure m);

// Hedging-error economics of one repo: default arrivals at a flat intensity,
// settlement losses drawn from `dist`, and the constant compensator lambda*El.
class HedgingErrorModel {
public:
    HedgingErrorModel(RepoTerms terms, HazardCurve hazard, ReturnDistribution dist, double rate);

    const RepoTerms& terms() const { return terms_; }
    const HazardCurve& hazard() const { return hazard_; }
    const ReturnDistribution& distribution() const { return dist_; }
    double rate() const { return rate_; }
    // El, recomputed from the distribution at construction.
    double el() const { return el_; }
    // lambda * El, the loss compensator rate.
    double compensator_rate() const { return hazard_.lambda * el_; }

private:
    RepoTerms terms_;
    HazardCurve hazard_;
    ReturnDistribution dist_;
    double rate_;
    double el_;
};

struct ECProfile {
    std::vector<double> times;
    std::vector<double> nc;
    RiskMeasure measure = RiskMeasure::ExpectedShortfall;
    double q = 0.999;

    // Time average of N_c over [times.front(), times.back()] by the trapezoid rule.
    double average() const;
};

// Terminal loss A_T.
double terminal_tail(const HedgingErrorModel& model, double x);
double var_terminal(const HedgingErrorModel& model, double q);

// VaR_A discounted back to t: VaR_A * beta(T) / beta(t).
double discounted_terminal_capital(double var_a, double rate, double t, double maturity);

// Forward loss of economic value pi_hat_t over the remaining life [t, T].
double forward_tail(const HedgingErrorModel& model, double t, double x);
// E[(pi_hat_t - x)^+].
double forward_excess(const HedgingErrorModel& model, double t, double x);
double forward_ec(const HedgingErrorModel& model, double t, double q, RiskMeasure measure);

std::vector<double> uniform_time_grid(double maturity, std::size_t n_points);
ECProfile ec_profile(const HedgingErrorModel& model, const std::vector<double>& grid, double q,
                     RiskMeasure measure);

// Monte Carlo sample of the hedging error A_s at horizon s.
std::vector<double> simulate_hedging_error_paths(const HedgingErrorModel& model, std::size_t n_paths,
                                                 std::uint64_t seed, double horizon);

} // namespace repokva
