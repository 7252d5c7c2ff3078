#include "repokva/economic_capital.hpp"

#include "repokva/errors.hpp"
#include "repokva/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace repokva {

namespace {

constexpr int kMinPanels = 200;
constexpr int kMaxDepth = 6;
constexpr double kBisectionTol = 1e-6; // in units of N_p

// Compensator accrued over d years, discounted to the default time:
// lambda El \int_t^tau beta_s/beta_tau ds.
double accrued_compensator(double comp_rate, double rate, double d) {
    if (rate == 0.0) return comp_rate * d;
    return comp_rate * std::expm1(rate * d) / rate;
}

template <class Tail>
double bisect_var(const Tail& tail, double cap, double q, double principal) {
    const double alpha = 1.0 - q;
    const double at_zero = tail(0.0);
    if (!std::isfinite(at_zero)) throw NumericalError("VaR bisection: non-finite tail probability");
    if (at_zero <= alpha) return 0.0;
    double lo = 0.0;
    double hi = cap;
    const double tol = kBisectionTol * principal;
    for (int it = 0; hi - lo > tol; ++it) {
        if (it > 200) throw NumericalError("VaR bisection did not converge");
        const double mid = 0.5 * (lo + hi);
        const double p = tail(mid);
        if (!std::isfinite(p)) throw NumericalError("VaR bisection: non-finite tail probability");
        (p <= alpha ? hi : lo) = mid;
    }
    return hi;
}

void require_q(double q) {
    if (!(q > 0.5 && q < 1.0)) throw std::invalid_argument("confidence q must lie in (0.5, 1)");
}

} // namespace

RiskMeasure parse_risk_measure(std::string_view text) {
    if (text == "var" || text == "VaR" || text == "VAR") return RiskMeasure::VaR;
    if (text == "es" || text == "ES" || text == "expected_shortfall") return RiskMeasure::ExpectedShortfall;
    throw std::invalid_argument("unknown risk measure '" + std::string(text) + "' (expected var|es)");
}

std::string_view to_string(RiskMeasure m) { return m == RiskMeasure::VaR ? "var" : "es"; }

HedgingErrorModel::HedgingErrorModel(RepoTerms terms, HazardCurve hazard, ReturnDistribution dist, double rate)
    : terms_(terms), hazard_(hazard), dist_(std::move(dist)), rate_(rate) {
    terms_.validate();
    hazard_.validate();
    if (!std::isfinite(rate_)) throw std::invalid_argument("HedgingErrorModel: rate must be finite");
    el_ = expected_loss(terms_, dist_);
}

double ECProfile::average() const {
    if (times.size() < 2) return nc.empty() ? 0.0 : nc.front();
    return trapezoid(times, nc) / (times.back() - times.front());
}

double terminal_tail(const HedgingErrorModel& model, double x) {
    const double lambda = model.hazard().lambda;
    const double T = model.terms().maturity;
    if (lambda == 0.0 || x >= model.terms().loss_cap()) return 0.0;
    const double comp = model.compensator_rate();
    auto integrand = [&](double tau) {
        return loss_tail(model.terms(), model.distribution(), x + comp * tau) * lambda * std::exp(-lambda * tau);
    };
    return adaptive_simpson(integrand, 0.0, T, kMinPanels, 1e-12, kMaxDepth);
}

double var_terminal(const HedgingErrorModel& model, double q) {
    require_q(q);
    return bisect_var([&](double x) { return terminal_tail(model, x); }, model.terms().loss_cap(), q,
                      model.terms().principal);
}

double discounted_terminal_capital(double var_a, double rate, double t, double maturity) {
    return var_a * std::exp(-rate * (maturity - t));
}

double forward_tail(const HedgingErrorModel& model, double t, double x) {
    const double T = model.terms().maturity;
    if (!(t >= 0.0 && t < T)) throw std::invalid_argument("forward_tail: t must lie in [0, T)");
    const double lambda = model.hazard().lambda;
    if (lambda == 0.0 || x >= model.terms().loss_cap()) return 0.0;
    const double r = model.rate();
    const double comp = model.compensator_rate();
    auto integrand = [&](double tau) {
        const double d = tau - t;
        const double b = std::exp(r * d) * x + accrued_compensator(comp, r, d);
        return loss_tail(model.terms(), model.distribution(), b) * lambda * std::exp(-lambda * d);
    };
    return adaptive_simpson(integrand, t, T, kMinPanels, 1e-12, kMaxDepth);
}

double forward_excess(const HedgingErrorModel& model, double t, double x) {
    const double T = model.terms().maturity;
    if (!(t >= 0.0 && t < T)) throw std::invalid_argument("forward_excess: t must lie in [0, T)");
    const double lambda = model.hazard().lambda;
    if (lambda == 0.0) return std::max(0.0, -x);
    const double r = model.rate();
    const double comp = model.compensator_rate();
    // Default at tau: pi_hat = D (l - b(0)) with D = beta_tau/beta_t, so
    // (pi_hat - x)^+ = D (l - b(x))^+.
    auto integrand = [&](double tau) {
        const double d = tau - t;
        const double b = std::exp(r * d) * x + accrued_compensator(comp, r, d);
        return expected_excess_loss(model.terms(), model.distribution(), b) * std::exp(-r * d) * lambda *
               std::exp(-lambda * d);
    };
    const double on_default =
        adaptive_simpson(integrand, t, T, kMinPanels, 1e-12 * model.terms().principal, kMaxDepth);
    // Survival to T leaves pi_hat at minus the discounted compensator, never above x >= 0.
    const double survive = std::exp(-lambda * (T - t));
    const double no_default_value = -accrued_compensator(comp, r, T - t) * std::exp(-r * (T - t));
    return on_default + survive * std::max(0.0, no_default_value - x);
}

double forward_ec(const HedgingErrorModel& model, double t, double q, RiskMeasure measure) {
    require_q(q);
    const double T = model.terms().maturity;
    if (!(t >= 0.0 && t < T)) throw std::invalid_argument("forward_ec: t must lie in [0, T)");
    const double var = bisect_var([&](double x) { return forward_tail(model, t, x); }, model.terms().loss_cap(), q,
                                  model.terms().principal);
    if (measure == RiskMeasure::VaR) return var;
    const double es = var + forward_excess(model, t, var) / (1.0 - q);
    if (!std::isfinite(es)) throw NumericalError("forward_ec: non-finite expected shortfall");
    return es;
}

std::vector<double> uniform_time_grid(double maturity, std::size_t n_points) {
    if (n_points < 2) throw std::invalid_argument("uniform_time_grid: need at least 2 points");
    std::vector<double> g(n_points);
    for (std::size_t i = 0; i < n_points; ++i)
        g[i] = maturity * static_cast<double>(i) / static_cast<double>(n_points - 1);
    g.back() = maturity;
    return g;
}

ECProfile ec_profile(const HedgingErrorModel& model, const std::vector<double>& grid, double q,
                     RiskMeasure measure) {
    const double T = model.terms().maturity;
    for (double t : grid)
        if (!(t >= 0.0 && t <= T)) throw std::invalid_argument("ec_profile: grid must lie within [0, T]");
    ECProfile p;
    p.times = grid;
    p.nc.assign(grid.size(), 0.0);
    p.measure = measure;
    p.q = q;
    for_each_chunk(grid.size(), [&](std::size_t i) {
        p.nc[i] = grid[i] < T ? forward_ec(model, grid[i], q, measure) : 0.0;
    });
    return p;
}

std::vector<double> simulate_hedging_error_paths(const HedgingErrorModel& model, std::size_t n_paths,
                                                 std::uint64_t seed, double horizon) {
    if (!(horizon >= 0.0 && horizon <= model.terms().maturity))
        throw std::invalid_argument("simulate_hedging_error_paths: horizon must lie in [0, T]");
    const double lambda = model.hazard().lambda;
    const double comp = model.compensator_rate();
    const auto samples = model.distribution().samples();
    std::vector<double> out(n_paths);
    for_each_chunk(chunk_count(n_paths), [&](std::size_t c) {
        auto rng = substream(seed, c, /*stream_tag=*/1);
        std::exponential_distribution<double> arrival(lambda > 0.0 ? lambda : 1.0);
        std::uniform_int_distribution<std::size_t> pick(0, samples.size() - 1);
        const std::size_t begin = c * kChunkSize;
        const std::size_t end = std::min(n_paths, begin + kChunkSize);
        for (std::size_t i = begin; i < end; ++i) {
            const double tau = lambda > 0.0 ? arrival(rng) : INFINITY;
            if (tau <= horizon) {
                const double x = samples[pick(rng)];
                out[i] = settlement_loss(model.terms(), x) - comp * tau;
            } else {
                out[i] = -comp * horizon;
            }
        }
    });
    return out;
}

} // namespace repokva
