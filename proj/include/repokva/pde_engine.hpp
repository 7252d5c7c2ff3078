#pragma once

#include "repokva/collateral_model.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace repokva {

enum class Scheme { CrankNicolson, Implicit };

// Source terms of the repo pricing PDE. Empty functions count as zero.
struct SourceTerms {
    double spread_income = 0.0;                                 // s_p N_p
    std::function<double(double t)> expected_loss_decay;        // lambda El(t)
    std::function<double(double s, double t)> capital_charge;   // s_k N_c(S, t)
    bool capital_varies_with_price = false;

    double net(double s, double t) const;
    bool depends_on_price() const { return capital_charge && capital_varies_with_price; }
};

struct PdeCoefficients {
    double financing_rate = 0.0; // effective stock financing rate, drift of S
    double sigma = 0.0;
    double discount_rate = 0.0;  // r_e (plus lambda when survival is folded into discounting)
    double maturity = 1.0;
    SourceTerms sources;

    // r_s (1 + h_s) - r_N h_s.
    static double effective_financing_rate(double rebate_rate, double sec_haircut, double note_rate) {
        return rebate_rate * (1.0 + sec_haircut) - note_rate * sec_haircut;
    }

    void validate() const;
};

struct Grid {
    std::vector<double> s_nodes;
    int t_steps = 1;
    Scheme scheme = Scheme::CrankNicolson;

    // `intervals` equal steps in log S over [s_center e^{-half_width}, s_center e^{half_width}].
    // s_center is a node whenever `intervals` is even.
    static Grid log_spaced(double s_center, double half_width, std::size_t intervals, int t_steps,
                           Scheme scheme = Scheme::CrankNicolson);

    void validate() const;
};

struct PdeSolution {
    std::vector<double> s_nodes;
    std::vector<double> times;
    std::vector<double> values; // row-major: values[n * s_nodes.size() + i] = v(S_i, t_n)
    Scheme scheme_used = Scheme::CrankNicolson;

    std::span<const double> slice(std::size_t time_index) const;
    // v(s, 0) by linear interpolation in S.
    double value_at(double s) const;
};

PdeSolution solve_pde(const PdeCoefficients& coeffs, const Grid& grid);

struct MonteCarloEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

// Expectation of the discounted source integral along paths of S with drift
// `financing_rate`, optionally with Kou jumps (compensated so E[S] is unchanged).
MonteCarloEstimate feynman_kac_mc(const PdeCoefficients& coeffs, double s0, std::size_t n_paths,
                                  std::uint64_t seed, int time_steps = 252,
                                  const std::optional<KouParams>& jumps = std::nullopt);

struct ConvergenceReport {
    std::vector<double> values;  // v(s0, 0) per grid
    std::vector<double> orders;  // one per consecutive triple
    double observed_order = 0.0; // from the finest triple
    bool exact = false;          // all successive differences vanish
};

// Observed order of accuracy from v(s0, 0) on at least three nested grids.
ConvergenceReport convergence_report(const PdeCoefficients& coeffs, const std::vector<Grid>& grids, double s0);

} // namespace repokva
