#pragma once

#include "repokva/collateral_model.hpp"
#include "repokva/curves.hpp"
#include "repokva/economic_capital.hpp"
#include "repokva/gap_loss.hpp"
#include "repokva/valuation.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace repokva {

enum class OutputFormat { Csv, Json };

struct SweepSettings {
    double h_min = 0.0;
    double h_max = 0.20;
    double h_step = 0.01;

    std::vector<double> haircuts() const;
};

struct PdeSettings {
    double s0 = 100.0;
    std::size_t s_intervals = 400;
    int t_steps = 400;
    double half_width = 5.0; // in units of sigma * sqrt(T) around s0
    double rebate_rate = 0.0;
    double sec_haircut = 0.0;
    double note_rate = 0.0;
    std::size_t mc_paths = 20000;
};

// Everything a command needs, parsed from a flat `section.key = value` file.
struct RunConfig {
    RepoTerms trade;              // trade.haircut holds the first requested haircut
    std::vector<double> haircuts; // every requested haircut, in file order
    RatesEnv rates;
    std::optional<double> cds_spread;
    std::optional<double> lambda;
    KouParams model;
    std::size_t n_paths = 1'000'000;
    std::uint64_t seed = 1;
    std::vector<RiskMeasure> measures{RiskMeasure::ExpectedShortfall};
    std::size_t grid_points = 101;
    RcSchedule rc;
    SweepSettings sweep;
    PdeSettings pde;
    std::string output_path;
    OutputFormat format = OutputFormat::Csv;

    HazardCurve hazard() const;
    RepoTerms terms_at(double haircut) const;
};

// Parses and validates config text. Throws ConfigError naming the offending field(s).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// The bundled reproduction setup (one-year SPX repo, BBB borrower).
const std::string& reference_config_text();

} // namespace repokva
