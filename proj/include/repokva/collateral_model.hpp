#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

namespace repokva {

// Kou double-exponential jump-diffusion for the collateral log price.
// jump_intensity = 0 gives geometric Brownian motion.
struct KouParams {
    double sigma = 0.0;          // annualized diffusion volatility
    double jump_intensity = 0.0; // expected jumps per year
    double p_up = 0.5;           // probability a jump is upward
    double mean_up = 0.01;       // mean absolute log up-jump size
    double mean_down = 0.01;     // mean absolute log down-jump size
    double drift = 0.0;          // annualized log drift (before the -sigma^2/2 correction)

    void validate() const;

    // Average jump count per margin period -> jumps per year.
    static double intensity_from_jumps_per_mpr(double jumps, double mpr_years) {
        return jumps / mpr_years;
    }
};

struct LogMoments {
    double mean = 0.0;
    double variance = 0.0;
};

LogMoments analytic_log_moments(const KouParams& params, double horizon);

// Draws one log return over `horizon` years: Gaussian diffusion plus a
// compound-Poisson sum of double-exponential jumps.
double draw_log_return(const KouParams& params, double horizon, std::mt19937_64& rng);

// Sorted empirical distribution of gross returns X = S(t+u)/S(t) over one
// margin period. Copies share the immutable sample buffer.
class ReturnDistribution {
public:
    ReturnDistribution(std::vector<double> samples, double horizon);

    std::size_t size() const { return data_->samples.size(); }
    double horizon() const { return data_->horizon; }
    std::span<const double> samples() const { return data_->samples; }
    double min() const { return data_->samples.front(); }
    double max() const { return data_->samples.back(); }

    // Fraction of samples <= x.
    double cdf(double x) const;
    // Fraction of samples strictly below x.
    double fraction_below(double x) const;
    // Number of samples strictly below x.
    std::size_t count_below(double x) const;
    // Sum of the `count` smallest samples.
    double lower_sum(std::size_t count) const { return data_->prefix[count]; }
    // Inverse empirical CDF: smallest sample with cdf >= p.
    double quantile(double p) const;
    // Mean of samples at or below quantile(p).
    double lower_tail_mean(double p) const;
    double mean() const { return data_->prefix.back() / static_cast<double>(size()); }

private:
    struct Data {
        std::vector<double> samples;
        std::vector<double> prefix; // prefix[i] = sum of samples[0..i)
        double horizon = 0.0;
    };
    std::shared_ptr<const Data> data_;
};

ReturnDistribution sample_mpr_returns(const KouParams& params, double horizon,
                                      std::size_t n_paths, std::uint64_t seed);

double empirical_cdf(const ReturnDistribution& dist, double x);

} // namespace repokva
