#include "repokva/collateral_model.hpp"

#include "repokva/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace repokva {

void KouParams::validate() const {
    for (double x : {sigma, jump_intensity, p_up, mean_up, mean_down, drift})
        if (!std::isfinite(x)) throw std::invalid_argument("KouParams: parameters must be finite");
    if (sigma < 0.0) throw std::invalid_argument("KouParams: sigma must be >= 0");
    if (jump_intensity < 0.0) throw std::invalid_argument("KouParams: jump_intensity must be >= 0");
    if (p_up < 0.0 || p_up > 1.0) throw std::invalid_argument("KouParams: p_up must lie in [0, 1]");
    if (jump_intensity > 0.0 && (mean_up <= 0.0 || mean_down <= 0.0))
        throw std::invalid_argument("KouParams: jump sizes must be > 0 when jumps are enabled");
}

LogMoments analytic_log_moments(const KouParams& p, double horizon) {
    if (!(horizon > 0.0)) throw std::invalid_argument("analytic_log_moments: horizon must be > 0");
    const double jumps = p.jump_intensity * horizon;
    const double q_down = 1.0 - p.p_up;
    LogMoments m;
    m.mean = (p.drift - 0.5 * p.sigma * p.sigma) * horizon +
             jumps * (p.p_up * p.mean_up - q_down * p.mean_down);
    m.variance = p.sigma * p.sigma * horizon +
                 jumps * (p.p_up * 2.0 * p.mean_up * p.mean_up +
                          q_down * 2.0 * p.mean_down * p.mean_down);
    return m;
}

double draw_log_return(const KouParams& p, double horizon, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    double z = (p.drift - 0.5 * p.sigma * p.sigma) * horizon + p.sigma * std::sqrt(horizon) * gauss(rng);
    if (p.jump_intensity > 0.0) {
        std::poisson_distribution<int> n_jumps(p.jump_intensity * horizon);
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        std::exponential_distribution<double> up(1.0 / p.mean_up);
        std::exponential_distribution<double> down(1.0 / p.mean_down);
        const int n = n_jumps(rng);
        for (int i = 0; i < n; ++i) z += (coin(rng) < p.p_up) ? up(rng) : -down(rng);
    }
    return z;
}

ReturnDistribution::ReturnDistribution(std::vector<double> samples, double horizon) {
    if (samples.empty()) throw std::invalid_argument("ReturnDistribution: no samples");
    if (!(horizon > 0.0)) throw std::invalid_argument("ReturnDistribution: horizon must be > 0");
    for (double x : samples)
        if (!(x > 0.0) || !std::isfinite(x))
            throw std::invalid_argument("ReturnDistribution: gross returns must be finite and > 0");
    std::sort(samples.begin(), samples.end());
    Data d;
    d.prefix.resize(samples.size() + 1);
    long double acc = 0.0L;
    d.prefix[0] = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        acc += samples[i];
        d.prefix[i + 1] = static_cast<double>(acc);
    }
    d.samples = std::move(samples);
    d.horizon = horizon;
    data_ = std::make_shared<const Data>(std::move(d));
}

double ReturnDistribution::cdf(double x) const {
    const auto& s = data_->samples;
    const auto it = std::upper_bound(s.begin(), s.end(), x);
    return static_cast<double>(it - s.begin()) / static_cast<double>(s.size());
}

std::size_t ReturnDistribution::count_below(double x) const {
    const auto& s = data_->samples;
    return static_cast<std::size_t>(std::lower_bound(s.begin(), s.end(), x) - s.begin());
}

double ReturnDistribution::fraction_below(double x) const {
    return static_cast<double>(count_below(x)) / static_cast<double>(size());
}

double ReturnDistribution::quantile(double p) const {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile: p must lie in [0, 1]");
    const auto n = size();
    auto k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
    k = std::clamp<std::size_t>(k, 1, n);
    return data_->samples[k - 1];
}

double ReturnDistribution::lower_tail_mean(double p) const {
    const auto n = size();
    auto k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
    k = std::clamp<std::size_t>(k, 1, n);
    return data_->prefix[k] / static_cast<double>(k);
}

ReturnDistribution sample_mpr_returns(const KouParams& params, double horizon,
                                      std::size_t n_paths, std::uint64_t seed) {
    params.validate();
    if (n_paths == 0) throw std::invalid_argument("sample_mpr_returns: n_paths must be >= 1");
    if (!(horizon > 0.0)) throw std::invalid_argument("sample_mpr_returns: horizon must be > 0");

    std::vector<double> out(n_paths);
    for_each_chunk(chunk_count(n_paths), [&](std::size_t c) {
        auto rng = substream(seed, c);
        const std::size_t begin = c * kChunkSize;
        const std::size_t end = std::min(n_paths, begin + kChunkSize);
        for (std::size_t i = begin; i < end; ++i) out[i] = std::exp(draw_log_return(params, horizon, rng));
    });
    return ReturnDistribution(std::move(out), horizon);
}

double empirical_cdf(const ReturnDistribution& dist, double x) { return dist.cdf(x); }

} // namespace repokva
