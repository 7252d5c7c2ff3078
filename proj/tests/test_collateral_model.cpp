#include "repokva/collateral_model.hpp"
#include "repokva/numerics.hpp"

#include <doctest.h>

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace repokva;

namespace {

KouParams reference_params() {
    KouParams p;
    p.sigma = 0.24;
    p.jump_intensity = KouParams::intensity_from_jumps_per_mpr(3.2, 10.0 / 252.0);
    p.p_up = 0.46;
    p.mean_up = 0.0059;
    p.mean_down = 0.0078;
    return p;
}

struct Moments {
    double mean, var, m4;
};

Moments sample_moments(const std::vector<double>& logs) {
    long double s = 0;
    for (double v : logs) s += v;
    const double mean = static_cast<double>(s / logs.size());
    long double s2 = 0, s4 = 0;
    for (double v : logs) {
        const long double d = v - mean;
        s2 += d * d;
        s4 += d * d * d * d;
    }
    return {mean, static_cast<double>(s2 / (logs.size() - 1)), static_cast<double>(s4 / logs.size())};
}

std::vector<double> logs_of(const ReturnDistribution& d) {
    std::vector<double> out;
    out.reserve(d.size());
    for (double x : d.samples()) out.push_back(std::log(x));
    return out;
}

// Brute-force path sampler: many small steps, at most one jump per step.
std::vector<double> stepwise_sampler(const KouParams& p, double u, std::size_t n, int steps, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::exponential_distribution<double> up(1.0 / p.mean_up), down(1.0 / p.mean_down);
    const double dt = u / steps;
    std::vector<double> out(n);
    for (auto& v : out) {
        double y = 0.0;
        for (int k = 0; k < steps; ++k) {
            y += (p.drift - 0.5 * p.sigma * p.sigma) * dt + p.sigma * std::sqrt(dt) * z(rng);
            if (unif(rng) < p.jump_intensity * dt) y += unif(rng) < p.p_up ? up(rng) : -down(rng);
        }
        v = y;
    }
    return out;
}

} // namespace

TEST_CASE("frozen dynamics") {
    KouParams p;
    auto d = sample_mpr_returns(p, 0.5, 1000, 3);
    CHECK(d.min() == 1.0);
    CHECK(d.max() == 1.0);
    p.drift = 0.10;
    d = sample_mpr_returns(p, 1.0, 1000, 3);
    CHECK(d.min() == doctest::Approx(std::exp(0.10)).epsilon(1e-14));
    CHECK(d.max() == doctest::Approx(1.10517).epsilon(1e-5));
}

TEST_CASE("analytic moments examples") {
    KouParams gbm;
    gbm.sigma = 0.2;
    const auto m = analytic_log_moments(gbm, 1.0);
    CHECK(m.mean == doctest::Approx(-0.02));
    CHECK(m.variance == doctest::Approx(0.04));

    KouParams jump;
    jump.jump_intensity = 1.0;
    jump.p_up = 1.0;
    jump.mean_up = 0.01;
    const auto j = analytic_log_moments(jump, 1.0);
    CHECK(j.mean == doctest::Approx(0.01));
    CHECK(j.variance == doctest::Approx(0.0002));
}

TEST_CASE("reference calibration moments within 4 standard errors") {
    const auto p = reference_params();
    const double u = 10.0 / 252.0;
    CHECK(p.jump_intensity == doctest::Approx(80.64));
    const auto logs = logs_of(sample_mpr_returns(p, u, 1'000'000, 11));
    const auto s = sample_moments(logs);
    const auto a = analytic_log_moments(p, u);
    const double n = static_cast<double>(logs.size());
    CHECK(std::abs(s.mean - a.mean) < 4.0 * std::sqrt(s.var / n));
    CHECK(std::abs(s.var - a.variance) < 4.0 * std::sqrt((s.m4 - s.var * s.var) / n));

    // Moment formulas rederived here: Gaussian part plus compound Poisson of
    // signed exponentials.
    const double lu = p.jump_intensity * u;
    const double mean = -0.5 * p.sigma * p.sigma * u + lu * (p.p_up * p.mean_up - (1 - p.p_up) * p.mean_down);
    const double var =
        p.sigma * p.sigma * u + lu * 2.0 * (p.p_up * p.mean_up * p.mean_up + (1 - p.p_up) * p.mean_down * p.mean_down);
    CHECK(a.mean == doctest::Approx(mean).epsilon(1e-13));
    CHECK(a.variance == doctest::Approx(var).epsilon(1e-13));
}

TEST_CASE("one-shot sampler agrees with a stepwise path sampler") {
    const auto p = reference_params();
    const double u = 10.0 / 252.0;
    const std::size_t n = 200'000;
    const auto fast = logs_of(sample_mpr_returns(p, u, n, 5));
    const auto slow = stepwise_sampler(p, u, n, 200, 99);
    const auto a = sample_moments(fast);
    const auto b = sample_moments(slow);
    CHECK(std::abs(a.mean - b.mean) < 4.0 * std::sqrt((a.var + b.var) / n));
    CHECK(std::abs(a.var - b.var) < 4.0 * std::sqrt((a.m4 - a.var * a.var + b.m4 - b.var * b.var) / n));
    for (double cut : {-0.08, -0.05, 0.0, 0.05}) {
        const double fa = std::count_if(fast.begin(), fast.end(), [&](double v) { return v < cut; }) / double(n);
        const double fb = std::count_if(slow.begin(), slow.end(), [&](double v) { return v < cut; }) / double(n);
        const double se = std::sqrt((fa * (1 - fa) + fb * (1 - fb)) / n);
        CHECK(std::abs(fa - fb) <= 4.0 * se + 1e-12);
    }
}

TEST_CASE("GBM quantiles match the normal law") {
    KouParams p;
    p.sigma = 0.24;
    const double u = 10.0 / 252.0;
    const std::size_t n = 1'000'000;
    const auto d = sample_mpr_returns(p, u, n, 17);
    const boost::math::normal_distribution<> law(-0.5 * p.sigma * p.sigma * u, p.sigma * std::sqrt(u));
    for (double q : {0.01, 0.99}) {
        const double expected = boost::math::quantile(law, q);
        CHECK(std::abs(expected - (-0.5 * p.sigma * p.sigma * u + (q < 0.5 ? -1 : 1) * 2.3263 * p.sigma * std::sqrt(u))) <
              1e-5);
        // Quantile standard error: sqrt(q(1-q)/n) / density.
        const double se = std::sqrt(q * (1 - q) / n) / boost::math::pdf(law, expected);
        CHECK(std::abs(std::log(d.quantile(q)) - expected) < 3.0 * se);
    }
}

TEST_CASE("sampler determinism and chunk independence") {
    const auto p = reference_params();
    const auto a = sample_mpr_returns(p, 0.04, 100'000, 42);
    const auto b = sample_mpr_returns(p, 0.04, 100'000, 42);
    CHECK(std::equal(a.samples().begin(), a.samples().end(), b.samples().begin()));
    const auto c = sample_mpr_returns(p, 0.04, 100'000, 43);
    CHECK_FALSE(std::equal(a.samples().begin(), a.samples().end(), c.samples().begin()));
    // A larger run contains the smaller one's chunks verbatim.
    const auto big = sample_mpr_returns(p, 0.04, 2 * kChunkSize, 42);
    const auto small = sample_mpr_returns(p, 0.04, kChunkSize, 42);
    for (double x : small.samples()) CHECK(std::binary_search(big.samples().begin(), big.samples().end(), x));
}

TEST_CASE("empirical distribution invariants") {
    const auto d = sample_mpr_returns(reference_params(), 0.04, 50'000, 8);
    CHECK(std::is_sorted(d.samples().begin(), d.samples().end()));
    CHECK(d.min() > 0.0);
    const double n = static_cast<double>(d.size());
    for (double p : {0.001, 0.01, 0.3, 0.5, 0.9, 0.999}) {
        const double c = d.cdf(d.quantile(p));
        CHECK(c >= p - 1.0 / n);
        CHECK(c <= p + 1.0 / n);
    }
    CHECK(empirical_cdf(d, d.min() * 0.5) == 0.0);
    CHECK(empirical_cdf(d, d.max() * 2.0) == 1.0);
    const ReturnDistribution flat(std::vector<double>(10, 1.0), 0.04);
    CHECK(empirical_cdf(flat, 1.0) == 1.0);
    CHECK(flat.fraction_below(1.0) == 0.0);
}

TEST_CASE("parameter validation") {
    KouParams p;
    p.sigma = -0.1;
    CHECK_THROWS(p.validate());
    p.sigma = 0.2;
    p.jump_intensity = 10.0;
    p.mean_up = 0.0;
    CHECK_THROWS(p.validate());
    p.mean_up = 0.01;
    p.p_up = 1.5;
    CHECK_THROWS(p.validate());
    CHECK_THROWS(ReturnDistribution(std::vector<double>{1.0, -0.5}, 0.1));
    CHECK_THROWS(ReturnDistribution(std::vector<double>{}, 0.1));
}
