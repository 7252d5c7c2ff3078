#include "repokva/curves.hpp"
#include "repokva/gap_loss.hpp"
#include "repokva/valuation.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace repokva;

namespace {

// Composite Simpson on n panels, test-side only.
template <class F>
double simpson(F f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

} // namespace

TEST_CASE("discount factor examples") {
    CHECK(discount_factor(0.05, 0.0) == 1.0);
    CHECK(discount_factor(0.007, 1.0) == doctest::Approx(0.993024).epsilon(1e-6));
    CHECK(discount_factor(0.031, 0.5) == doctest::Approx(0.984620).epsilon(1e-6));
    CHECK_THROWS_AS(discount_factor(0.01, -1.0), std::invalid_argument);
}

TEST_CASE("discount factor is multiplicative") {
    for (double r : {0.0, 0.007, 0.031, 0.2})
        for (double t1 : {0.0, 0.3, 1.7})
            for (double t2 : {0.1, 2.5})
                CHECK(std::abs(discount_factor(r, t1) * discount_factor(r, t2) - discount_factor(r, t1 + t2)) <
                      1e-12);
}

TEST_CASE("survival examples") {
    CHECK(survival_probability({0.0, 0.4}, 5.0) == 1.0);
    CHECK(survival_probability({0.03133, 0.4}, 1.0) == doctest::Approx(0.969156).epsilon(1e-6));
    // High-precision reference values.
    CHECK(survival_probability({0.04167, 0.4}, 0.5) == doctest::Approx(0.979380549028965).epsilon(1e-13));
    CHECK(survival_probability({0.041667, 0.4}, 0.5) == doctest::Approx(0.979382018100890).epsilon(1e-13));
    CHECK(survival_probability({0.5, 0.4}, 0.0) == 1.0);
    double prev = 1.0;
    for (double t = 0.0; t <= 10.0; t += 0.25) {
        const double q = survival_probability({0.2, 0.4}, t);
        CHECK(q <= prev);
        prev = q;
    }
    CHECK_THROWS(survival_probability({-0.1, 0.4}, 1.0));
}

TEST_CASE("credit triangle") {
    CHECK(hazard_from_cds(0.0, 0.4) == 0.0);
    CHECK(hazard_from_cds(0.0188, 0.4) == doctest::Approx(0.031333).epsilon(1e-5));
    CHECK(hazard_from_cds(0.0250, 0.4) == doctest::Approx(0.041667).epsilon(1e-5));
}

TEST_CASE("risky annuity examples and quadrature") {
    CHECK(risky_annuity(0.0, {0.0, 0.4}, 1.0) == 1.0);
    CHECK(risky_annuity(0.007, {0.0, 0.4}, 1.0) == doctest::Approx(0.996508152394985).epsilon(1e-13));
    CHECK(risky_annuity(0.031, {0.031333, 0.4}, 1.0) == doctest::Approx(0.969471100454970).epsilon(1e-13));

    for (double r : {0.0, 0.007, 0.031, 0.3})
        for (double lam : {0.0, 0.031333, 0.5})
            for (double T : {0.25, 1.0, 5.0}) {
                const double q = simpson([&](double t) { return std::exp(-(r + lam) * t); }, 0.0, T, 10000);
                CHECK(std::abs(q - risky_annuity(r, {lam, 0.4}, T)) < 1e-8);
            }
}

TEST_CASE("risky annuity is non-increasing in rate and intensity") {
    double prev = INFINITY;
    for (double r = 0.0; r < 0.2; r += 0.01) {
        const double a = risky_annuity(r, {0.03, 0.4}, 2.0);
        CHECK(a <= prev);
        prev = a;
    }
    prev = INFINITY;
    for (double lam = 0.0; lam < 0.2; lam += 0.01) {
        const double a = risky_annuity(0.02, {lam, 0.4}, 2.0);
        CHECK(a <= prev);
        prev = a;
    }
}

TEST_CASE("npv* of the 60bp one-year repo") {
    RepoTerms terms;
    RatesEnv env;
    env.r = 0.007;
    env.s_p = 0.006;
    const double bp = to_bp(npv_star(terms, env), terms.principal);
    CHECK(bp == doctest::Approx(0.006 * risky_annuity(0.007, {0.0, 0.4}, 1.0) * 1e4).epsilon(1e-12));
    CHECK(std::abs(bp - 59.79) < 0.005);
    CHECK(std::abs(bp - 59.78) <= 0.05);
}

TEST_CASE("day count conversions") {
    CHECK(trading_days_to_years(10.0) == doctest::Approx(10.0 / 252.0));
    CHECK(calendar_days_to_years(365.0) == doctest::Approx(1.0));
}

TEST_CASE("rates validation") {
    RatesEnv env;
    env.r = 0.01;
    env.r_c = 0.005;
    CHECK_THROWS(env.validate());
    env.r_c = 0.02;
    env.funding_basis = -0.001;
    CHECK_THROWS(env.validate());
    env.funding_basis = 0.0;
    CHECK_NOTHROW(env.validate());
}
