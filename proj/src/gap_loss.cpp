#include "repokva/gap_loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace repokva {

void RepoTerms::validate() const {
    if (!(principal > 0.0) || !std::isfinite(principal))
        throw std::invalid_argument("RepoTerms: principal must be finite and > 0");
    if (!(haircut >= 0.0 && haircut < 1.0)) throw std::invalid_argument("RepoTerms: haircut must lie in [0, 1)");
    if (!(liq_discount >= 0.0 && liq_discount < 1.0))
        throw std::invalid_argument("RepoTerms: liq_discount must lie in [0, 1)");
    if (!(recovery >= 0.0 && recovery < 1.0)) throw std::invalid_argument("RepoTerms: recovery must lie in [0, 1)");
    if (!(maturity > 0.0) || !std::isfinite(maturity)) throw std::invalid_argument("RepoTerms: maturity must be > 0");
    if (!(mpr > 0.0) || !(mpr < maturity)) throw std::invalid_argument("RepoTerms: mpr must lie in (0, maturity)");
    if (!(confidence > 0.5 && confidence < 1.0))
        throw std::invalid_argument("RepoTerms: confidence must lie in (0.5, 1)");
}

double settlement_loss(const RepoTerms& terms, double x) {
    if (!(x > 0.0)) throw std::invalid_argument("settlement_loss: gross return must be > 0");
    return terms.loss_cap() * std::max(0.0, 1.0 - terms.coverage_ratio() * x);
}

double expected_loss(const RepoTerms& terms, const ReturnDistribution& dist) {
    // Only returns below 1/k lose money; sum them in closed form.
    const double k = terms.coverage_ratio();
    const std::size_t m = dist.count_below(1.0 / k);
    const double sum = static_cast<double>(m) - k * dist.lower_sum(m);
    return terms.loss_cap() * std::max(0.0, sum) / static_cast<double>(dist.size());
}

namespace {

// Gross-return threshold below which the loss exceeds y.
double return_threshold(const RepoTerms& terms, double y) {
    return (1.0 - y / terms.loss_cap()) / terms.coverage_ratio();
}

} // namespace

double loss_tail(const RepoTerms& terms, const ReturnDistribution& dist, double y) {
    if (y >= terms.loss_cap()) return 0.0;
    if (y < 0.0) return 1.0;
    return dist.fraction_below(return_threshold(terms, y));
}

double expected_excess_loss(const RepoTerms& terms, const ReturnDistribution& dist, double b) {
    if (b >= terms.loss_cap()) return 0.0;
    if (b <= 0.0) return expected_loss(terms, dist) - b;
    const double c = terms.loss_cap();
    const double k = terms.coverage_ratio();
    const std::size_t m = dist.count_below(return_threshold(terms, b));
    const double sum = static_cast<double>(m) * (c - b) - c * k * dist.lower_sum(m);
    return std::max(0.0, sum) / static_cast<double>(dist.size());
}

} // namespace repokva
