#include "repokva/pde_engine.hpp"

#include "repokva/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace repokva {

double SourceTerms::net(double s, double t) const {
    double f = spread_income;
    if (expected_loss_decay) f -= expected_loss_decay(t);
    if (capital_charge) f -= capital_charge(s, t);
    return f;
}

void PdeCoefficients::validate() const {
    for (double x : {financing_rate, sigma, discount_rate, maturity})
        if (!std::isfinite(x)) throw std::invalid_argument("PdeCoefficients: coefficients must be finite");
    if (sigma < 0.0) throw std::invalid_argument("PdeCoefficients: sigma must be >= 0");
    if (!(maturity > 0.0)) throw std::invalid_argument("PdeCoefficients: maturity must be > 0");
}

Grid Grid::log_spaced(double s_center, double half_width, std::size_t intervals, int t_steps, Scheme scheme) {
    if (!(s_center > 0.0) || !(half_width > 0.0))
        throw std::invalid_argument("Grid::log_spaced: s_center and half_width must be > 0");
    Grid g;
    g.t_steps = t_steps;
    g.scheme = scheme;
    g.s_nodes.resize(intervals + 1);
    const double x0 = std::log(s_center) - half_width;
    const double dx = 2.0 * half_width / static_cast<double>(intervals);
    for (std::size_t i = 0; i <= intervals; ++i) g.s_nodes[i] = std::exp(x0 + dx * static_cast<double>(i));
    if (intervals % 2 == 0) g.s_nodes[intervals / 2] = s_center;
    return g;
}

void Grid::validate() const {
    if (s_nodes.size() < 5) throw std::invalid_argument("Grid: need at least 3 interior price nodes");
    if (t_steps < 1) throw std::invalid_argument("Grid: t_steps must be >= 1");
    if (!(s_nodes.front() > 0.0)) throw std::invalid_argument("Grid: price nodes must be > 0");
    for (std::size_t i = 1; i < s_nodes.size(); ++i)
        if (!(s_nodes[i] > s_nodes[i - 1])) throw std::invalid_argument("Grid: price nodes must be strictly increasing");
}

std::span<const double> PdeSolution::slice(std::size_t time_index) const {
    const std::size_t m = s_nodes.size();
    return std::span<const double>(values).subspan(time_index * m, m);
}

double PdeSolution::value_at(double s) const {
    const auto v = slice(0);
    if (s <= s_nodes.front()) return v.front();
    if (s >= s_nodes.back()) return v.back();
    const auto it = std::upper_bound(s_nodes.begin(), s_nodes.end(), s);
    const std::size_t i = static_cast<std::size_t>(it - s_nodes.begin());
    const double w = (s - s_nodes[i - 1]) / (s_nodes[i] - s_nodes[i - 1]);
    return (1.0 - w) * v[i - 1] + w * v[i];
}

namespace {

// Spatial operator L v = a v_xx + b v_x - r v in x = ln S as a tridiagonal band.
struct Operator {
    std::vector<double> lower, diag, upper;
};

Operator build_operator(const std::vector<double>& x, double sigma, double drift, double rate, bool upwind) {
    const std::size_t m = x.size();
    Operator op{std::vector<double>(m, 0.0), std::vector<double>(m, 0.0), std::vector<double>(m, 0.0)};
    const double a = 0.5 * sigma * sigma;
    const double b = drift - 0.5 * sigma * sigma;
    for (std::size_t i = 1; i + 1 < m; ++i) {
        const double hm = x[i] - x[i - 1];
        const double hp = x[i + 1] - x[i];
        const double c2m = 2.0 / (hm * (hm + hp));
        const double c2p = 2.0 / (hp * (hm + hp));
        double c1m, c1d, c1p;
        if (!upwind) {
            c1m = -hp / (hm * (hm + hp));
            c1d = (hp - hm) / (hm * hp);
            c1p = hm / (hp * (hm + hp));
        } else if (b >= 0.0) {
            c1m = 0.0;
            c1d = -1.0 / hp;
            c1p = 1.0 / hp;
        } else {
            c1m = -1.0 / hm;
            c1d = 1.0 / hm;
            c1p = 0.0;
        }
        op.lower[i] = a * c2m + b * c1m;
        op.diag[i] = -a * (c2m + c2p) + b * c1d - rate;
        op.upper[i] = a * c2p + b * c1p;
    }
    return op;
}

bool central_is_monotone(const Operator& op) {
    for (std::size_t i = 1; i + 1 < op.diag.size(); ++i)
        if (op.lower[i] < 0.0 || op.upper[i] < 0.0) return false;
    return true;
}

// Boundary values from linearity in S: v_edge = alpha v_near + beta v_next.
struct Extrapolation {
    double alpha, beta;
};

Extrapolation linear_in_s(double s_edge, double s_near, double s_next) {
    const double w = (s_edge - s_near) / (s_next - s_near);
    return {1.0 - w, w};
}

void thomas_solve(std::vector<double>& a, std::vector<double>& b, std::vector<double>& c, std::vector<double>& d) {
    const std::size_t n = d.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        d[i] -= w * d[i - 1];
    }
    d[n - 1] /= b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) d[i] = (d[i] - c[i] * d[i + 1]) / b[i];
}

class Stepper {
public:
    Stepper(const PdeCoefficients& coeffs, const std::vector<double>& s, const Operator& op)
        : coeffs_(coeffs), s_(s), op_(op), m_(s.size()),
          lo_edge_(linear_in_s(s[0], s[1], s[2])),
          hi_edge_(linear_in_s(s[m_ - 1], s[m_ - 2], s[m_ - 3])) {}

    // Advances v from t_hi back to t_lo with weight theta on the implicit side.
    void step(std::vector<double>& v, double t_hi, double t_lo, double theta) const {
        const double dt = t_hi - t_lo;
        const std::size_t n = m_ - 2;
        std::vector<double> a(n), b(n), c(n), d(n);
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t i = j + 1;
            const double lv = op_.lower[i] * v[i - 1] + op_.diag[i] * v[i] + op_.upper[i] * v[i + 1];
            const double f = theta * coeffs_.sources.net(s_[i], t_lo) + (1.0 - theta) * coeffs_.sources.net(s_[i], t_hi);
            d[j] = v[i] + (1.0 - theta) * dt * lv + dt * f;
            a[j] = -theta * dt * op_.lower[i];
            b[j] = 1.0 - theta * dt * op_.diag[i];
            c[j] = -theta * dt * op_.upper[i];
        }
        // Eliminate the boundary unknowns through the linearity conditions.
        b[0] += a[0] * lo_edge_.alpha;
        c[0] += a[0] * lo_edge_.beta;
        a[0] = 0.0;
        b[n - 1] += c[n - 1] * hi_edge_.alpha;
        a[n - 1] += c[n - 1] * hi_edge_.beta;
        c[n - 1] = 0.0;
        thomas_solve(a, b, c, d);
        for (std::size_t j = 0; j < n; ++j) v[j + 1] = d[j];
        v[0] = lo_edge_.alpha * v[1] + lo_edge_.beta * v[2];
        v[m_ - 1] = hi_edge_.alpha * v[m_ - 2] + hi_edge_.beta * v[m_ - 3];
    }

private:
    const PdeCoefficients& coeffs_;
    const std::vector<double>& s_;
    const Operator& op_;
    std::size_t m_;
    Extrapolation lo_edge_, hi_edge_;
};

} // namespace

PdeSolution solve_pde(const PdeCoefficients& coeffs, const Grid& grid) {
    coeffs.validate();
    grid.validate();
    const std::size_t m = grid.s_nodes.size();
    const int n_steps = grid.t_steps;
    const double T = coeffs.maturity;

    std::vector<double> x(m);
    for (std::size_t i = 0; i < m; ++i) x[i] = std::log(grid.s_nodes[i]);

    Scheme scheme = grid.scheme;
    Operator op = build_operator(x, coeffs.sigma, coeffs.financing_rate, coeffs.discount_rate, false);
    if (!central_is_monotone(op)) {
        // Mesh Peclet condition fails: central convection would oscillate.
        op = build_operator(x, coeffs.sigma, coeffs.financing_rate, coeffs.discount_rate, true);
        scheme = Scheme::Implicit;
    }

    PdeSolution sol;
    sol.s_nodes = grid.s_nodes;
    sol.scheme_used = scheme;
    sol.times.resize(static_cast<std::size_t>(n_steps) + 1);
    for (int n = 0; n <= n_steps; ++n) sol.times[n] = T * static_cast<double>(n) / n_steps;
    sol.times.back() = T;
    sol.values.assign(sol.times.size() * m, 0.0);

    const Stepper stepper(coeffs, grid.s_nodes, op);
    std::vector<double> v(m, 0.0); // v(S, T) = 0
    for (int n = n_steps - 1; n >= 0; --n) {
        const double t_hi = sol.times[n + 1];
        const double t_lo = sol.times[n];
        if (scheme == Scheme::Implicit) {
            stepper.step(v, t_hi, t_lo, 1.0);
        } else if (n == n_steps - 1) {
            // Rannacher startup: two implicit half steps.
            const double t_mid = 0.5 * (t_hi + t_lo);
            stepper.step(v, t_hi, t_mid, 1.0);
            stepper.step(v, t_mid, t_lo, 1.0);
        } else {
            stepper.step(v, t_hi, t_lo, 0.5);
        }
        std::copy(v.begin(), v.end(), sol.values.begin() + static_cast<std::ptrdiff_t>(n * m));
    }
    return sol;
}

MonteCarloEstimate feynman_kac_mc(const PdeCoefficients& coeffs, double s0, std::size_t n_paths,
                                  std::uint64_t seed, int time_steps, const std::optional<KouParams>& jumps) {
    coeffs.validate();
    if (n_paths < 100) throw std::invalid_argument("feynman_kac_mc: n_paths must be >= 100");
    if (time_steps < 1) throw std::invalid_argument("feynman_kac_mc: time_steps must be >= 1");
    if (!(s0 > 0.0)) throw std::invalid_argument("feynman_kac_mc: s0 must be > 0");
    if (jumps) {
        jumps->validate();
        if (jumps->jump_intensity > 0.0 && jumps->mean_up >= 1.0)
            throw std::invalid_argument("feynman_kac_mc: mean up-jump must be < 1 for a finite compensator");
    }

    const double T = coeffs.maturity;
    const double dt = T / time_steps;
    const double r = coeffs.discount_rate;
    const double sig = coeffs.sigma;
    double jump_comp = 0.0;
    if (jumps && jumps->jump_intensity > 0.0) {
        const double mean_jump_factor =
            jumps->p_up / (1.0 - jumps->mean_up) + (1.0 - jumps->p_up) / (1.0 + jumps->mean_down) - 1.0;
        jump_comp = jumps->jump_intensity * mean_jump_factor;
    }
    const double drift = (coeffs.financing_rate - 0.5 * sig * sig - jump_comp) * dt;
    const double vol = sig * std::sqrt(dt);

    // Exact discount integral over each step: \int_{t_i}^{t_{i+1}} e^{-r s} ds.
    std::vector<double> step_weight(static_cast<std::size_t>(time_steps));
    for (int i = 0; i < time_steps; ++i) {
        const double a = i * dt;
        step_weight[i] = std::exp(-r * a) * (r == 0.0 ? dt : -std::expm1(-r * dt) / r);
    }

    const bool path_dependent = coeffs.sources.depends_on_price();
    std::vector<double> payoff(n_paths);
    for_each_chunk(chunk_count(n_paths), [&](std::size_t c) {
        auto rng = substream(seed, c, /*stream_tag=*/2);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::optional<std::poisson_distribution<int>> n_jumps;
        if (jumps && jumps->jump_intensity > 0.0) n_jumps.emplace(jumps->jump_intensity * dt);
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        const std::size_t begin = c * kChunkSize;
        const std::size_t end = std::min(n_paths, begin + kChunkSize);
        for (std::size_t p = begin; p < end; ++p) {
            double s = s0;
            double f_prev = coeffs.sources.net(s, 0.0);
            double acc = 0.0;
            for (int i = 0; i < time_steps; ++i) {
                if (path_dependent) {
                    double z = drift + vol * gauss(rng);
                    if (n_jumps) {
                        const int k = (*n_jumps)(rng);
                        for (int j = 0; j < k; ++j) {
                            const bool up = coin(rng) < jumps->p_up;
                            std::exponential_distribution<double> size(1.0 / (up ? jumps->mean_up : jumps->mean_down));
                            z += up ? size(rng) : -size(rng);
                        }
                    }
                    s *= std::exp(z);
                }
                const double f_next = coeffs.sources.net(s, (i + 1) * dt);
                acc += step_weight[i] * 0.5 * (f_prev + f_next);
                f_prev = f_next;
            }
            payoff[p] = acc;
        }
    });

    long double sum = 0.0L, sum_sq = 0.0L;
    for (double x : payoff) {
        sum += x;
        sum_sq += static_cast<long double>(x) * x;
    }
    const auto n = static_cast<long double>(n_paths);
    const long double mean = sum / n;
    const long double var = std::max(0.0L, (sum_sq - n * mean * mean) / (n - 1.0L));
    return {static_cast<double>(mean), static_cast<double>(std::sqrt(var / n))};
}

ConvergenceReport convergence_report(const PdeCoefficients& coeffs, const std::vector<Grid>& grids, double s0) {
    if (grids.size() < 3) throw std::invalid_argument("convergence_report: need at least 3 nested grids");
    ConvergenceReport rep;
    for (const auto& g : grids) rep.values.push_back(solve_pde(coeffs, g).value_at(s0));

    auto refinement = [&](std::size_t k) {
        const double rt = static_cast<double>(grids[k + 1].t_steps) / grids[k].t_steps;
        const double rs = static_cast<double>(grids[k + 1].s_nodes.size() - 1) / (grids[k].s_nodes.size() - 1);
        return std::max(rt, rs);
    };

    rep.exact = true;
    for (std::size_t k = 0; k + 1 < rep.values.size(); ++k)
        if (rep.values[k + 1] != rep.values[k]) rep.exact = false;
    if (rep.exact) {
        rep.observed_order = INFINITY;
        return rep;
    }
    for (std::size_t k = 0; k + 2 < rep.values.size(); ++k) {
        const double d1 = std::abs(rep.values[k + 1] - rep.values[k]);
        const double d2 = std::abs(rep.values[k + 2] - rep.values[k + 1]);
        rep.orders.push_back(std::log(d1 / d2) / std::log(refinement(k + 1)));
    }
    rep.observed_order = rep.orders.back();
    return rep;
}

} // namespace repokva
