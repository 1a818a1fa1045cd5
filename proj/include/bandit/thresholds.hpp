#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include <boost/math/tools/toms748_solve.hpp>

#include "bandit/errors.hpp"

namespace bandit {

/// Weighting g(k) of future rewards in the return sum_{k=0}^{N} g(k) r_{t+k+1}.
/// Geometric: g(k) = gamma^k with an infinite horizon. Uniform: g(k) = 1 for k <= N.
template <typename Scalar>
class DiscountSpec {
public:
    enum class Kind { geometric, uniform_finite };

    static DiscountSpec geometric(Scalar gamma)
    {
        if (!(gamma >= 0 && gamma < 1))
            throw std::invalid_argument("geometric discount needs gamma in [0,1); the mass diverges otherwise");
        return DiscountSpec(Kind::geometric, gamma, 0);
    }

    static DiscountSpec uniform_finite(std::int64_t horizon)
    {
        if (horizon < 0) throw std::invalid_argument("finite horizon N must be non-negative");
        return DiscountSpec(Kind::uniform_finite, Scalar(1), horizon);
    }

    Kind kind() const { return kind_; }
    Scalar gamma() const { return gamma_; }
    std::int64_t horizon() const { return horizon_; }

    Scalar weight(std::int64_t k) const
    {
        if (kind_ == Kind::geometric) return std::pow(gamma_, static_cast<Scalar>(k));
        return k <= horizon_ ? Scalar(1) : Scalar(0);
    }

    /// sum_{k=0}^{N} g(k)
    Scalar total_mass() const
    {
        if (kind_ == Kind::geometric) return Scalar(1) / (Scalar(1) - gamma_);
        return static_cast<Scalar>(horizon_ + 1);
    }

    /// sum_{k=0}^{T-1} g(k)
    Scalar head_mass(std::int64_t T) const
    {
        if (T <= 0) return Scalar(0);
        if (kind_ == Kind::geometric)
            return (Scalar(1) - std::pow(gamma_, static_cast<Scalar>(T))) / (Scalar(1) - gamma_);
        return static_cast<Scalar>(std::min(T, horizon_ + 1));
    }

    /// sum_{k=T}^{N} g(k)
    Scalar tail_mass(std::int64_t T) const
    {
        if (T <= 0) return total_mass();
        if (kind_ == Kind::geometric) return std::pow(gamma_, static_cast<Scalar>(T)) / (Scalar(1) - gamma_);
        return static_cast<Scalar>(std::max<std::int64_t>(0, horizon_ + 1 - T));
    }

private:
    DiscountSpec(Kind kind, Scalar gamma, std::int64_t horizon) : kind_(kind), gamma_(gamma), horizon_(horizon) {}

    Kind kind_;
    Scalar gamma_;
    std::int64_t horizon_;
};

/// Inputs of the exploration bound: greedy mean, margin, tail probability
/// p = P(q_i >= q_j + delta), reward floor b and commitment length T.
template <typename Scalar>
struct ThresholdQuery {
    Scalar q_bar_j;
    Scalar delta;
    Scalar p_i;
    Scalar b;
    std::int64_t T;
    DiscountSpec<Scalar> discount;
};

namespace detail {

template <typename Scalar>
void check_probability(Scalar p, const char* what)
{
    if (!(p >= 0 && p <= 1)) throw std::invalid_argument(std::string(what) + " must lie in [0,1]");
}

}  // namespace detail

/// Lower bound on the return of playing i for T steps then acting greedily:
///   U = sum_{k>=T} g(k) [(q_j + d) p + q_j (1 - p)] + sum_{k<T} g(k) [(q_j + d) p + b (1 - p)],
/// evaluated as mass (q_j + d p) + (1 - p) head(T) (b - q_j).
template <typename Scalar>
Scalar exploration_utility(const ThresholdQuery<Scalar>& q)
{
    detail::check_probability(q.p_i, "p_i");
    if (q.T < 1) throw std::invalid_argument("commitment length T must be at least 1");
    if (q.q_bar_j < q.b) throw std::invalid_argument("greedy mean must not lie below the reward floor b");
    const Scalar mass = q.discount.total_mass();
    return mass * (q.q_bar_j + q.delta * q.p_i) + (Scalar(1) - q.p_i) * q.discount.head_mass(q.T) * (q.b - q.q_bar_j);
}

/// Return of simply playing the greedy arm: q_j * sum g(k).
template <typename Scalar>
Scalar greedy_utility(Scalar q_bar_j, const DiscountSpec<Scalar>& discount)
{
    return q_bar_j * discount.total_mass();
}

/// Explore-or-exploit under infinite-horizon geometric discounting with b = 0:
/// explore iff (q - (q + d) p) / ((1 - p) q) < gamma. When (1 - p) q = 0 the
/// multiplied-out form q - (q + d) p < gamma (1 - p) q decides.
template <typename Scalar>
bool should_explore_geometric(Scalar q_bar_j, Scalar delta, Scalar p_i, Scalar gamma)
{
    if (!(delta > 0)) throw std::invalid_argument("margin delta must be positive");
    detail::check_probability(p_i, "p_i");
    if (!(gamma >= 0 && gamma < 1)) throw std::invalid_argument("gamma must lie in [0,1)");
    if (q_bar_j < 0) throw std::invalid_argument("greedy mean must be non-negative (b = 0)");

    const Scalar numerator = q_bar_j - (q_bar_j + delta) * p_i;
    const Scalar denominator = (Scalar(1) - p_i) * q_bar_j;
    if (denominator > 0) return numerator / denominator < gamma;
    return numerator < gamma * denominator;
}

/// Gamma above which exploration pays when delta is the median margin (p = 1/2).
/// Returns -infinity when q_j = 0: every gamma explores.
template <typename Scalar>
Scalar median_gamma_threshold(Scalar q_bar_j, Scalar delta_median)
{
    if (q_bar_j < 0) throw std::invalid_argument("greedy mean must be non-negative (b = 0)");
    if (q_bar_j == 0) return -std::numeric_limits<Scalar>::infinity();
    return (q_bar_j - delta_median) / q_bar_j;
}

/// Finite-horizon (gamma = 1, N steps) rule: explore iff N d p > q - (q + d) p.
template <typename Scalar>
bool should_explore_finite(Scalar q_bar_j, Scalar delta, Scalar p_i, std::int64_t N)
{
    if (!(delta > 0)) throw std::invalid_argument("margin delta must be positive");
    detail::check_probability(p_i, "p_i");
    if (N < 1) throw std::invalid_argument("horizon N must be at least 1");
    return static_cast<Scalar>(N) * delta * p_i > q_bar_j - (q_bar_j + delta) * p_i;
}

/// Exploration is required when the best attainable d p / (1 - p) beats the
/// discounted greedy shortfall (1 - gamma) q_j.
template <typename Scalar>
bool gamma_dist_condition(Scalar f_max, Scalar q_bar_j, Scalar gamma)
{
    return f_max - (Scalar(1) - gamma) * q_bar_j > 0;
}

/// Shifted exponential belief: P(X > d) = exp(-beta (d - mu)) for d > mu, else 1.
template <typename Scalar>
struct ExponentialBelief {
    Scalar beta;
    Scalar mu;

    Scalar tail(Scalar d) const { return d > mu ? std::exp(-beta * (d - mu)) : Scalar(1); }
};

template <typename Scalar>
struct ExponentialOptimum {
    Scalar delta_star;
    Scalar f_at_star;
    bool degenerate;  ///< c = 0: supremum 1/beta approached as delta -> 0+
};

/// f(d) = d / (exp(beta (c + d)) - 1), the margin-weighted odds for an
/// exponential belief at offset c = q_j - mu.
template <typename Scalar>
Scalar exponential_odds_objective(Scalar beta, Scalar c, Scalar delta)
{
    return delta / std::expm1(beta * (c + delta));
}

/// Bracketed root of fn on [lo, hi]: TOMS 748 iteration, stopping when the
/// bracket is narrower than tol or |fn| <= tol. Throws BracketError without a
/// sign change.
template <typename Scalar, typename Fn>
Scalar solve_scalar_root(Fn&& fn, Scalar lo, Scalar hi, Scalar tol)
{
    if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
    if (lo > hi) std::swap(lo, hi);
    const Scalar f_lo = fn(lo);
    const Scalar f_hi = fn(hi);
    if (f_lo == 0) return lo;
    if (f_hi == 0) return hi;
    if ((f_lo > 0) == (f_hi > 0)) throw BracketError("no sign change in root bracket");

    Scalar best = lo;
    Scalar best_residual = std::abs(f_lo);
    auto tracked = [&](Scalar x) {
        const Scalar v = fn(x);
        if (std::abs(v) < best_residual) {
            best = x;
            best_residual = std::abs(v);
        }
        return v;
    };
    auto done = [&](Scalar a, Scalar b) { return std::abs(b - a) <= tol || best_residual <= tol; };
    std::uintmax_t max_iter = 500;
    const auto bracket = boost::math::tools::toms748_solve(tracked, lo, hi, f_lo, f_hi, done, max_iter);
    if (best_residual <= tol) return best;
    return (bracket.first + bracket.second) / 2;
}

/// Maximizer of f(d) = d / (exp(beta (c + d)) - 1) over d > 0, c = q_j - mu.
/// Stationarity gives exp(beta (c + d)) (1 - beta d) = 1, whose root lies in
/// (0, 1/beta) for c > 0; solved by Newton steps kept inside a shrinking
/// bracket, bisecting whenever a step leaves it.
template <typename Scalar>
ExponentialOptimum<Scalar> exponential_delta_star(const ExponentialBelief<Scalar>& belief, Scalar q_bar_j)
{
    if (!(belief.beta > 0)) throw std::invalid_argument("exponential rate beta must be positive");
    const Scalar beta = belief.beta;
    const Scalar c = q_bar_j - belief.mu;
    if (c < 0) throw std::invalid_argument("greedy mean lies below the belief location");
    if (c == 0) return {Scalar(0), Scalar(1) / beta, true};

    auto residual = [&](Scalar d) { return std::exp(beta * (c + d)) * (Scalar(1) - d * beta) - Scalar(1); };
    // d/dd of the residual: -beta^2 d exp(beta (c + d))
    auto slope = [&](Scalar d) { return -beta * beta * d * std::exp(beta * (c + d)); };

    constexpr Scalar tol = Scalar(1e-10);
    Scalar lo = 0;             // residual > 0
    Scalar hi = Scalar(1) / beta;  // residual = -1
    Scalar d = hi / 2;
    for (int iter = 0; iter < 200; ++iter) {
        const Scalar r = residual(d);
        if (std::abs(r) <= tol) break;
        if (r > 0)
            lo = d;
        else
            hi = d;
        const Scalar s = slope(d);
        Scalar next = (s != 0) ? d - r / s : (lo + hi) / 2;
        if (!(next > lo && next < hi)) next = (lo + hi) / 2;
        if (hi - lo <= std::numeric_limits<Scalar>::epsilon() * hi) {
            d = next;
            break;
        }
        d = next;
    }
    return {d, exponential_odds_objective(beta, c, d), false};
}

}  // namespace bandit
