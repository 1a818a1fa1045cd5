#include <doctest.h>

#include <cmath>
#include <random>

#include "bandit/thresholds.hpp"
#include "oracles.hpp"

using namespace bandit;
using Discount = DiscountSpec<double>;

namespace {

ThresholdQuery<double> query(double q, double delta, double p, double b, std::int64_t T, Discount discount)
{
    return {q, delta, p, b, T, discount};
}

double series(const ThresholdQuery<double>& q)
{
    const bool geometric = q.discount.kind() == Discount::Kind::geometric;
    return oracle::exploration_utility_series(q.q_bar_j, q.delta, q.p_i, q.b, q.T, geometric, q.discount.gamma(),
                                              q.discount.horizon());
}

}  // namespace

TEST_CASE("exploration_utility")
{
    CHECK(exploration_utility(query(0.4, 0.2, 1.0, 0.0, 1, Discount::geometric(0.5))) == doctest::Approx(1.2));

    for (double p : {0.0, 0.3, 1.0})
        for (std::int64_t T : {1, 3, 10}) {
            const auto d = Discount::geometric(0.8);
            CHECK(exploration_utility(query(0.45, 0.0, p, 0.45, T, d)) == doctest::Approx(0.45 * d.total_mass()));
        }

    const auto worked = query(0.5, 0.1, 0.3, 0.0, 2, Discount::geometric(0.9));
    CHECK(std::abs(series(worked) - 4.635) < 1e-12);
    CHECK(std::abs(exploration_utility(worked) - 4.635) < 1e-12);

    CHECK_THROWS_AS(Discount::geometric(1.0), std::invalid_argument);
    CHECK_THROWS_AS(exploration_utility(query(0.5, 0.1, 1.5, 0.0, 1, Discount::geometric(0.5))),
                    std::invalid_argument);
    CHECK_THROWS_AS(exploration_utility(query(0.5, 0.1, 0.5, 0.0, 0, Discount::geometric(0.5))),
                    std::invalid_argument);
}

TEST_CASE("greedy_utility")
{
    CHECK(greedy_utility(0.5, Discount::geometric(0.9)) == doctest::Approx(5.0));
    CHECK(greedy_utility(0.0, Discount::geometric(0.3)) == 0.0);
    CHECK(greedy_utility(0.0, Discount::uniform_finite(12)) == 0.0);
    CHECK(oracle::greedy_utility_series(0.25, false, 1.0, 7) == 2.0);
    CHECK(greedy_utility(0.25, Discount::uniform_finite(7)) == 2.0);
}

TEST_CASE("uniform discount masses")
{
    const auto d = Discount::uniform_finite(4);
    CHECK(d.total_mass() == 5);
    CHECK(d.head_mass(2) == 2);
    CHECK(d.tail_mass(2) == 3);
    CHECK(d.head_mass(9) == 5);
    CHECK(d.tail_mass(9) == 0);
}

TEST_CASE("should_explore_geometric")
{
    CHECK(should_explore_geometric(0.5, 0.1, 0.5, 0.9));
    CHECK_FALSE(should_explore_geometric(0.5, 0.1, 0.5, 0.7));
    for (double gamma : {0.0, 0.3, 0.99}) CHECK(should_explore_geometric(0.6, 0.05, 1.0, gamma));

    // (0.9 - 0.95 * 0.2) / (0.8 * 0.9) = 0.98611 > 0.8
    CHECK_FALSE(should_explore_geometric(0.9, 0.05, 0.2, 0.8));
    const auto d = Discount::geometric(0.8);
    CHECK_FALSE(exploration_utility(query(0.9, 0.05, 0.2, 0.0, 1, d)) > greedy_utility(0.9, d));

    SUBCASE("zero greedy mean")
    {
        CHECK(should_explore_geometric(0.0, 0.1, 0.4, 0.5));
        CHECK(should_explore_geometric(0.0, 0.1, 0.4, 0.0));
        CHECK_FALSE(should_explore_geometric(0.0, 0.1, 0.0, 0.5));
    }
    SUBCASE("boundary does not explore")
    {
        // threshold is exactly (0.5 - 0.25) / 0.5 = 0.5
        CHECK_FALSE(should_explore_geometric(0.5, 0.25, 0.5, 0.5));
    }
    CHECK_THROWS_AS(should_explore_geometric(0.5, 0.0, 0.5, 0.9), std::invalid_argument);
    CHECK_THROWS_AS(should_explore_geometric(0.5, -0.1, 0.5, 0.9), std::invalid_argument);
}

TEST_CASE("median_gamma_threshold")
{
    CHECK(median_gamma_threshold(0.5, 0.1) == doctest::Approx(0.8));
    CHECK(median_gamma_threshold(0.4, 0.4) == 0.0);
    CHECK(std::isinf(median_gamma_threshold(0.0, 0.1)));

    const double threshold = median_gamma_threshold(0.6, 0.3);
    CHECK(threshold == doctest::Approx(0.5));
    // boundary of the general rule at p = 1/2, located by bisection on gamma
    const double boundary = oracle::bisect(
        [](double g) { return should_explore_geometric(0.6, 0.3, 0.5, g) ? 1.0 : -1.0; }, 0.0, 0.999);
    CHECK(std::abs(boundary - threshold) < 1e-9);
}

TEST_CASE("should_explore_finite")
{
    for (std::int64_t N : {1, 5, 100}) CHECK_FALSE(should_explore_finite(0.3, 0.2, 0.0, N));
    CHECK(should_explore_finite(0.5, 0.1, 0.5, 10));
    CHECK(oracle::finite_horizon_explores(0.5, 0.1, 0.5, 10));
    CHECK_FALSE(should_explore_finite(0.9, 0.1, 0.1, 1));
    CHECK_FALSE(oracle::finite_horizon_explores(0.9, 0.1, 0.1, 1));
    CHECK_THROWS_AS(should_explore_finite(0.5, 0.0, 0.5, 10), std::invalid_argument);
}

TEST_CASE("gamma_dist_condition with an exponential belief")
{
    CHECK(gamma_dist_condition(1e-6, 0.7, 1.0));

    // f(d) = d P / (1 - P) with P = exp(-(1 + d)), maximised on a fine grid
    const ExponentialBelief<double> belief{1.0, 0.0};
    const double q = 1.0;
    auto f = [&](double d) {
        const double p = belief.tail(q + d);
        return d * p / (1 - p);
    };
    const double f_max = oracle::grid_max(f, 0.0, 10.0, 100000);
    CHECK(f_max == doctest::Approx(0.1586).epsilon(1e-3));
    CHECK(gamma_dist_condition(f_max, q, 0.99));
    CHECK_FALSE(gamma_dist_condition(f_max, q, 0.8));
}

TEST_CASE("exponential_delta_star")
{
    const auto base = exponential_delta_star(ExponentialBelief<double>{1.0, 0.0}, 1.0);
    CHECK_FALSE(base.degenerate);
    const double bisected =
        oracle::bisect([](double d) { return std::exp(1 + d) * (1 - d) - 1; }, 1e-9, 1.0 - 1e-12);
    double grid_arg = 0;
    oracle::grid_max([](double d) { return d / std::expm1(1 + d); }, 0.0, 10.0, 100000, &grid_arg);
    CHECK(std::abs(base.delta_star - 0.8414) < 1e-3);
    CHECK(std::abs(base.delta_star - bisected) < 1e-9);
    CHECK(std::abs(base.delta_star - grid_arg) < 2e-4);

    const auto scaled = exponential_delta_star(ExponentialBelief<double>{2.0, 0.25}, 0.75);
    CHECK(std::abs(scaled.delta_star - 0.4207) < 1e-3);
    CHECK(std::abs(scaled.delta_star - base.delta_star / 2) < 1e-6);

    const auto edge = exponential_delta_star(ExponentialBelief<double>{4.0, 0.3}, 0.3);
    CHECK(edge.degenerate);
    CHECK(edge.delta_star == 0.0);
    CHECK(edge.f_at_star == 0.25);

    CHECK_THROWS_AS(exponential_delta_star(ExponentialBelief<double>{0.0, 0.0}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(exponential_delta_star(ExponentialBelief<double>{1.0, 0.5}, 0.2), std::invalid_argument);
}

TEST_CASE("solve_scalar_root")
{
    CHECK(solve_scalar_root([](double x) { return x - 2; }, 0.0, 5.0, 1e-12) == doctest::Approx(2.0));
    CHECK(std::abs(solve_scalar_root([](double x) { return x * x - 2; }, 0.0, 2.0, 1e-8) - 1.41421356) < 1e-8);
    const double root = solve_scalar_root([](double d) { return std::exp(1 + d) * (1 - d) - 1; }, 0.5, 0.99, 1e-10);
    CHECK(std::abs(root - 0.8414) < 1e-3);
    CHECK(std::abs(root - exponential_delta_star(ExponentialBelief<double>{1.0, 0.0}, 1.0).delta_star) < 1e-8);
    CHECK_THROWS_AS(solve_scalar_root([](double x) { return x * x + 1; }, -1.0, 1.0, 1e-8), BracketError);
}

TEST_CASE("property: utility is non-increasing in the commitment length")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int n = 0; n < 2000; ++n) {
        const double b = -u(rng);
        const double q = b + 2 * u(rng);
        const auto d = n % 2 ? Discount::geometric(u(rng) * 0.999) : Discount::uniform_finite(1 + n % 60);
        const auto base = query(q, u(rng) - 0.3, u(rng), b, 1, d);
        const double u1 = exploration_utility(base);
        for (std::int64_t T = 2; T <= 50; ++T) {
            auto later = base;
            later.T = T;
            CHECK(u1 >= exploration_utility(later) - 1e-12 * std::max(1.0, std::abs(u1)));
        }
    }
}

TEST_CASE("property: the gamma rule is the utility comparison")
{
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int compared = 0;
    for (int n = 0; n < 10000; ++n) {
        const double q = 0.01 + 0.99 * u(rng);
        const double delta = 0.001 + u(rng);
        const double p = 0.999 * u(rng);
        const double gamma = 0.999 * u(rng);
        const auto d = Discount::geometric(gamma);
        const double gap = exploration_utility(query(q, delta, p, 0.0, 1, d)) - greedy_utility(q, d);
        if (std::abs(gap) < 1e-12) continue;
        ++compared;
        CHECK(should_explore_geometric(q, delta, p, gamma) == (gap > 0));
    }
    CHECK(compared > 9900);
}

TEST_CASE("property: median rule matches the general rule at p = 1/2")
{
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int n = 0; n < 10000; ++n) {
        const double q = 0.01 + u(rng);
        const double delta = q * (0.001 + 0.998 * u(rng));
        const double gamma = 0.001 + 0.998 * u(rng);
        const double threshold = median_gamma_threshold(q, delta);
        if (std::abs(gamma - threshold) < 1e-12) continue;
        CHECK(should_explore_geometric(q, delta, 0.5, gamma) == (gamma > threshold));
    }
}

TEST_CASE("property: finite rule matches the N-step return comparison")
{
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int n = 0; n < 10000; ++n) {
        const double q = u(rng);
        const double delta = 0.001 + u(rng);
        const double p = u(rng);
        const std::int64_t N = 1 + static_cast<std::int64_t>(u(rng) * 100);
        const double lhs = static_cast<double>(N) * delta * p;
        const double rhs = q - (q + delta) * p;
        if (std::abs(lhs - rhs) < 1e-9) continue;
        CHECK(should_explore_finite(q, delta, p, N) == oracle::finite_horizon_explores(q, delta, p, N));
        const auto d = Discount::uniform_finite(N);
        CHECK(should_explore_finite(q, delta, p, N) ==
              (exploration_utility(query(q, delta, p, 0.0, 1, d)) > greedy_utility(q, d)));
    }
}

TEST_CASE("property: closed forms match direct summation")
{
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int n = 0; n < 2000; ++n) {
        const double b = -0.5 * u(rng);
        const double q = b + u(rng);
        const double gamma = 0.99 * u(rng);
        const auto T = static_cast<std::int64_t>(1 + u(rng) * 20);
        const auto g = query(q, u(rng) - 0.5, u(rng), b, T, Discount::geometric(gamma));
        const double expected = series(g);
        CHECK(std::abs(exploration_utility(g) - expected) < 1e-12 * std::max(1.0, std::abs(expected)));
        CHECK(std::abs(greedy_utility(q, Discount::geometric(gamma)) -
                       oracle::greedy_utility_series(q, true, gamma, 0)) < 1e-12 * std::max(1.0, q / (1 - gamma)));

        const auto f = query(q, u(rng), u(rng), b, T, Discount::uniform_finite(n % 50));
        CHECK(std::abs(exploration_utility(f) - series(f)) < 1e-12 * std::max(1.0, std::abs(series(f))));
    }
}

TEST_CASE("property: delta star maximises the odds objective")
{
    std::mt19937_64 rng(16);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int n = 0; n < 20; ++n) {
        const double beta = 0.2 + 5 * u(rng);
        const double mu = u(rng) - 0.5;
        const double q = mu + 0.01 + 2 * u(rng);
        const auto opt = exponential_delta_star(ExponentialBelief<double>{beta, mu}, q);
        const double c = q - mu;
        const double f_star = exponential_odds_objective(beta, c, opt.delta_star);
        CHECK(f_star == doctest::Approx(opt.f_at_star));
        const double grid = oracle::grid_max([&](double d) { return d / std::expm1(beta * (c + d)); }, 0.0,
                                             10.0 / beta, 100000);
        CHECK(f_star >= grid - 1e-9);
    }
}
