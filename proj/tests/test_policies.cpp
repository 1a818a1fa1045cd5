#include <doctest.h>

#include <cmath>
#include <vector>

#include "bandit/errors.hpp"
#include "bandit/policies.hpp"
#include "oracles.hpp"

using namespace bandit;
using Discount = DiscountSpec<double>;

namespace {

BeliefEnsembleD ensemble(const std::vector<std::vector<double>>& rows)
{
    BeliefEnsembleD e;
    e.members.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t k = 0; k < rows[i].size(); ++k)
            e.members(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    return e;
}

BeliefEnsembleD random_ensemble(Eigen::Index arms, Eigen::Index K, Rng& rng)
{
    return ensemble_init<double>(arms, K, UniformPrior<double>{}, rng);
}

bool attains_max(const SelectionTrace<double>& trace)
{
    return trace.scores(trace.chosen_arm) == trace.scores.maxCoeff();
}

}  // namespace

TEST_CASE("epsilon_greedy_select")
{
    Rng rng(1);
    Eigen::Vector4d estimates(0.1, 0.7, 0.3, 0.2);
    for (int n = 0; n < 1000; ++n) CHECK(epsilon_greedy_select(estimates, 0.0, rng) == 1);

    std::vector<int> counts(4, 0);
    for (int n = 0; n < 10000; ++n) ++counts[static_cast<std::size_t>(epsilon_greedy_select(estimates, 1.0, rng))];
    for (int c : counts) CHECK(std::abs(c / 10000.0 - 0.25) < 0.02);

    Eigen::Vector2d two(0.9, 0.1);
    int first = 0;
    for (int n = 0; n < 10000; ++n) first += epsilon_greedy_select(two, 0.5, rng) == 0;
    CHECK(std::abs(first / 10000.0 - 0.75) < 0.02);

    CHECK_THROWS_AS(epsilon_greedy_select(two, 1.5, rng), std::invalid_argument);
}

TEST_CASE("point_update")
{
    CHECK(point_update(0.5, 0.5, 0.3) == 0.5);
    CHECK(point_update(0.0, 1.0, 0.01) == doctest::Approx(0.01));
    CHECK(point_update(point_update(0.2, 1.0, 0.1), 1.0, 0.1) == doctest::Approx(0.352));
}

TEST_CASE("thompson_select")
{
    Rng rng(2);
    const auto degenerate = ensemble({{0.8, 0.8, 0.8}, {0.2, 0.2, 0.2}});
    for (int n = 0; n < 200; ++n) CHECK(thompson_select(degenerate, rng).chosen_arm == 0);

    SUBCASE("beta-distributed ensembles")
    {
        std::mt19937_64 draw(3);
        BeliefEnsembleD e;
        e.members.resize(2, 10000);
        for (Eigen::Index k = 0; k < 10000; ++k) {
            e.members(0, k) = oracle::beta_sample(2, 1, draw);
            e.members(1, k) = oracle::beta_sample(1, 2, draw);
        }
        int first = 0;
        for (int n = 0; n < 10000; ++n) first += thompson_select(e, rng).chosen_arm == 0;
        CHECK(std::abs(first / 10000.0 - 5.0 / 6.0) < 0.02);
    }
    SUBCASE("identical ensembles split evenly")
    {
        const auto same = ensemble({{0.3, 0.6}, {0.3, 0.6}});
        int first = 0;
        for (int n = 0; n < 10000; ++n) first += thompson_select(same, rng).chosen_arm == 0;
        CHECK(std::abs(first / 10000.0 - 0.5) < 0.02);
    }
}

TEST_CASE("optimistic_stochastic_select")
{
    Rng rng(4);
    const auto gamma9 = Discount::geometric(0.9);

    SUBCASE("degenerate ensembles reduce to greedy")
    {
        const auto e = ensemble({{0.2, 0.2}, {0.7, 0.7}, {0.4, 0.4}});
        for (int n = 0; n < 200; ++n) CHECK(optimistic_stochastic_select(e, gamma9, 0.0, rng).chosen_arm == 1);
    }

    const auto e = ensemble({{0.5, 0.5}, {0.1, 0.9}});
    SUBCASE("scores of the sampled margins")
    {
        CHECK(optimistic_score(e, 1, 0.5, 0.9, gamma9, 0.0) == doctest::Approx(6.75));
        CHECK(oracle::exploration_utility_series(0.5, 0.4, 0.5, 0.0, 1, true, 0.9, 0) == doctest::Approx(6.75));
        CHECK(optimistic_score(e, 1, 0.5, 0.1, gamma9, 0.0) == doctest::Approx(1.0));
        CHECK(oracle::exploration_utility_series(0.5, -0.4, 1.0, 0.0, 1, true, 0.9, 0) == doctest::Approx(1.0));
        CHECK(greedy_utility(0.5, gamma9) == doctest::Approx(5.0));
    }
    SUBCASE("selector follows the sampled member")
    {
        // Both means are 0.5, so condition on the tie-break landing on arm 0.
        int high = 0, low = 0;
        for (int n = 0; n < 2000; ++n) {
            const auto trace = optimistic_stochastic_select(e, gamma9, 0.0, rng);
            CHECK(attains_max(trace));
            if (trace.greedy_arm != 0) continue;
            CHECK(trace.scores(0) == doctest::Approx(5.0));
            if (e.members(1, trace.sampled_members(1)) == 0.9) {
                ++high;
                CHECK(trace.sampled_deltas(1) == doctest::Approx(0.4));
                CHECK(trace.scores(1) == doctest::Approx(6.75));
                CHECK(trace.chosen_arm == 1);
            } else {
                ++low;
                CHECK(trace.sampled_deltas(1) == doctest::Approx(-0.4));
                CHECK(trace.scores(1) == doctest::Approx(1.0));
                CHECK(trace.chosen_arm == 0);
            }
        }
        CHECK(high > 300);
        CHECK(low > 300);
    }
}

TEST_CASE("optimistic_exists_delta_select")
{
    Rng rng(5);
    const auto gamma9 = Discount::geometric(0.9);
    const auto flat = ensemble({{0.4, 0.4}, {0.4, 0.4}, {0.4, 0.4}});
    for (int n = 0; n < 100; ++n) {
        const auto arm = optimistic_exists_delta_select(flat, gamma9, 0.0, 1e-3, rng);
        CHECK(arm >= 0);
        CHECK(arm < 3);
    }

    const auto e = ensemble({{0.5, 0.5}, {0.1, 0.9}});
    for (int n = 0; n < 100; ++n) CHECK(optimistic_exists_delta_select(e, gamma9, 0.0, 1e-3, rng) == 1);

    SUBCASE("myopic discount never favours a lower mean")
    {
        const auto myopic = Discount::geometric(0.0);
        for (int trial = 0; trial < 300; ++trial) {
            const auto fixture = random_ensemble(2 + trial % 3, 8, rng);
            const auto means = ensemble_means(fixture);
            const auto arm = optimistic_exists_delta_select(fixture, myopic, 0.0, 1e-3, rng);
            CHECK(means(arm) == means.maxCoeff());
        }
    }
    CHECK_THROWS_AS(optimistic_exists_delta_select(e, gamma9, 0.0, 0.0, rng), std::invalid_argument);
}

TEST_CASE("vpi_select")
{
    Rng rng(6);
    const auto degenerate = ensemble({{0.1, 0.1}, {0.6, 0.6}, {0.3, 0.3}});
    for (int n = 0; n < 100; ++n) CHECK(vpi_select(degenerate, rng).chosen_arm == 1);

    const auto challenger = ensemble({{0.6, 0.6}, {0.2, 1.0}});
    for (int n = 0; n < 100; ++n) {
        const auto trace = vpi_select(challenger, rng);
        CHECK(trace.chosen_arm == 1);
        CHECK(trace.scores(1) == doctest::Approx(0.8));
        CHECK(trace.scores(0) == doctest::Approx(0.6));
    }

    const auto same = ensemble({{0.2, 0.7}, {0.2, 0.7}});
    int first = 0;
    for (int n = 0; n < 10000; ++n) first += vpi_select(same, rng).chosen_arm == 0;
    CHECK(std::abs(first / 10000.0 - 0.5) < 0.02);

    CHECK_THROWS_AS(vpi_select(ensemble({{0.5}}), rng), std::invalid_argument);
}

TEST_CASE("explore_then_commit_select")
{
    Rng rng(7);
    CHECK(explore_then_commit_select(Eigen::Vector3d(2, 1, 2), Eigen::Vector3d(0.9, 0.1, 0.5), 2, rng) == 1);
    for (int n = 0; n < 50; ++n)
        CHECK(explore_then_commit_select(Eigen::Vector2d(5, 5), Eigen::Vector2d(0.3, 0.7), 2, rng) == 1);
    CHECK_THROWS_AS(explore_then_commit_select(Eigen::Vector2d(0, 0), Eigen::Vector2d(0, 0), 0, rng),
                    std::invalid_argument);

    PolicyConfig config;
    config.kind = PolicyKind::explore_then_commit;
    config.commit_budget = 1;
    auto agent = make_agent(config, 2, rng);
    CHECK(agent->select(rng) == 0);
    agent->observe(0, 0.0, rng);
    CHECK(agent->select(rng) == 1);
    agent->observe(1, 1.0, rng);
    for (int n = 0; n < 20; ++n) {
        CHECK(agent->select(rng) == 1);
        agent->observe(1, 0.0, rng);
    }
}

TEST_CASE("policy configuration")
{
    CHECK(parse_kind("opt") == PolicyKind::optimistic_stochastic);
    CHECK(parse_kind("optimistic-exists-delta") == PolicyKind::optimistic_exists_delta);
    CHECK(parse_kind("e3") == PolicyKind::explore_then_commit);
    CHECK_FALSE(parse_kind("softmax"));
    for (auto kind : {PolicyKind::epsilon_greedy, PolicyKind::thompson, PolicyKind::optimistic_stochastic,
                      PolicyKind::optimistic_exists_delta, PolicyKind::vpi, PolicyKind::explore_then_commit})
        CHECK(parse_kind(kind_name(kind)) == kind);

    PolicyConfig opt;
    opt.kind = PolicyKind::optimistic_stochastic;
    opt.gamma = 0.99;
    CHECK(policy_label(opt) == "opt(gamma=0.99)");
    opt.horizon = 50;
    CHECK(policy_label(opt) == "opt(N=50)");
    CHECK(discount_of(opt).total_mass() == 51);

    auto key_of = [](const PolicyConfig& c) {
        try {
            validate(c);
        } catch (const ConfigError& e) {
            return e.key();
        }
        return std::string();
    };
    PolicyConfig bad = opt;
    bad.horizon.reset();
    bad.gamma = 1.0;
    CHECK(key_of(bad) == "gamma");
    bad = opt;
    bad.b = 0.2;
    CHECK(key_of(bad) == "b");
    bad = PolicyConfig{};
    bad.epsilon = -0.1;
    CHECK(key_of(bad) == "epsilon");
    bad = PolicyConfig{};
    bad.kind = PolicyKind::thompson;
    bad.K = 0;
    CHECK(key_of(bad) == "K");
    bad = PolicyConfig{};
    bad.label = "a,b";
    CHECK(key_of(bad) == "label");
    // gamma is irrelevant to Thompson sampling
    bad = PolicyConfig{};
    bad.kind = PolicyKind::thompson;
    bad.gamma = 3.0;
    CHECK(key_of(bad).empty());
}

TEST_CASE("single-arm agents always play arm 0")
{
    Rng rng(8);
    for (auto kind : {PolicyKind::epsilon_greedy, PolicyKind::thompson, PolicyKind::optimistic_stochastic,
                      PolicyKind::optimistic_exists_delta, PolicyKind::vpi, PolicyKind::explore_then_commit}) {
        PolicyConfig config;
        config.kind = kind;
        config.epsilon = 0.5;
        auto agent = make_agent(config, 1, rng);
        for (int t = 0; t < 50; ++t) {
            CHECK(agent->select(rng) == 0);
            agent->observe(0, t % 2, rng);
        }
    }
}

TEST_CASE("property: chosen arm attains the maximal score")
{
    Rng rng(9);
    for (int trial = 0; trial < 500; ++trial) {
        const auto arms = 2 + trial % 6;
        const auto e = random_ensemble(arms, 1 + trial % 16, rng);
        const auto discount = trial % 2 ? Discount::geometric(uniform01(rng) * 0.99)
                                        : Discount::uniform_finite(1 + trial % 40);
        CHECK(attains_max(thompson_select(e, rng)));
        CHECK(attains_max(optimistic_stochastic_select(e, discount, -uniform01(rng), rng)));
        CHECK(attains_max(vpi_select(e, rng)));
    }
}

TEST_CASE("property: degenerate ensembles reduce to greedy")
{
    Rng rng(10);
    for (int trial = 0; trial < 300; ++trial) {
        const Eigen::Index arms = 2 + trial % 5;
        BeliefEnsembleD e;
        e.members.resize(arms, 4);
        for (Eigen::Index i = 0; i < arms; ++i)
            e.members.row(i).setConstant(std::round(uniform01(rng) * 8) / 8);
        const auto means = ensemble_means(e);
        const double best = means.maxCoeff();
        const auto discount = Discount::geometric(uniform01(rng) * 0.99);
        CHECK(means(thompson_select(e, rng).chosen_arm) == best);
        CHECK(means(optimistic_stochastic_select(e, discount, 0.0, rng).chosen_arm) == best);
        CHECK(means(optimistic_exists_delta_select(e, discount, 0.0, 1e-2, rng)) == best);
        CHECK(means(vpi_select(e, rng).chosen_arm) == best);
    }
}

TEST_CASE("property: exploration is an up-set in gamma")
{
    Rng fixtures(11);
    std::vector<double> gammas;
    for (int n = 0; n < 100; ++n) gammas.push_back(n * 0.01);
    int switched = 0;
    for (int trial = 0; trial < 300; ++trial) {
        // arm 0 is the greedy arm; arm 1 has a member above its mean
        BeliefEnsembleD e;
        e.members.resize(2, 8);
        e.members.row(0).setConstant(0.3 + 0.6 * uniform01(fixtures));
        for (Eigen::Index k = 0; k < 8; ++k) e.members(1, k) = 0.5 * uniform01(fixtures) * e.members(0, 0);
        e.members(1, 0) = e.members(0, 0) + (1 - e.members(0, 0)) * (0.05 + 0.95 * uniform01(fixtures));
        const auto seed = fixtures();

        bool explored = false;
        for (double g : gammas) {
            Rng pinned(seed);
            const auto trace = optimistic_stochastic_select(e, Discount::geometric(g), 0.0, pinned);
            REQUIRE(trace.greedy_arm == 0);
            const bool explores = trace.chosen_arm == 1;
            if (explored) CHECK(explores);
            if (explores && !explored && g > 0) ++switched;
            explored = explored || explores;
        }
    }
    CHECK(switched > 10);
}

TEST_CASE("property: Thompson frequencies match exhaustive enumeration")
{
    Rng rng(12);
    for (int trial = 0; trial < 6; ++trial) {
        const Eigen::Index arms = 2 + trial % 2;
        const Eigen::Index K = 2 + trial % 3;
        BeliefEnsembleD e = random_ensemble(arms, K, rng);
        if (trial == 5) e.members(1, 0) = e.members(0, 0);
        const auto exact = oracle::thompson_win_probabilities(e.members);
        std::vector<int> counts(static_cast<std::size_t>(arms), 0);
        for (int n = 0; n < 10000; ++n) ++counts[static_cast<std::size_t>(thompson_select(e, rng).chosen_arm)];
        for (Eigen::Index a = 0; a < arms; ++a)
            CHECK(std::abs(counts[static_cast<std::size_t>(a)] / 10000.0 - exact[static_cast<std::size_t>(a)]) < 0.02);
    }
}

TEST_CASE("property: identical seeds give identical selections")
{
    for (auto kind : {PolicyKind::epsilon_greedy, PolicyKind::thompson, PolicyKind::optimistic_stochastic,
                      PolicyKind::optimistic_exists_delta, PolicyKind::vpi, PolicyKind::explore_then_commit}) {
        auto play = [&](std::uint64_t seed) {
            PolicyConfig config;
            config.kind = kind;
            config.commit_budget = 3;
            Rng rng(seed);
            auto agent = make_agent(config, 5, rng);
            std::vector<Eigen::Index> arms;
            for (int t = 0; t < 300; ++t) {
                const auto arm = agent->select(rng);
                arms.push_back(arm);
                agent->observe(arm, uniform01(rng) < 0.1 * static_cast<double>(arm + 1) ? 1.0 : 0.0, rng);
            }
            return arms;
        };
        CHECK(play(21) == play(21));
    }
}
