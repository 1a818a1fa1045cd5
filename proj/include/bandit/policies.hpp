#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bandit/beliefs.hpp"
#include "bandit/random.hpp"
#include "bandit/thresholds.hpp"

namespace bandit {

enum class PolicyKind {
    epsilon_greedy,
    thompson,
    optimistic_stochastic,
    optimistic_exists_delta,
    vpi,
    explore_then_commit,
};

/// Parameters of one roster entry. Only the fields relevant to `kind` are read.
struct PolicyConfig {
    PolicyKind kind = PolicyKind::epsilon_greedy;
    double epsilon = 0.01;
    double alpha = 0.01;
    double gamma = 0.9;
    std::optional<std::int64_t> horizon;  ///< set: uniform finite-horizon discount instead of geometric
    double b = 0.0;
    int K = 16;
    double mask_prob = 0.5;
    StepNoise noise = StepNoise::bernoulli_mask;
    int commit_budget = 16;
    double delta_grid_step = 1e-3;
    std::string label;                   ///< empty: derived from kind and parameters
    std::optional<std::uint64_t> stream;  ///< seed stream; defaults to roster position
};

std::string kind_name(PolicyKind kind);
std::optional<PolicyKind> parse_kind(const std::string& name);

/// Throws ConfigError naming the offending field.
void validate(const PolicyConfig& config);
std::string policy_label(const PolicyConfig& config);
DiscountSpec<double> discount_of(const PolicyConfig& config);

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// What a belief-based selector saw when it chose. `sampled_deltas` is NaN for
/// arms that drew no margin; `sampled_members` is -1 for arms that were not sampled.
template <typename Scalar>
struct SelectionTrace {
    Eigen::Index chosen_arm = 0;
    Eigen::Index greedy_arm = 0;
    Vector<Scalar> scores;
    Vector<Scalar> sampled_deltas;
    Eigen::Matrix<Eigen::Index, Eigen::Dynamic, 1> sampled_members;
};

namespace detail {

template <typename Scalar>
SelectionTrace<Scalar> empty_trace(Eigen::Index num_arms)
{
    SelectionTrace<Scalar> trace;
    trace.scores = Vector<Scalar>::Zero(num_arms);
    trace.sampled_deltas = Vector<Scalar>::Constant(num_arms, std::numeric_limits<Scalar>::quiet_NaN());
    trace.sampled_members = Eigen::Matrix<Eigen::Index, Eigen::Dynamic, 1>::Constant(num_arms, -1);
    return trace;
}

}  // namespace detail

/// q <- q + alpha (r - q)
template <typename Scalar>
Scalar point_update(Scalar estimate, Scalar reward, Scalar alpha)
{
    return estimate + alpha * (reward - estimate);
}

template <typename Derived>
Eigen::Index epsilon_greedy_select(const Eigen::MatrixBase<Derived>& estimates, typename Derived::Scalar epsilon,
                                   Rng& rng)
{
    using Scalar = typename Derived::Scalar;
    if (estimates.size() < 1) throw std::invalid_argument("need at least one arm");
    if (!(epsilon >= 0 && epsilon <= 1)) throw std::invalid_argument("epsilon must lie in [0,1]");
    if (uniform01<Scalar>(rng) < epsilon)
        return static_cast<Eigen::Index>(uniform_index(static_cast<std::size_t>(estimates.size()), rng));
    return static_cast<Eigen::Index>(argmax_random_tie(estimates.derived(), rng));
}

/// One posterior draw per arm; play the largest.
template <typename Scalar>
SelectionTrace<Scalar> thompson_select(const BeliefEnsemble<Scalar>& beliefs, Rng& rng)
{
    auto trace = detail::empty_trace<Scalar>(beliefs.num_arms());
    for (Eigen::Index i = 0; i < beliefs.num_arms(); ++i) {
        const auto k = ensemble_sample_member(beliefs, i, rng);
        trace.sampled_members(i) = k;
        trace.scores(i) = beliefs.members(i, k);
    }
    trace.chosen_arm = static_cast<Eigen::Index>(argmax_random_tie(trace.scores, rng));
    trace.greedy_arm = trace.chosen_arm;
    return trace;
}

/// Score of exploring arm i given a posterior draw x and the greedy mean:
/// U(i, j, 1, x - q_j, b) with p = fraction of members at or above x.
/// The threshold q_j + (x - q_j) is taken as x itself so that a draw from a
/// degenerate arm always counts as reached.
template <typename Scalar>
Scalar optimistic_score(const BeliefEnsemble<Scalar>& beliefs, Eigen::Index arm, Scalar q_bar_j, Scalar sample,
                        const DiscountSpec<Scalar>& discount, Scalar b)
{
    const Scalar p = ensemble_prob_exceeds(beliefs, arm, sample);
    return exploration_utility(ThresholdQuery<Scalar>{q_bar_j, sample - q_bar_j, p, b, 1, discount});
}

/// Optimistic stochastic exploration: greedy arm j scores q_j sum g(k); every
/// other arm scores the one-step exploration bound at a sampled margin.
template <typename Scalar>
SelectionTrace<Scalar> optimistic_stochastic_select(const BeliefEnsemble<Scalar>& beliefs,
                                                    const DiscountSpec<Scalar>& discount, Scalar b, Rng& rng)
{
    const Vector<Scalar> means = ensemble_means(beliefs);
    auto trace = detail::empty_trace<Scalar>(beliefs.num_arms());
    const auto j = static_cast<Eigen::Index>(argmax_random_tie(means, rng));
    trace.greedy_arm = j;
    const Scalar q_bar_j = means(j);
    trace.scores(j) = greedy_utility(q_bar_j, discount);
    for (Eigen::Index i = 0; i < beliefs.num_arms(); ++i) {
        if (i == j) continue;
        const auto k = ensemble_sample_member(beliefs, i, rng);
        const Scalar x = beliefs.members(i, k);
        trace.sampled_members(i) = k;
        trace.sampled_deltas(i) = x - q_bar_j;
        trace.scores(i) = optimistic_score(beliefs, i, q_bar_j, x, discount, b);
    }
    trace.chosen_arm = static_cast<Eigen::Index>(argmax_random_tie(trace.scores, rng));
    return trace;
}

/// Optimistic exploration with an existence test: the first arm (index order)
/// for which some margin on the grid {step, 2 step, ..., 1} lifts the one-step
/// exploration bound above the greedy return; the greedy arm otherwise.
template <typename Scalar>
Eigen::Index optimistic_exists_delta_select(const BeliefEnsemble<Scalar>& beliefs,
                                            const DiscountSpec<Scalar>& discount, Scalar b, Scalar delta_grid_step,
                                            Rng& rng)
{
    if (!(delta_grid_step > 0 && delta_grid_step <= 1)) throw std::invalid_argument("delta grid step must lie in (0,1]");
    const Vector<Scalar> means = ensemble_means(beliefs);
    const auto j = static_cast<Eigen::Index>(argmax_random_tie(means, rng));
    const Scalar q_bar_j = means(j);
    const Scalar greedy = greedy_utility(q_bar_j, discount);
    const auto steps = static_cast<std::int64_t>(std::floor(Scalar(1) / delta_grid_step + Scalar(1e-9)));

    std::vector<Scalar> sorted(static_cast<std::size_t>(beliefs.size()));
    for (Eigen::Index i = 0; i < beliefs.num_arms(); ++i) {
        if (i == j) continue;
        auto row = beliefs.members.row(i);
        std::copy(row.begin(), row.end(), sorted.begin());
        std::sort(sorted.begin(), sorted.end());
        // No member above q_j: p = 0 for every positive margin.
        if (sorted.back() <= q_bar_j) continue;
        for (std::int64_t n = 1; n <= steps; ++n) {
            const Scalar delta = static_cast<Scalar>(n) * delta_grid_step;
            const Scalar threshold = q_bar_j + delta;
            if (threshold > sorted.back()) break;
            const auto above = sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), threshold);
            const Scalar p = static_cast<Scalar>(above) / static_cast<Scalar>(sorted.size());
            if (exploration_utility(ThresholdQuery<Scalar>{q_bar_j, delta, p, b, 1, discount}) > greedy) return i;
        }
    }
    return j;
}

/// Mean plus member-averaged value of perfect information. For the leader a1
/// with runner-up mean q2 the gain is mean(max(0, q2 - m)); for any other arm
/// it is mean(max(0, m - q1)).
template <typename Scalar>
SelectionTrace<Scalar> vpi_select(const BeliefEnsemble<Scalar>& beliefs, Rng& rng)
{
    const auto n = beliefs.num_arms();
    if (n < 2) throw std::invalid_argument("value of information needs at least two arms");
    const Vector<Scalar> means = ensemble_means(beliefs);
    const auto best = static_cast<Eigen::Index>(argmax_random_tie(means, rng));
    Scalar runner_up = -std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index i = 0; i < n; ++i)
        if (i != best) runner_up = std::max(runner_up, means(i));

    auto trace = detail::empty_trace<Scalar>(n);
    trace.greedy_arm = best;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto row = beliefs.members.row(i).array();
        const Scalar gain = (i == best) ? (runner_up - row).max(Scalar(0)).mean()
                                        : (row - means(best)).max(Scalar(0)).mean();
        trace.scores(i) = means(i) + gain;
    }
    trace.chosen_arm = static_cast<Eigen::Index>(argmax_random_tie(trace.scores, rng));
    return trace;
}

/// Round-robin over arms still below the pull budget, then the empirical best.
template <typename Counts, typename Means>
Eigen::Index explore_then_commit_select(const Eigen::MatrixBase<Counts>& pull_counts,
                                        const Eigen::MatrixBase<Means>& empirical_means, std::int64_t commit_budget,
                                        Rng& rng)
{
    if (commit_budget < 1) throw std::invalid_argument("commit budget must be at least 1");
    for (Eigen::Index i = 0; i < pull_counts.size(); ++i)
        if (static_cast<std::int64_t>(pull_counts(i)) < commit_budget) return i;
    return static_cast<Eigen::Index>(argmax_random_tie(empirical_means.derived(), rng));
}

/// Stateful decision maker for one run. Sees only its own random stream and
/// the rewards it observes.
class Agent {
public:
    virtual ~Agent() = default;
    virtual Eigen::Index num_arms() const = 0;
    virtual Eigen::Index select(Rng& rng) = 0;
    virtual void observe(Eigen::Index arm, double reward, Rng& rng) = 0;
};

/// Build an agent, drawing its prior state (uniform[0,1] estimates or
/// ensemble members) from `rng`.
std::unique_ptr<Agent> make_agent(const PolicyConfig& config, Eigen::Index num_arms, Rng& rng);

}  // namespace bandit
