#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bandit/policies.hpp"
#include "bandit/random.hpp"

namespace bandit {

/// Bernoulli arms with hidden success probabilities.
struct BanditInstance {
    Eigen::VectorXd arm_means;

    Eigen::Index num_arms() const { return arm_means.size(); }
    Eigen::Index best_arm() const
    {
        Eigen::Index best = 0;
        arm_means.maxCoeff(&best);
        return best;
    }
};

BanditInstance sample_instance(Eigen::Index num_arms, Rng& rng);

/// Bernoulli(arm_means[arm]) draw.
int pull(const BanditInstance& instance, Eigen::Index arm, Rng& rng);

struct EpisodeTrace {
    std::vector<std::uint8_t> rewards;
    std::vector<std::int32_t> arms;
};

/// Drive `agent` for `horizon` steps; `reward_of(arm, step)` supplies rewards.
template <typename RewardFn>
EpisodeTrace run_agent(Agent& agent, std::int64_t horizon, RewardFn&& reward_of, Rng& agent_rng)
{
    EpisodeTrace trace;
    trace.rewards.reserve(static_cast<std::size_t>(horizon));
    trace.arms.reserve(static_cast<std::size_t>(horizon));
    for (std::int64_t t = 0; t < horizon; ++t) {
        const Eigen::Index arm = agent.select(agent_rng);
        const int reward = reward_of(arm, t);
        agent.observe(arm, static_cast<double>(reward), agent_rng);
        trace.rewards.push_back(static_cast<std::uint8_t>(reward));
        trace.arms.push_back(static_cast<std::int32_t>(arm));
    }
    return trace;
}

/// Builds a fresh agent for one run. Receives the instance so that test-only
/// oracles can be expressed; roster policies built from PolicyConfig read
/// nothing but its arm count.
using AgentFactory = std::function<std::unique_ptr<Agent>(const BanditInstance&, Rng&)>;

AgentFactory factory_for(const PolicyConfig& config);

/// One seeded episode. The agent stream is mix_seed(run_seed, 0) and the
/// reward stream mix_seed(run_seed, 1).
EpisodeTrace run_episode(const BanditInstance& instance, const AgentFactory& factory, std::int64_t horizon,
                         std::uint64_t run_seed);
EpisodeTrace run_episode(const BanditInstance& instance, const PolicyConfig& policy, std::int64_t horizon,
                         std::uint64_t run_seed);

struct ExperimentConfig {
    std::int64_t num_arms = 16;
    std::int64_t num_runs = 200;
    std::int64_t horizon = 5000;
    std::uint64_t master_seed = 1;
    std::vector<PolicyConfig> policies;
    std::int64_t smoothing_window = 10;
    unsigned threads = 0;  ///< 0: hardware concurrency
};

/// Throws ConfigError naming the offending field.
void validate(const ExperimentConfig& config);

struct RosterEntry {
    std::string label;
    AgentFactory factory;
    std::optional<std::uint64_t> stream;
};

struct RewardCurve {
    std::string policy_label;
    Eigen::VectorXd mean;
    Eigen::VectorXd std_error;
    std::int64_t num_runs = 0;
};

struct WindowStat {
    double mean = 0;
    double std_error = 0;
};

/// Per-policy curves plus the raw per-run reward matrix (runs x horizon,
/// row-major) they were aggregated from.
struct ExperimentResult {
    std::int64_t num_runs = 0;
    std::int64_t horizon = 0;
    std::vector<RewardCurve> curves;
    std::vector<std::vector<std::uint8_t>> rewards;

    /// Mean over runs of each run's average reward in steps [begin, end), with
    /// the across-run standard error.
    WindowStat window(std::size_t policy, std::int64_t begin, std::int64_t end) const;
};

/// Runs are resampled instances; every roster entry plays the same instance
/// within a run. run_seed = mix_seed(master, r); the instance stream is
/// mix_seed(run_seed, ~0) and entry p uses mix_seed(run_seed, stream or p).
ExperimentResult run_experiment(const ExperimentConfig& config);
ExperimentResult run_experiment(const ExperimentConfig& config, const std::vector<RosterEntry>& roster);

/// Trailing mean over the last `window` points; warm-up uses the available prefix.
Eigen::VectorXd moving_average(const Eigen::VectorXd& series, std::int64_t window);

}  // namespace bandit
