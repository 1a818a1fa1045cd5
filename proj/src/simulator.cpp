#include "bandit/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "bandit/errors.hpp"

namespace bandit {

BanditInstance sample_instance(Eigen::Index num_arms, Rng& rng)
{
    if (num_arms < 1) throw std::invalid_argument("need at least one arm");
    BanditInstance instance{Eigen::VectorXd(num_arms)};
    for (Eigen::Index i = 0; i < num_arms; ++i) instance.arm_means(i) = uniform01<double>(rng);
    return instance;
}

int pull(const BanditInstance& instance, Eigen::Index arm, Rng& rng)
{
    if (arm < 0 || arm >= instance.num_arms())
        throw std::invalid_argument("arm index " + std::to_string(arm) + " out of range");
    return uniform01<double>(rng) < instance.arm_means(arm) ? 1 : 0;
}

AgentFactory factory_for(const PolicyConfig& config)
{
    validate(config);
    return [config](const BanditInstance& instance, Rng& rng) { return make_agent(config, instance.num_arms(), rng); };
}

EpisodeTrace run_episode(const BanditInstance& instance, const AgentFactory& factory, std::int64_t horizon,
                         std::uint64_t run_seed)
{
    if (horizon < 0) throw std::invalid_argument("horizon must be non-negative");
    Rng agent_rng = make_rng(mix_seed(run_seed, 0));
    Rng reward_rng = make_rng(mix_seed(run_seed, 1));
    auto agent = factory(instance, agent_rng);
    return run_agent(
        *agent, horizon, [&](Eigen::Index arm, std::int64_t) { return pull(instance, arm, reward_rng); }, agent_rng);
}

EpisodeTrace run_episode(const BanditInstance& instance, const PolicyConfig& policy, std::int64_t horizon,
                         std::uint64_t run_seed)
{
    return run_episode(instance, factory_for(policy), horizon, run_seed);
}

void validate(const ExperimentConfig& config)
{
    if (config.num_arms < 1) throw ConfigError("arms", "must be at least 1");
    if (config.num_runs < 1) throw ConfigError("runs", "must be at least 1");
    if (config.horizon < 1) throw ConfigError("horizon", "must be at least 1");
    if (config.smoothing_window < 1) throw ConfigError("window", "must be at least 1");
    if (config.smoothing_window > config.horizon) throw ConfigError("window", "must not exceed the horizon");
    if (config.policies.empty()) throw ConfigError("policy", "at least one policy is required");
    for (const auto& policy : config.policies) validate(policy);
}

WindowStat ExperimentResult::window(std::size_t policy, std::int64_t begin, std::int64_t end) const
{
    if (policy >= rewards.size()) throw std::invalid_argument("policy index out of range");
    begin = std::clamp<std::int64_t>(begin, 0, horizon);
    end = std::clamp<std::int64_t>(end, begin, horizon);
    if (end == begin) throw std::invalid_argument("empty reward window");
    const auto& matrix = rewards[policy];
    Eigen::VectorXd per_run(num_runs);
    for (std::int64_t r = 0; r < num_runs; ++r) {
        std::int64_t hits = 0;
        const auto* row = matrix.data() + r * horizon;
        for (std::int64_t t = begin; t < end; ++t) hits += row[t];
        per_run(r) = static_cast<double>(hits) / static_cast<double>(end - begin);
    }
    WindowStat stat;
    stat.mean = per_run.mean();
    if (num_runs > 1) {
        const double var = (per_run.array() - stat.mean).square().sum() / static_cast<double>(num_runs - 1);
        stat.std_error = std::sqrt(var / static_cast<double>(num_runs));
    }
    return stat;
}

namespace {

RewardCurve aggregate(const std::string& label, const std::vector<std::uint8_t>& matrix, std::int64_t runs,
                      std::int64_t horizon)
{
    // Integer per-step totals: the reduction is exact and order independent.
    std::vector<std::int64_t> sum(static_cast<std::size_t>(horizon), 0);
    std::vector<std::int64_t> sum_sq(static_cast<std::size_t>(horizon), 0);
    for (std::int64_t r = 0; r < runs; ++r) {
        const auto* row = matrix.data() + r * horizon;
        for (std::int64_t t = 0; t < horizon; ++t) {
            sum[t] += row[t];
            sum_sq[t] += static_cast<std::int64_t>(row[t]) * row[t];
        }
    }
    RewardCurve curve;
    curve.policy_label = label;
    curve.num_runs = runs;
    curve.mean.resize(horizon);
    curve.std_error.resize(horizon);
    const auto n = static_cast<double>(runs);
    for (std::int64_t t = 0; t < horizon; ++t) {
        const double m = static_cast<double>(sum[t]) / n;
        curve.mean(t) = m;
        if (runs > 1) {
            const double ss = static_cast<double>(sum_sq[t]) - static_cast<double>(sum[t]) * m;
            curve.std_error(t) = std::sqrt(std::max(0.0, ss) / (n - 1) / n);
        } else {
            curve.std_error(t) = 0.0;
        }
    }
    return curve;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config)
{
    validate(config);
    std::vector<RosterEntry> roster;
    std::vector<std::string> seen;
    for (const auto& policy : config.policies) {
        std::string label = policy_label(policy);
        // Disambiguate repeated labels so curve rows stay distinguishable.
        const auto repeats = std::count(seen.begin(), seen.end(), label);
        seen.push_back(label);
        if (repeats > 0) label += "#" + std::to_string(repeats + 1);
        roster.push_back({label, factory_for(policy), policy.stream});
    }
    return run_experiment(config, roster);
}

ExperimentResult run_experiment(const ExperimentConfig& config, const std::vector<RosterEntry>& roster)
{
    if (config.num_arms < 1) throw ConfigError("arms", "must be at least 1");
    if (config.num_runs < 1) throw ConfigError("runs", "must be at least 1");
    if (config.horizon < 1) throw ConfigError("horizon", "must be at least 1");
    if (roster.empty()) throw ConfigError("policy", "at least one policy is required");

    const std::int64_t runs = config.num_runs;
    const std::int64_t horizon = config.horizon;
    ExperimentResult result;
    result.num_runs = runs;
    result.horizon = horizon;
    result.rewards.assign(roster.size(), std::vector<std::uint8_t>(static_cast<std::size_t>(runs * horizon)));

    auto execute_run = [&](std::int64_t r) {
        const std::uint64_t run_seed = mix_seed(config.master_seed, static_cast<std::uint64_t>(r));
        Rng instance_rng = make_rng(mix_seed(run_seed, ~std::uint64_t{0}));
        const BanditInstance instance = sample_instance(config.num_arms, instance_rng);
        for (std::size_t p = 0; p < roster.size(); ++p) {
            const std::uint64_t stream = roster[p].stream.value_or(p);
            const auto trace = run_episode(instance, roster[p].factory, horizon, mix_seed(run_seed, stream));
            std::copy(trace.rewards.begin(), trace.rewards.end(), result.rewards[p].begin() + r * horizon);
        }
    };

    unsigned threads = config.threads != 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::int64_t>(threads, runs));
    if (threads <= 1) {
        for (std::int64_t r = 0; r < runs; ++r) execute_run(r);
    } else {
        std::atomic<std::int64_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> workers;
        for (unsigned w = 0; w < threads; ++w) {
            workers.emplace_back([&] {
                for (std::int64_t r = next++; r < runs; r = next++) {
                    try {
                        execute_run(r);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        next = runs;
                    }
                }
            });
        }
        for (auto& worker : workers) worker.join();
        if (failure) std::rethrow_exception(failure);
    }

    for (std::size_t p = 0; p < roster.size(); ++p)
        result.curves.push_back(aggregate(roster[p].label, result.rewards[p], runs, horizon));
    return result;
}

Eigen::VectorXd moving_average(const Eigen::VectorXd& series, std::int64_t window)
{
    if (window < 1) throw std::invalid_argument("moving-average window must be at least 1");
    Eigen::VectorXd out(series.size());
    for (Eigen::Index t = 0; t < series.size(); ++t) {
        const Eigen::Index first = std::max<Eigen::Index>(0, t - window + 1);
        out(t) = series.segment(first, t - first + 1).mean();
    }
    return out;
}

}  // namespace bandit
