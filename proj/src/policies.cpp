#include "bandit/policies.hpp"

#include <array>
#include <cstdio>
#include <utility>

#include "bandit/errors.hpp"

namespace bandit {

namespace {

struct KindName {
    PolicyKind kind;
    const char* canonical;
    const char* short_name;
};

constexpr std::array<KindName, 6> kKindNames{{
    {PolicyKind::epsilon_greedy, "epsilon-greedy", "e-greedy"},
    {PolicyKind::thompson, "thompson", "sampling"},
    {PolicyKind::optimistic_stochastic, "optimistic-stochastic", "opt"},
    {PolicyKind::optimistic_exists_delta, "optimistic-exists-delta", "opt-exists"},
    {PolicyKind::vpi, "vpi", "vpi"},
    {PolicyKind::explore_then_commit, "explore-then-commit", "e3"},
}};

std::string short_number(double value)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", value);
    return buf;
}

bool uses_ensemble(PolicyKind kind)
{
    return kind == PolicyKind::thompson || kind == PolicyKind::optimistic_stochastic ||
           kind == PolicyKind::optimistic_exists_delta || kind == PolicyKind::vpi;
}

bool uses_discount(PolicyKind kind)
{
    return kind == PolicyKind::optimistic_stochastic || kind == PolicyKind::optimistic_exists_delta;
}

class EpsilonGreedyAgent final : public Agent {
public:
    EpsilonGreedyAgent(const PolicyConfig& config, Eigen::Index num_arms, Rng& rng)
        : epsilon_(config.epsilon), alpha_(config.alpha), estimates_(num_arms)
    {
        for (Eigen::Index i = 0; i < num_arms; ++i) estimates_(i) = uniform01<double>(rng);
    }

    Eigen::Index num_arms() const override { return estimates_.size(); }
    Eigen::Index select(Rng& rng) override { return epsilon_greedy_select(estimates_, epsilon_, rng); }
    void observe(Eigen::Index arm, double reward, Rng&) override
    {
        estimates_(arm) = point_update(estimates_(arm), reward, alpha_);
    }

private:
    double epsilon_;
    double alpha_;
    Eigen::VectorXd estimates_;
};

class EnsembleAgent final : public Agent {
public:
    EnsembleAgent(const PolicyConfig& config, Eigen::Index num_arms, Rng& rng)
        : kind_(config.kind),
          beliefs_(ensemble_init(num_arms, Eigen::Index(config.K), UniformPrior<double>{}, rng, config.alpha,
                                 config.mask_prob, config.noise)),
          discount_(uses_discount(config.kind) ? discount_of(config) : DiscountSpec<double>::geometric(0.0)),
          b_(config.b),
          grid_step_(config.delta_grid_step),
          last_members_(Eigen::Matrix<Eigen::Index, Eigen::Dynamic, 1>::Constant(num_arms, -1))
    {
    }

    Eigen::Index num_arms() const override { return beliefs_.num_arms(); }

    Eigen::Index select(Rng& rng) override
    {
        SelectionTrace<double> trace;
        switch (kind_) {
        case PolicyKind::thompson:
            trace = thompson_select(beliefs_, rng);
            break;
        case PolicyKind::optimistic_stochastic:
            trace = optimistic_stochastic_select(beliefs_, discount_, b_, rng);
            break;
        case PolicyKind::vpi:
            if (beliefs_.num_arms() == 1) return 0;
            trace = vpi_select(beliefs_, rng);
            break;
        default:
            last_members_.setConstant(-1);
            return optimistic_exists_delta_select(beliefs_, discount_, b_, grid_step_, rng);
        }
        last_members_ = trace.sampled_members;
        return trace.chosen_arm;
    }

    void observe(Eigen::Index arm, double reward, Rng& rng) override
    {
        const Eigen::Index member = last_members_(arm) >= 0 ? last_members_(arm) : 0;
        ensemble_update(beliefs_, arm, member, reward, rng);
    }

private:
    PolicyKind kind_;
    BeliefEnsembleD beliefs_;
    DiscountSpec<double> discount_;
    double b_;
    double grid_step_;
    Eigen::Matrix<Eigen::Index, Eigen::Dynamic, 1> last_members_;
};

class ExploreThenCommitAgent final : public Agent {
public:
    ExploreThenCommitAgent(const PolicyConfig& config, Eigen::Index num_arms)
        : budget_(config.commit_budget),
          counts_(Eigen::VectorXd::Zero(num_arms)),
          sums_(Eigen::VectorXd::Zero(num_arms))
    {
    }

    Eigen::Index num_arms() const override { return counts_.size(); }

    Eigen::Index select(Rng& rng) override
    {
        if (committed_) return *committed_;
        const Eigen::VectorXd means = sums_.cwiseQuotient(counts_.cwiseMax(1.0));
        const auto arm = explore_then_commit_select(counts_, means, budget_, rng);
        if ((counts_.array() >= static_cast<double>(budget_)).all()) committed_ = arm;
        return arm;
    }

    void observe(Eigen::Index arm, double reward, Rng&) override
    {
        counts_(arm) += 1.0;
        sums_(arm) += reward;
    }

private:
    std::int64_t budget_;
    Eigen::VectorXd counts_;
    Eigen::VectorXd sums_;
    std::optional<Eigen::Index> committed_;
};

}  // namespace

std::string kind_name(PolicyKind kind)
{
    for (const auto& entry : kKindNames)
        if (entry.kind == kind) return entry.canonical;
    return "unknown";
}

std::optional<PolicyKind> parse_kind(const std::string& name)
{
    for (const auto& entry : kKindNames)
        if (name == entry.canonical || name == entry.short_name) return entry.kind;
    if (name == "etc" || name == "E3") return PolicyKind::explore_then_commit;
    if (name == "VPI") return PolicyKind::vpi;
    return std::nullopt;
}

void validate(const PolicyConfig& config)
{
    if (!(config.epsilon >= 0 && config.epsilon <= 1)) throw ConfigError("epsilon", "must lie in [0,1]");
    if (!(config.alpha > 0 && config.alpha <= 1)) throw ConfigError("alpha", "must lie in (0,1]");
    if (uses_discount(config.kind)) {
        if (config.horizon) {
            if (*config.horizon < 1) throw ConfigError("N", "finite horizon must be at least 1");
        } else if (!(config.gamma >= 0 && config.gamma < 1)) {
            throw ConfigError("gamma", "must lie in [0,1) for geometric discounting");
        }
        if (!(config.b <= 0)) throw ConfigError("b", "reward floor must not exceed 0 for Bernoulli arms");
        if (!(config.delta_grid_step > 0 && config.delta_grid_step <= 1))
            throw ConfigError("delta-grid-step", "must lie in (0,1]");
    }
    if (uses_ensemble(config.kind)) {
        if (config.K < 1) throw ConfigError("K", "ensemble size must be at least 1");
        if (!(config.mask_prob > 0 && config.mask_prob <= 1)) throw ConfigError("mask-prob", "must lie in (0,1]");
    }
    if (config.kind == PolicyKind::explore_then_commit && config.commit_budget < 1)
        throw ConfigError("commit-budget", "must be at least 1");
    if (config.label.find_first_of(",\"\n\r") != std::string::npos)
        throw ConfigError("label", "must not contain commas, quotes or newlines");
}

std::string policy_label(const PolicyConfig& config)
{
    if (!config.label.empty()) return config.label;
    switch (config.kind) {
    case PolicyKind::epsilon_greedy:
        return "e-greedy(eps=" + short_number(config.epsilon) + ")";
    case PolicyKind::thompson:
        return "thompson(K=" + std::to_string(config.K) + ")";
    case PolicyKind::optimistic_stochastic:
    case PolicyKind::optimistic_exists_delta: {
        const std::string base = config.kind == PolicyKind::optimistic_stochastic ? "opt" : "opt-exists";
        if (config.horizon) return base + "(N=" + std::to_string(*config.horizon) + ")";
        return base + "(gamma=" + short_number(config.gamma) + ")";
    }
    case PolicyKind::vpi:
        return "vpi(K=" + std::to_string(config.K) + ")";
    case PolicyKind::explore_then_commit:
        return "e3(budget=" + std::to_string(config.commit_budget) + ")";
    }
    return "unknown";
}

DiscountSpec<double> discount_of(const PolicyConfig& config)
{
    if (config.horizon) return DiscountSpec<double>::uniform_finite(*config.horizon);
    return DiscountSpec<double>::geometric(config.gamma);
}

std::unique_ptr<Agent> make_agent(const PolicyConfig& config, Eigen::Index num_arms, Rng& rng)
{
    validate(config);
    if (num_arms < 1) throw std::invalid_argument("need at least one arm");
    switch (config.kind) {
    case PolicyKind::epsilon_greedy:
        return std::make_unique<EpsilonGreedyAgent>(config, num_arms, rng);
    case PolicyKind::explore_then_commit:
        return std::make_unique<ExploreThenCommitAgent>(config, num_arms);
    default:
        return std::make_unique<EnsembleAgent>(config, num_arms, rng);
    }
}

}  // namespace bandit
