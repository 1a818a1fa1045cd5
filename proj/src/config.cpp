#include "bandit/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bandit/errors.hpp"
#include "bandit/toml.hpp"

namespace bandit {

namespace {

std::string normalize_key(std::string key)
{
    std::replace(key.begin(), key.end(), '-', '_');
    return key;
}

double as_double(const std::string& key, const toml::Value& value)
{
    if (const auto* i = std::get_if<std::int64_t>(&value)) return static_cast<double>(*i);
    if (const auto* d = std::get_if<double>(&value)) return *d;
    throw ConfigError(key, "expected a number, got " + toml::type_name(value));
}

std::int64_t as_int(const std::string& key, const toml::Value& value)
{
    if (const auto* i = std::get_if<std::int64_t>(&value)) return *i;
    if (const auto* d = std::get_if<double>(&value)) {
        if (std::isfinite(*d) && std::floor(*d) == *d) return static_cast<std::int64_t>(*d);
    }
    throw ConfigError(key, "expected an integer, got " + toml::type_name(value));
}

std::int64_t as_count(const std::string& key, const toml::Value& value)
{
    const auto v = as_int(key, value);
    if (v < 1) throw ConfigError(key, "must be at least 1");
    return v;
}

std::string as_string(const std::string& key, const toml::Value& value)
{
    if (const auto* s = std::get_if<std::string>(&value)) return *s;
    throw ConfigError(key, "expected a string, got " + toml::type_name(value));
}

void set_policy_field(PolicyConfig& policy, const std::string& raw_key, const toml::Value& value)
{
    const std::string key = normalize_key(raw_key);
    if (key == "kind") {
        const auto name = as_string(raw_key, value);
        const auto kind = parse_kind(name);
        if (!kind) throw ConfigError(raw_key, "unknown policy kind '" + name + "'");
        policy.kind = *kind;
    } else if (key == "label") {
        policy.label = as_string(raw_key, value);
    } else if (key == "epsilon") {
        policy.epsilon = as_double(raw_key, value);
    } else if (key == "alpha") {
        policy.alpha = as_double(raw_key, value);
    } else if (key == "gamma") {
        policy.gamma = as_double(raw_key, value);
    } else if (key == "N") {
        policy.horizon = as_int(raw_key, value);
    } else if (key == "b") {
        policy.b = as_double(raw_key, value);
    } else if (key == "K") {
        policy.K = static_cast<int>(as_int(raw_key, value));
    } else if (key == "mask_prob") {
        policy.mask_prob = as_double(raw_key, value);
    } else if (key == "noise") {
        const auto name = as_string(raw_key, value);
        if (name == "bernoulli")
            policy.noise = StepNoise::bernoulli_mask;
        else if (name == "exponential")
            policy.noise = StepNoise::exponential;
        else
            throw ConfigError(raw_key, "expected 'bernoulli' or 'exponential'");
    } else if (key == "commit_budget") {
        policy.commit_budget = static_cast<int>(as_int(raw_key, value));
    } else if (key == "delta_grid_step") {
        policy.delta_grid_step = as_double(raw_key, value);
    } else if (key == "stream") {
        const auto s = as_int(raw_key, value);
        if (s < 0) throw ConfigError(raw_key, "must be non-negative");
        policy.stream = static_cast<std::uint64_t>(s);
    } else {
        throw ConfigError(raw_key, "unknown policy key");
    }
}

toml::Value inline_value(const std::string& text)
{
    if (text.empty()) return text;
    char* end = nullptr;
    const double d = std::strtod(text.c_str(), &end);
    if (end == text.c_str() + text.size()) {
        if (text.find_first_of(".eEin") == std::string::npos && std::floor(d) == d)
            return static_cast<std::int64_t>(std::llround(d));
        return d;
    }
    return text;
}

void apply_policy_overrides(PolicyConfig& policy, const ConfigOverrides& o)
{
    if (o.epsilon) policy.epsilon = *o.epsilon;
    if (o.alpha) policy.alpha = *o.alpha;
    if (o.gamma) policy.gamma = *o.gamma;
    if (o.N) policy.horizon = *o.N;
    if (o.K) policy.K = static_cast<int>(*o.K);
    if (o.mask_prob) policy.mask_prob = *o.mask_prob;
    if (o.b) policy.b = *o.b;
    if (o.commit_budget) policy.commit_budget = static_cast<int>(*o.commit_budget);
}

std::int64_t scale_runs(Scale s) { return s == Scale::desk ? kDeskRuns : kFullRuns; }
std::int64_t scale_horizon(Scale s) { return s == Scale::desk ? kDeskHorizon : kFullHorizon; }

}  // namespace

std::optional<Scale> parse_scale(const std::string& name)
{
    if (name == "desk") return Scale::desk;
    if (name == "full") return Scale::full;
    return std::nullopt;
}

PolicyConfig parse_policy_spec(const std::string& spec)
{
    PolicyConfig policy;
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    set_policy_field(policy, "kind", kind);
    if (colon == std::string::npos) return policy;
    std::stringstream rest(spec.substr(colon + 1));
    std::string item;
    while (std::getline(rest, item, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError(item, "expected key=value in policy '" + spec + "'");
        const std::string key = item.substr(0, eq);
        if (normalize_key(key) == "label")
            set_policy_field(policy, key, item.substr(eq + 1));
        else
            set_policy_field(policy, key, inline_value(item.substr(eq + 1)));
    }
    return policy;
}

void apply_overrides(ExperimentConfig& config, const ConfigOverrides& o)
{
    if (o.arms) config.num_arms = *o.arms;
    if (o.runs) config.num_runs = *o.runs;
    if (o.horizon) config.horizon = *o.horizon;
    if (o.seed) config.master_seed = *o.seed;
    if (o.window) config.smoothing_window = *o.window;
    if (o.threads) config.threads = *o.threads;
    if (!o.policies.empty()) {
        config.policies.clear();
        for (const auto& spec : o.policies) config.policies.push_back(parse_policy_spec(spec));
    }
    for (auto& policy : config.policies) apply_policy_overrides(policy, o);
    validate(config);
}

ExperimentConfig parse_config(const std::optional<std::string>& toml_text, const ConfigOverrides& overrides,
                              std::optional<std::uint64_t> env_seed)
{
    ExperimentConfig config;
    std::optional<std::int64_t> file_runs;
    std::optional<std::int64_t> file_horizon;
    std::optional<std::uint64_t> file_seed;
    std::optional<Scale> file_scale;

    if (toml_text) {
        const auto doc = toml::parse(*toml_text);
        for (const auto& [raw_key, value] : doc.root.entries) {
            const std::string key = normalize_key(raw_key);
            if (key == "arms")
                config.num_arms = as_count(raw_key, value);
            else if (key == "runs")
                file_runs = as_count(raw_key, value);
            else if (key == "horizon")
                file_horizon = as_count(raw_key, value);
            else if (key == "seed") {
                const auto s = as_int(raw_key, value);
                if (s < 0) throw ConfigError(raw_key, "must be non-negative");
                file_seed = static_cast<std::uint64_t>(s);
            } else if (key == "window")
                config.smoothing_window = as_count(raw_key, value);
            else if (key == "threads") {
                const auto t = as_int(raw_key, value);
                if (t < 0) throw ConfigError(raw_key, "must be non-negative");
                config.threads = static_cast<unsigned>(t);
            } else if (key == "scale") {
                file_scale = parse_scale(as_string(raw_key, value));
                if (!file_scale) throw ConfigError(raw_key, "expected 'desk' or 'full'");
            } else
                throw ConfigError(raw_key, "unknown key");
        }
        for (const auto& table : doc.tables) {
            PolicyConfig policy;
            bool has_kind = false;
            if (table.name == "policy") {
            } else if (table.name.rfind("policy.", 0) == 0) {
                policy.label = table.name.substr(7);
            } else {
                throw ConfigError(table.name, "unknown table");
            }
            for (const auto& [key, value] : table.entries) {
                set_policy_field(policy, key, value);
                has_kind = has_kind || key == "kind";
            }
            if (!has_kind) throw ConfigError("kind", "missing in policy table at line " + std::to_string(table.line));
            config.policies.push_back(policy);
        }
    }

    const auto scale = overrides.scale ? overrides.scale : file_scale;
    config.num_runs = file_runs.value_or(scale ? scale_runs(*scale) : config.num_runs);
    config.horizon = file_horizon.value_or(scale ? scale_horizon(*scale) : config.horizon);
    if (overrides.scale) {
        config.num_runs = scale_runs(*overrides.scale);
        config.horizon = scale_horizon(*overrides.scale);
    }
    config.master_seed = file_seed ? *file_seed : env_seed.value_or(config.master_seed);
    apply_overrides(config, overrides);
    return config;
}

std::optional<std::uint64_t> seed_from_env()
{
    const char* raw = std::getenv(kSeedEnvVar);
    if (!raw || !*raw) return std::nullopt;
    char* end = nullptr;
    const auto value = std::strtoull(raw, &end, 10);
    if (*end != '\0' || raw[0] == '-') throw ConfigError(kSeedEnvVar, "expected a non-negative integer");
    return static_cast<std::uint64_t>(value);
}

ExperimentConfig load_config(const std::optional<std::filesystem::path>& path, const ConfigOverrides& overrides)
{
    std::optional<std::string> text;
    if (path) {
        std::ifstream in(*path);
        if (!in) throw IoError("cannot read config file " + path->string());
        std::stringstream buffer;
        buffer << in.rdbuf();
        text = buffer.str();
    }
    return parse_config(text, overrides, seed_from_env());
}

std::vector<ExperimentConfig> fig1_preset(Scale scale, std::uint64_t seed)
{
    PolicyConfig greedy;
    greedy.kind = PolicyKind::epsilon_greedy;
    greedy.epsilon = 0.01;
    greedy.alpha = 0.01;

    PolicyConfig thompson;
    thompson.kind = PolicyKind::thompson;
    thompson.K = 16;
    thompson.alpha = 0.01;

    std::vector<PolicyConfig> roster{greedy, thompson};
    for (double gamma : {0.5, 0.9, 0.99}) {
        PolicyConfig opt;
        opt.kind = PolicyKind::optimistic_stochastic;
        opt.gamma = gamma;
        opt.K = 16;
        opt.alpha = 0.01;
        opt.b = 0.0;
        roster.push_back(opt);
    }

    std::vector<ExperimentConfig> configs;
    for (std::int64_t arms : {16, 128}) {
        ExperimentConfig config;
        config.num_arms = arms;
        config.num_runs = scale_runs(scale);
        config.horizon = scale_horizon(scale);
        config.master_seed = seed;
        config.smoothing_window = 10;
        config.policies = roster;
        configs.push_back(config);
    }
    return configs;
}

ExperimentConfig fig2_preset(Scale scale, std::uint64_t seed)
{
    PolicyConfig thompson;
    thompson.kind = PolicyKind::thompson;
    PolicyConfig opt;
    opt.kind = PolicyKind::optimistic_stochastic;
    opt.gamma = 0.99;
    PolicyConfig vpi;
    vpi.kind = PolicyKind::vpi;
    PolicyConfig e3;
    e3.kind = PolicyKind::explore_then_commit;

    ExperimentConfig config;
    config.num_arms = 256;
    config.num_runs = scale_runs(scale);
    config.horizon = scale_horizon(scale);
    config.master_seed = seed;
    config.smoothing_window = 10;
    config.policies = {thompson, opt, vpi, e3};
    return config;
}

}  // namespace bandit
