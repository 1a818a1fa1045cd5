#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bandit/policies.hpp"
#include "bandit/simulator.hpp"

namespace bandit {

enum class Scale { full, desk };

/// Command-line values; unset fields leave the file or preset value alone.
struct ConfigOverrides {
    std::optional<std::int64_t> arms;
    std::optional<std::int64_t> runs;
    std::optional<std::int64_t> horizon;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> window;
    std::optional<unsigned> threads;
    std::optional<Scale> scale;
    /// Replaces the file roster when non-empty. Each entry is
    /// `kind[:key=value,...]`, e.g. `opt:gamma=0.99,K=16`.
    std::vector<std::string> policies;

    // Applied to every policy in the roster.
    std::optional<double> epsilon;
    std::optional<double> alpha;
    std::optional<double> gamma;
    std::optional<std::int64_t> N;
    std::optional<std::int64_t> K;
    std::optional<double> mask_prob;
    std::optional<double> b;
    std::optional<std::int64_t> commit_budget;
};

constexpr const char* kSeedEnvVar = "BANDIT_THRESHOLDS_SEED";
constexpr std::int64_t kDeskRuns = 200;
constexpr std::int64_t kDeskHorizon = 2000;
constexpr std::int64_t kFullRuns = 1000;
constexpr std::int64_t kFullHorizon = 5000;

std::optional<Scale> parse_scale(const std::string& name);

/// `kind[:key=value,...]` -> PolicyConfig. Throws ConfigError.
PolicyConfig parse_policy_spec(const std::string& spec);

/// Resolve defaults < config text < scale preset < flags. The env seed is
/// used only when neither the text nor the flags set one. Result is validated.
ExperimentConfig parse_config(const std::optional<std::string>& toml_text, const ConfigOverrides& overrides,
                              std::optional<std::uint64_t> env_seed = std::nullopt);

/// Reads the file (IoError when unreadable) and BANDIT_THRESHOLDS_SEED.
ExperimentConfig load_config(const std::optional<std::filesystem::path>& path, const ConfigOverrides& overrides);

std::optional<std::uint64_t> seed_from_env();

/// Epsilon-greedy(0.01), Thompson(K=16) and opt(gamma in {0.5, 0.9, 0.99}, K=16, b=0)
/// on 16 and 128 arms with a 10-step smoothing window.
std::vector<ExperimentConfig> fig1_preset(Scale scale, std::uint64_t seed);

/// Thompson, opt(gamma=0.99), VPI and explore-then-commit on 256 arms.
ExperimentConfig fig2_preset(Scale scale, std::uint64_t seed);

/// Apply flag overrides on top of a preset and validate.
void apply_overrides(ExperimentConfig& config, const ConfigOverrides& overrides);

}  // namespace bandit
