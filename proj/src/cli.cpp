#include "bandit/cli.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include <CLI11.hpp>

#include "bandit/config.hpp"
#include "bandit/errors.hpp"
#include "bandit/report.hpp"
#include "bandit/thresholds.hpp"

namespace bandit {

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;

struct ExperimentFlags {
    ConfigOverrides overrides;
    std::optional<std::string> scale;
    std::optional<std::string> config_path;
    std::string output = "results";
};

void add_experiment_flags(CLI::App* app, ExperimentFlags& f)
{
    auto& o = f.overrides;
    app->add_option("--arms", o.arms, "Number of arms");
    app->add_option("--runs", o.runs, "Independent runs (fresh instance each)");
    app->add_option("--horizon", o.horizon, "Steps per run");
    app->add_option("--seed", o.seed, "Master seed (fallback: $BANDIT_THRESHOLDS_SEED)");
    app->add_option("--policy", o.policies, "kind[:key=value,...]; repeatable")->take_all();
    app->add_option("--epsilon", o.epsilon, "Uniform-action probability for epsilon-greedy");
    app->add_option("--alpha", o.alpha, "Estimate step size");
    app->add_option("--gamma", o.gamma, "Geometric discount for opt policies");
    app->add_option("--N", o.N, "Finite horizon for opt policies (replaces gamma)");
    app->add_option("--K", o.K, "Ensemble members per arm");
    app->add_option("--mask-prob", o.mask_prob, "Bootstrap update mask probability");
    app->add_option("--b", o.b, "Reward floor");
    app->add_option("--commit-budget", o.commit_budget, "Pulls per arm before explore-then-commit commits");
    app->add_option("--window", o.window, "Moving-average window for smoothed curves");
    app->add_option("--threads", o.threads, "Worker threads (0: all cores)");
    app->add_option("--scale", f.scale, "Preset scale: desk or full");
    app->add_option("--output", f.output, "Output directory");
    app->add_option("--config", f.config_path, "Experiment config file (TOML)");
}

void resolve_scale(ExperimentFlags& f)
{
    if (!f.scale) return;
    f.overrides.scale = parse_scale(*f.scale);
    if (!f.overrides.scale) throw ConfigError("scale", "expected 'desk' or 'full'");
}

void run_and_emit(const ExperimentConfig& config, const std::filesystem::path& dir, std::ostream& out)
{
    const auto result = run_experiment(config);
    emit_results(result, config.smoothing_window, dir);
    out << "# " << config.num_arms << " arms, " << config.num_runs << " runs, horizon " << config.horizon
        << ", seed " << config.master_seed << '\n';
    print_summary(out, summarize(result, config.smoothing_window));
    out << "wrote " << (dir / "curves.csv").string() << '\n';
}

/// Presets ignore --config; the seed comes from --seed or the environment.
std::uint64_t preset_seed(const ExperimentFlags& f)
{
    if (f.overrides.seed) return *f.overrides.seed;
    return seed_from_env().value_or(1);
}

void print_kv(std::ostream& out, const char* key, double value)
{
    out << key << '=' << value << '\n';
}

struct ThresholdFlags {
    double qbar = 0;
    double delta = 0;
    double p = 0;
    std::optional<double> gamma;
    std::optional<std::int64_t> N;
    double b = 0;
};

void thresholds_report(const ThresholdFlags& t, std::ostream& out)
{
    if (t.gamma.has_value() == t.N.has_value()) throw ConfigError("gamma", "give exactly one of --gamma or --N");
    if (!(t.delta > 0)) throw ConfigError("delta", "must be positive");
    if (!(t.p >= 0 && t.p <= 1)) throw ConfigError("p", "must lie in [0,1]");
    if (!(t.qbar >= t.b)) throw ConfigError("qbar", "must not lie below the reward floor b");
    if (t.gamma && !(*t.gamma >= 0 && *t.gamma < 1)) throw ConfigError("gamma", "must lie in [0,1)");
    if (t.N && *t.N < 1) throw ConfigError("N", "must be at least 1");

    const double q = t.qbar - t.b;  // rules assume a zero reward floor
    const double shortfall = q - (q + t.delta) * t.p;
    const auto discount = t.gamma ? DiscountSpec<double>::geometric(*t.gamma)
                                  : DiscountSpec<double>::uniform_finite(*t.N);
    const double u_explore = exploration_utility(ThresholdQuery<double>{t.qbar, t.delta, t.p, t.b, 1, discount});
    const double u_greedy = greedy_utility(t.qbar, discount);

    out.precision(10);
    bool explore = false;
    if (t.gamma) {
        explore = should_explore_geometric(q, t.delta, t.p, *t.gamma);
        out << "mode=geometric\n";
        print_kv(out, "gamma", *t.gamma);
        const double denominator = (1 - t.p) * q;
        if (denominator > 0) {
            print_kv(out, "lhs", shortfall / denominator);
            print_kv(out, "rhs", *t.gamma);
            print_kv(out, "threshold", shortfall / denominator);
        } else {
            print_kv(out, "lhs", shortfall);
            print_kv(out, "rhs", *t.gamma * denominator);
        }
        if (t.p == 0.5) print_kv(out, "median_threshold", median_gamma_threshold(q, t.delta));
    } else {
        explore = should_explore_finite(q, t.delta, t.p, *t.N);
        out << "mode=finite\n";
        out << "N=" << *t.N << '\n';
        print_kv(out, "lhs", static_cast<double>(*t.N) * t.delta * t.p);
        print_kv(out, "rhs", shortfall);
    }
    print_kv(out, "utility_explore", u_explore);
    print_kv(out, "utility_greedy", u_greedy);
    out << "explore=" << (explore ? "true" : "false") << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Bernoulli bandit benchmarks and exploration thresholds", "bandit"};
    app.require_subcommand(1);

    ExperimentFlags run_flags, fig1_flags, fig2_flags;
    auto* run = app.add_subcommand("run", "Run an experiment from flags and/or a config file");
    add_experiment_flags(run, run_flags);
    auto* fig1 = app.add_subcommand("reproduce-fig1", "16- and 128-arm comparison of e-greedy, Thompson and opt");
    add_experiment_flags(fig1, fig1_flags);
    auto* fig2 = app.add_subcommand("reproduce-fig2", "256-arm comparison of Thompson, opt, VPI and E3");
    add_experiment_flags(fig2, fig2_flags);

    ThresholdFlags tflags;
    auto* thresholds = app.add_subcommand("thresholds", "Evaluate the explore/exploit decision rules");
    thresholds->add_option("--qbar", tflags.qbar, "Mean of the greedy arm")->required();
    thresholds->add_option("--delta", tflags.delta, "Margin delta > 0")->required();
    thresholds->add_option("--p", tflags.p, "P(q_i >= q_j + delta)")->required();
    thresholds->add_option("--gamma", tflags.gamma, "Geometric discount in [0,1)");
    thresholds->add_option("--N", tflags.N, "Finite horizon");
    thresholds->add_option("--b", tflags.b, "Reward floor");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitConfig;
    }

    try {
        if (*run) {
            resolve_scale(run_flags);
            std::optional<std::filesystem::path> path;
            if (run_flags.config_path) path = *run_flags.config_path;
            const auto config = load_config(path, run_flags.overrides);
            run_and_emit(config, run_flags.output, out);
        } else if (*fig1) {
            resolve_scale(fig1_flags);
            const auto scale = fig1_flags.overrides.scale.value_or(Scale::full);
            for (auto config : fig1_preset(scale, preset_seed(fig1_flags))) {
                apply_overrides(config, fig1_flags.overrides);
                run_and_emit(config,
                             std::filesystem::path(fig1_flags.output) / ("arms-" + std::to_string(config.num_arms)),
                             out);
            }
        } else if (*fig2) {
            resolve_scale(fig2_flags);
            const auto scale = fig2_flags.overrides.scale.value_or(Scale::full);
            auto config = fig2_preset(scale, preset_seed(fig2_flags));
            apply_overrides(config, fig2_flags.overrides);
            run_and_emit(config, std::filesystem::path(fig2_flags.output) / ("arms-" + std::to_string(config.num_arms)),
                         out);
        } else if (*thresholds) {
            thresholds_report(tflags, out);
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    return 0;
}

}  // namespace bandit
