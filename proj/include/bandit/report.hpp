#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bandit/simulator.hpp"

namespace bandit {

constexpr const char* kCurvesHeader = "policy,step,mean_reward,stderr,smoothed_mean";
constexpr const char* kSummaryHeader = "policy,final_window_mean,final_window_stderr,overall_mean,overall_stderr";
constexpr const char* kOvertakeHeader = "leader,trailer,first_step";

/// Rows sorted by (policy label, step), steps 0-based, %.10g floats.
void write_curves_csv(std::ostream& out, const std::vector<RewardCurve>& curves, std::int64_t smoothing_window);
void emit_curves_csv(const std::vector<RewardCurve>& curves, std::int64_t smoothing_window,
                     const std::filesystem::path& path);

struct ParsedCurve {
    RewardCurve curve;
    Eigen::VectorXd smoothed;
};

/// Inverse of write_curves_csv (curves come back in label order). Throws
/// std::runtime_error on a malformed file.
std::vector<ParsedCurve> read_curves_csv(std::istream& in);

struct SummaryRow {
    std::string policy;
    double final_window_mean = 0;
    double final_window_stderr = 0;  ///< NaN when only curves were available
    double overall_mean = 0;
    double overall_stderr = 0;
};

struct OvertakePair {
    std::string leader;
    std::string trailer;
    std::optional<std::int64_t> first_step;  ///< first step where leader's smoothed curve exceeds trailer's
};

struct SummaryTable {
    std::int64_t final_window = 0;
    std::vector<SummaryRow> rows;
    std::vector<OvertakePair> overtakes;
};

/// Final window is the last 500 steps, or horizon / 10 (at least 1) for
/// horizons under 500.
std::int64_t final_window_length(std::int64_t horizon);

SummaryTable summarize(const std::vector<RewardCurve>& curves, std::int64_t smoothing_window);
/// As above, with across-run standard errors taken from the per-run rewards.
SummaryTable summarize(const ExperimentResult& result, std::int64_t smoothing_window);

void write_summary_csv(std::ostream& out, const SummaryTable& table);
void write_overtake_csv(std::ostream& out, const SummaryTable& table);
void print_summary(std::ostream& out, const SummaryTable& table);

/// Writes curves.csv, summary.csv and overtake.csv into `dir`, creating it.
/// Throws IoError.
void emit_results(const ExperimentResult& result, std::int64_t smoothing_window, const std::filesystem::path& dir);

}  // namespace bandit
