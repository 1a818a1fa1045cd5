#include "bandit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "bandit/errors.hpp"

namespace bandit {

namespace {

std::string fmt10(double value)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", value);
    return buf;
}

std::vector<std::size_t> label_order(const std::vector<RewardCurve>& curves)
{
    std::vector<std::size_t> order(curves.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return curves[a].policy_label < curves[b].policy_label; });
    return order;
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::stringstream in(line);
    std::string field;
    while (std::getline(in, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

template <typename Write>
void write_file(const std::filesystem::path& path, Write&& write)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write(out);
    out.flush();
    if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

void write_curves_csv(std::ostream& out, const std::vector<RewardCurve>& curves, std::int64_t smoothing_window)
{
    if (curves.empty()) throw std::invalid_argument("no curves to write");
    out << kCurvesHeader << '\n';
    for (const auto p : label_order(curves)) {
        const auto& curve = curves[p];
        const Eigen::VectorXd smoothed = moving_average(curve.mean, smoothing_window);
        for (Eigen::Index t = 0; t < curve.mean.size(); ++t) {
            out << curve.policy_label << ',' << t << ',' << fmt10(curve.mean(t)) << ',' << fmt10(curve.std_error(t))
                << ',' << fmt10(smoothed(t)) << '\n';
        }
    }
}

void emit_curves_csv(const std::vector<RewardCurve>& curves, std::int64_t smoothing_window,
                     const std::filesystem::path& path)
{
    write_file(path, [&](std::ostream& out) { write_curves_csv(out, curves, smoothing_window); });
}

std::vector<ParsedCurve> read_curves_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != kCurvesHeader) throw std::runtime_error("unexpected curves header");
    std::vector<ParsedCurve> parsed;
    std::vector<std::vector<double>> mean, se, smooth;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != 5) throw std::runtime_error("malformed curves row: " + line);
        if (parsed.empty() || parsed.back().curve.policy_label != fields[0]) {
            parsed.push_back({});
            parsed.back().curve.policy_label = fields[0];
            mean.emplace_back();
            se.emplace_back();
            smooth.emplace_back();
        }
        if (std::stoll(fields[1]) != static_cast<long long>(mean.back().size()))
            throw std::runtime_error("non-contiguous steps for " + fields[0]);
        mean.back().push_back(std::stod(fields[2]));
        se.back().push_back(std::stod(fields[3]));
        smooth.back().push_back(std::stod(fields[4]));
    }
    for (std::size_t p = 0; p < parsed.size(); ++p) {
        const auto n = static_cast<Eigen::Index>(mean[p].size());
        parsed[p].curve.mean = Eigen::Map<const Eigen::VectorXd>(mean[p].data(), n);
        parsed[p].curve.std_error = Eigen::Map<const Eigen::VectorXd>(se[p].data(), n);
        parsed[p].smoothed = Eigen::Map<const Eigen::VectorXd>(smooth[p].data(), n);
    }
    return parsed;
}

std::int64_t final_window_length(std::int64_t horizon)
{
    if (horizon >= 500) return 500;
    return std::max<std::int64_t>(1, horizon / 10);
}

SummaryTable summarize(const std::vector<RewardCurve>& curves, std::int64_t smoothing_window)
{
    SummaryTable table;
    if (curves.empty()) return table;
    const auto horizon = curves.front().mean.size();
    table.final_window = final_window_length(horizon);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<Eigen::VectorXd> smoothed;
    for (const auto& curve : curves) {
        if (curve.mean.size() != horizon) throw std::invalid_argument("curves differ in length");
        table.rows.push_back({curve.policy_label, curve.mean.tail(table.final_window).mean(), nan,
                              curve.mean.mean(), nan});
        smoothed.push_back(moving_average(curve.mean, smoothing_window));
    }
    for (std::size_t a = 0; a < curves.size(); ++a) {
        for (std::size_t b = 0; b < curves.size(); ++b) {
            if (a == b) continue;
            OvertakePair pair{curves[a].policy_label, curves[b].policy_label, std::nullopt};
            for (Eigen::Index t = 0; t < horizon; ++t) {
                if (smoothed[a](t) > smoothed[b](t)) {
                    pair.first_step = t;
                    break;
                }
            }
            table.overtakes.push_back(pair);
        }
    }
    return table;
}

SummaryTable summarize(const ExperimentResult& result, std::int64_t smoothing_window)
{
    SummaryTable table = summarize(result.curves, smoothing_window);
    for (std::size_t p = 0; p < table.rows.size(); ++p) {
        const auto final = result.window(p, result.horizon - table.final_window, result.horizon);
        const auto overall = result.window(p, 0, result.horizon);
        table.rows[p].final_window_mean = final.mean;
        table.rows[p].final_window_stderr = final.std_error;
        table.rows[p].overall_mean = overall.mean;
        table.rows[p].overall_stderr = overall.std_error;
    }
    return table;
}

void write_summary_csv(std::ostream& out, const SummaryTable& table)
{
    out << kSummaryHeader << '\n';
    for (const auto& row : table.rows) {
        out << row.policy << ',' << fmt10(row.final_window_mean) << ',' << fmt10(row.final_window_stderr) << ','
            << fmt10(row.overall_mean) << ',' << fmt10(row.overall_stderr) << '\n';
    }
}

void write_overtake_csv(std::ostream& out, const SummaryTable& table)
{
    out << kOvertakeHeader << '\n';
    for (const auto& pair : table.overtakes) {
        out << pair.leader << ',' << pair.trailer << ',';
        if (pair.first_step) out << *pair.first_step;
        out << '\n';
    }
}

void print_summary(std::ostream& out, const SummaryTable& table)
{
    std::size_t width = 6;
    for (const auto& row : table.rows) width = std::max(width, row.policy.size());
    const auto old_flags = out.flags();
    const auto old_precision = out.precision();
    out << std::left << std::setw(static_cast<int>(width)) << "policy" << "  last-" << table.final_window
        << " (+/- se)      overall (+/- se)\n";
    out << std::fixed << std::setprecision(4);
    for (const auto& row : table.rows) {
        out << std::left << std::setw(static_cast<int>(width)) << row.policy << "  " << row.final_window_mean
            << " +/- " << row.final_window_stderr << "   " << row.overall_mean << " +/- " << row.overall_stderr
            << '\n';
    }
    out.flags(old_flags);
    out.precision(old_precision);
}

void emit_results(const ExperimentResult& result, std::int64_t smoothing_window, const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    const auto table = summarize(result, smoothing_window);
    emit_curves_csv(result.curves, smoothing_window, dir / "curves.csv");
    write_file(dir / "summary.csv", [&](std::ostream& out) { write_summary_csv(out, table); });
    write_file(dir / "overtake.csv", [&](std::ostream& out) { write_overtake_csv(out, table); });
}

}  // namespace bandit
