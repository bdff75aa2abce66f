#pragma once

#include <dnsqd/config.hpp>
#include <dnsqd/experiment.hpp>
#include <dnsqd/stats.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dnsqd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// "<task>_<algorithm>_seed<seed>", no timestamps so paths are reproducible.
std::string run_directory_name(const ExperimentConfig& config);

inline constexpr std::string_view kMetricsHeader = "generation,evaluations,qd_score,coverage,max_fitness";

std::string format_metrics_row(const MetricsRecord& record);
std::vector<MetricsRecord> read_metrics_csv(const std::filesystem::path& path);

enum class Metric { qd_score, coverage, max_fitness };
Metric parse_metric(std::string_view name);
double final_metric(const std::vector<MetricsRecord>& records, Metric metric);

struct RunOutcome {
    std::filesystem::path directory;
    bool failed = false;
    std::string error;
    std::vector<MetricsRecord> metrics;
};

/// Runs one experiment into <output_dir>/<run_directory_name>: config.txt (verbatim
/// source, commented, followed by every resolved key), metrics.csv and
/// population.csv. A runtime failure keeps the metrics written so far and leaves a
/// FAILED file with the error. Configuration errors propagate as ConfigError.
/// `observer` sees each record after it has been written.
RunOutcome cmd_run(const ExperimentConfig& config, std::string_view source_text = {}, const RecordCallback& observer = {});

struct SweepRow {
    std::string value;
    std::vector<std::filesystem::path> runs;
    double median_qd_score = 0.;
    double median_coverage = 0.;
};

struct SweepSummary {
    std::string parameter;
    std::vector<SweepRow> rows;
    // Row with the highest median QD score (first on ties).
    std::size_t best = 0;
    std::filesystem::path directory;
};

/// One run per (value, seed) under <output_dir>/sweep_<param>/<param>_<value>/, then
/// a summary.csv of final medians read back from the run files. `parameter` is an
/// algorithm parameter: k, l, k_nov (or knov), cells, or its full "algo." key.
SweepSummary cmd_sweep(const ExperimentConfig& base, const std::string& parameter, const std::vector<std::string>& values,
    const std::vector<std::uint64_t>& seeds, std::size_t jobs = 1);

struct RunGroup {
    std::string label;
    // Run directories, or directories searched recursively for run directories.
    std::vector<std::filesystem::path> paths;
};

/// Pairwise Mann-Whitney tests on the final value of `metric`, Holm-corrected over
/// all pairs. Writes comparison.csv into `out_dir` when it is non-empty.
std::vector<ComparisonResult> cmd_compare(const std::vector<RunGroup>& groups, Metric metric, double alpha, const std::filesystem::path& out_dir = {});

/// Entry point of the dnsqd-cli executable.
int main(int argc, char** argv);

} // namespace dnsqd::cli
