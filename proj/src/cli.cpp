#include <dnsqd/cli.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace dnsqd::cli {

namespace {

    std::vector<std::string> split(const std::string& text, char sep)
    {
        std::vector<std::string> out;
        std::string item;
        std::istringstream in(text);
        while (std::getline(in, item, sep))
            if (!item.empty())
                out.push_back(item);
        return out;
    }

    double median(std::vector<double> values)
    {
        if (values.empty())
            throw std::invalid_argument("median of an empty sample");
        std::sort(values.begin(), values.end());
        const std::size_t mid = values.size() / 2;
        return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
    }

    void write_population(const fs::path& path, const Population& pop)
    {
        std::ofstream out(path);
        std::string header;
        for (Eigen::Index d = 0; d < pop.genomes.cols(); ++d)
            header += fmt::format("genome_{},", d);
        header += "fitness";
        for (Eigen::Index d = 0; d < pop.descriptors.cols(); ++d)
            header += fmt::format(",descriptor_{}", d);
        header += ",competition_fitness";
        out << header << '\n';
        for (Eigen::Index i = 0; i < pop.genomes.rows(); ++i) {
            std::string row;
            for (Eigen::Index d = 0; d < pop.genomes.cols(); ++d)
                row += format_double(pop.genomes(i, d)) + ",";
            row += format_double(pop.fitness[i]);
            for (Eigen::Index d = 0; d < pop.descriptors.cols(); ++d)
                row += "," + format_double(pop.descriptors(i, d));
            row += "," + format_double(pop.competition_fitness[i]);
            out << row << '\n';
        }
    }

    std::string canonical_parameter(const std::string& parameter)
    {
        std::string key = parameter;
        if (key == "knov")
            key = "k_nov";
        if (key.rfind("algo.", 0) != 0)
            key = "algo." + key;
        if (key == "algo.name" || std::find(config_keys().begin(), config_keys().end(), key) == config_keys().end())
            throw ConfigError("cannot sweep '" + parameter + "': expected one of k, l, k_nov, cells, cvt_seed");
        return key;
    }

    std::vector<fs::path> expand_runs(const fs::path& path)
    {
        if (fs::exists(path / "metrics.csv"))
            return {path};
        if (!fs::is_directory(path))
            throw std::invalid_argument("'" + path.string() + "' is neither a run directory nor a directory of runs");
        std::vector<fs::path> runs;
        for (const auto& entry : fs::recursive_directory_iterator(path))
            if (entry.is_regular_file() && entry.path().filename() == "metrics.csv")
                runs.push_back(entry.path().parent_path());
        std::sort(runs.begin(), runs.end());
        return runs;
    }

} // namespace

std::string run_directory_name(const ExperimentConfig& config)
{
    return fmt::format("{}_{}_seed{}", config.task.name, to_string(config.algorithm), config.seed);
}

std::string format_metrics_row(const MetricsRecord& record)
{
    return fmt::format("{},{},{},{},{}", record.generation, record.evaluations, format_double(record.qd_score), format_double(record.coverage),
        record.max_fitness ? format_double(*record.max_fitness) : std::string("nan"));
}

std::vector<MetricsRecord> read_metrics_csv(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot read '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || line != kMetricsHeader)
        throw std::invalid_argument("'" + path.string() + "' does not start with the metrics header");
    std::vector<MetricsRecord> records;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto cols = split(line, ',');
        if (cols.size() != 5)
            throw std::invalid_argument("'" + path.string() + "': malformed row '" + line + "'");
        MetricsRecord r;
        r.generation = std::stoull(cols[0]);
        r.evaluations = std::stoull(cols[1]);
        r.qd_score = std::stod(cols[2]);
        r.coverage = std::stod(cols[3]);
        if (cols[4] != "nan")
            r.max_fitness = std::stod(cols[4]);
        records.push_back(r);
    }
    return records;
}

Metric parse_metric(std::string_view name)
{
    if (name == "qd_score")
        return Metric::qd_score;
    if (name == "coverage")
        return Metric::coverage;
    if (name == "max_fitness")
        return Metric::max_fitness;
    throw ConfigError("unknown metric '" + std::string(name) + "' (valid: qd_score, coverage, max_fitness)");
}

double final_metric(const std::vector<MetricsRecord>& records, Metric metric)
{
    if (records.empty())
        throw std::invalid_argument("run has no metrics records");
    const auto& last = records.back();
    switch (metric) {
    case Metric::qd_score:
        return last.qd_score;
    case Metric::coverage:
        return last.coverage;
    case Metric::max_fitness:
        return last.max_fitness.value_or(std::nan(""));
    }
    return std::nan("");
}

RunOutcome cmd_run(const ExperimentConfig& config, std::string_view source_text, const RecordCallback& observer)
{
    config.validate();
    RunOutcome outcome;
    outcome.directory = fs::path(config.output_dir) / run_directory_name(config);
    fs::create_directories(outcome.directory);
    fs::remove(outcome.directory / "FAILED");

    {
        std::ofstream snapshot(outcome.directory / "config.txt");
        if (!source_text.empty()) {
            snapshot << "# source configuration (verbatim)\n";
            std::istringstream in{std::string(source_text)};
            for (std::string line; std::getline(in, line);)
                snapshot << "# " << line << '\n';
            snapshot << "\n# resolved configuration\n";
        }
        snapshot << render_config(config);
    }

    std::ofstream metrics(outcome.directory / "metrics.csv");
    metrics << kMetricsHeader << '\n';
    try {
        auto result = run_experiment(config, [&](const MetricsRecord& r) {
            metrics << format_metrics_row(r) << '\n';
            metrics.flush();
            if (observer)
                observer(r);
        });
        outcome.metrics = std::move(result.metrics);
        write_population(outcome.directory / "population.csv", result.population);
    }
    catch (const ConfigError&) {
        throw;
    }
    catch (const std::exception& e) {
        outcome.failed = true;
        outcome.error = e.what();
        metrics.flush();
        std::ofstream(outcome.directory / "FAILED") << e.what() << '\n';
    }
    return outcome;
}

SweepSummary cmd_sweep(const ExperimentConfig& base, const std::string& parameter, const std::vector<std::string>& values,
    const std::vector<std::uint64_t>& seeds, std::size_t jobs)
{
    if (values.empty())
        throw ConfigError("sweep needs at least one value");
    if (seeds.empty())
        throw ConfigError("sweep needs at least one seed");
    const std::string key = canonical_parameter(parameter);
    const std::string short_name = key.substr(5);

    SweepSummary summary;
    summary.parameter = key;
    summary.directory = fs::path(base.output_dir) / ("sweep_" + short_name);

    std::vector<ExperimentConfig> configs;
    for (const auto& value : values) {
        SweepRow row;
        row.value = value;
        for (auto seed : seeds) {
            ExperimentConfig c = base;
            apply_config_value(c, key, value);
            c.seed = seed;
            c.output_dir = (summary.directory / (short_name + "_" + value)).string();
            c.validate();
            row.runs.push_back(fs::path(c.output_dir) / run_directory_name(c));
            configs.push_back(std::move(c));
        }
        summary.rows.push_back(std::move(row));
    }

    std::atomic<std::size_t> next{0};
    std::mutex failure_mutex;
    std::string failure;
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            const auto outcome = cmd_run(configs[i]);
            if (outcome.failed) {
                std::lock_guard lock(failure_mutex);
                if (failure.empty())
                    failure = outcome.directory.string() + ": " + outcome.error;
            }
        }
    };
    const std::size_t workers = std::clamp<std::size_t>(jobs, 1, configs.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < workers; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();
    if (!failure.empty())
        throw std::runtime_error("sweep run failed: " + failure);

    std::ofstream out(summary.directory / "summary.csv");
    out << "value,runs,median_qd_score,median_coverage\n";
    for (std::size_t r = 0; r < summary.rows.size(); ++r) {
        auto& row = summary.rows[r];
        std::vector<double> qd, cov;
        for (const auto& dir : row.runs) {
            const auto records = read_metrics_csv(dir / "metrics.csv");
            qd.push_back(final_metric(records, Metric::qd_score));
            cov.push_back(final_metric(records, Metric::coverage));
        }
        row.median_qd_score = median(qd);
        row.median_coverage = median(cov);
        if (row.median_qd_score > summary.rows[summary.best].median_qd_score)
            summary.best = r;
        out << fmt::format("{},{},{},{}\n", row.value, row.runs.size(), format_double(row.median_qd_score), format_double(row.median_coverage));
    }
    return summary;
}

std::vector<ComparisonResult> cmd_compare(const std::vector<RunGroup>& groups, Metric metric, double alpha, const fs::path& out_dir)
{
    if (groups.size() < 2)
        throw ConfigError("compare needs at least two groups");
    std::vector<std::string> labels;
    std::vector<std::vector<double>> samples;
    std::optional<std::pair<std::size_t, std::size_t>> reference;
    std::string reference_run;
    for (const auto& group : groups) {
        std::vector<double> values;
        for (const auto& path : group.paths) {
            for (const auto& run : expand_runs(path)) {
                const auto records = read_metrics_csv(run / "metrics.csv");
                if (records.empty())
                    throw std::invalid_argument("run '" + run.string() + "' has no metrics");
                const std::pair<std::size_t, std::size_t> last{records.back().generation, records.back().evaluations};
                if (!reference) {
                    reference = last;
                    reference_run = run.string();
                }
                else if (*reference != last) {
                    throw std::invalid_argument("runs are not comparable: '" + run.string() + "' ends at generation " + std::to_string(last.first) + " with "
                        + std::to_string(last.second) + " evaluations but '" + reference_run + "' ends at generation " + std::to_string(reference->first)
                        + " with " + std::to_string(reference->second));
                }
                values.push_back(final_metric(records, metric));
            }
        }
        if (values.size() < 2)
            throw std::invalid_argument("group '" + group.label + "' needs at least two runs, found " + std::to_string(values.size()));
        labels.push_back(group.label);
        samples.push_back(std::move(values));
    }

    auto results = compare_groups(labels, samples, alpha);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        std::ofstream out(out_dir / "comparison.csv");
        out << "pair,u,p_value,alpha,reject\n";
        for (const auto& r : results)
            out << fmt::format("{},{},{},{},{}\n", r.label, format_double(r.u), format_double(r.p_value), format_double(r.alpha), r.reject ? 1 : 0);
    }
    return results;
}

int main(int argc, char** argv)
{
    CLI::App app{"Quality-Diversity experiments with pluggable local competition"};
    app.require_subcommand(1);

    std::string config_path;
    std::map<std::string, std::string> flag_values;
    std::vector<std::string> sets;
    // CLI flag -> configuration key.
    const std::vector<std::pair<std::string, std::string>> overrides = {
        {"task", "task.name"},
        {"algo", "algo.name"},
        {"k", "algo.k"},
        {"l", "algo.l"},
        {"knov", "algo.k_nov"},
        {"cells", "algo.cells"},
        {"pop-size", "run.pop_size"},
        {"batch-size", "run.batch_size"},
        {"generations", "run.generations"},
        {"seed", "run.seed"},
        {"threads", "run.threads"},
        {"out", "output.dir"},
    };
    auto add_experiment_options = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Configuration file (key = value lines)");
        for (const auto& [flag, key] : overrides)
            sub->add_option("--" + flag, flag_values[key], "Override " + key);
        sub->add_option("--set", sets, "Override any key: --set section.key=value");
    };

    auto* run = app.add_subcommand("run", "Run one experiment");
    add_experiment_options(run);

    auto* sweep = app.add_subcommand("sweep", "Sweep one algorithm parameter over values and seeds");
    add_experiment_options(sweep);
    std::string sweep_param, sweep_values, sweep_seeds = "1";
    std::size_t jobs = 1;
    sweep->add_option("--param", sweep_param, "Parameter to sweep (k, l, k_nov, cells)")->required();
    sweep->add_option("--values", sweep_values, "Comma-separated values")->required();
    sweep->add_option("--seeds", sweep_seeds, "Comma-separated seeds");
    sweep->add_option("--jobs", jobs, "Runs executed concurrently");

    auto* compare = app.add_subcommand("compare", "Mann-Whitney U + Holm-Bonferroni comparison of run groups");
    std::vector<std::string> group_specs;
    std::string metric_name = "qd_score", compare_out;
    double alpha = 0.05;
    compare->add_option("--group", group_specs, "label=run_or_dir[,run_or_dir...]")->required();
    compare->add_option("--metric", metric_name, "qd_score, coverage or max_fitness");
    compare->add_option("--alpha", alpha, "Family-wise significance level");
    compare->add_option("--out", compare_out, "Directory receiving comparison.csv");

    auto* list = app.add_subcommand("list-tasks", "List available tasks and algorithms");

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    auto build_config = [&](std::string& source) {
        ExperimentConfig config;
        if (!config_path.empty()) {
            source = read_text_file(config_path);
            apply_config(config, parse_config_text(source));
        }
        for (const auto& [key, value] : flag_values)
            if (!value.empty())
                apply_config_value(config, key, value);
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos)
                throw ConfigError("--set expects key=value, got '" + s + "'");
            apply_config_value(config, s.substr(0, eq), s.substr(eq + 1));
        }
        config.validate();
        return config;
    };

    try {
        if (*list) {
            std::cout << "tasks:";
            for (const auto& t : task_names())
                std::cout << ' ' << t;
            std::cout << "\nalgorithms:";
            for (const auto& a : algorithm_names())
                std::cout << ' ' << a;
            std::cout << '\n';
            return kExitOk;
        }
        if (*run) {
            std::string source;
            const ExperimentConfig config = build_config(source);
            const auto outcome = cmd_run(config, source);
            if (outcome.failed) {
                std::cerr << "run failed: " << outcome.error << "\npartial results in " << outcome.directory.string() << '\n';
                return kExitFailure;
            }
            const auto& last = outcome.metrics.back();
            std::cout << outcome.directory.string() << '\n'
                      << fmt::format("generation {} evaluations {} qd_score {} coverage {}\n", last.generation, last.evaluations, format_double(last.qd_score),
                             format_double(last.coverage));
            return kExitOk;
        }
        if (*sweep) {
            std::string source;
            const ExperimentConfig base = build_config(source);
            std::vector<std::uint64_t> seeds;
            for (const auto& s : split(sweep_seeds, ','))
                seeds.push_back(std::stoull(s));
            const auto summary = cmd_sweep(base, sweep_param, split(sweep_values, ','), seeds, jobs);
            std::cout << fmt::format("{:<12} {:>5} {:>18} {:>16}\n", summary.parameter, "runs", "median_qd_score", "median_coverage");
            for (std::size_t r = 0; r < summary.rows.size(); ++r) {
                const auto& row = summary.rows[r];
                std::cout << fmt::format("{:<12} {:>5} {:>18.6f} {:>16.6f}{}\n", row.value, row.runs.size(), row.median_qd_score, row.median_coverage,
                    r == summary.best ? "  <- best" : "");
            }
            std::cout << (summary.directory / "summary.csv").string() << '\n';
            return kExitOk;
        }
        if (*compare) {
            std::vector<RunGroup> groups;
            for (const auto& spec : group_specs) {
                const auto eq = spec.find('=');
                if (eq == std::string::npos || eq == 0)
                    throw ConfigError("--group expects label=path[,path...], got '" + spec + "'");
                RunGroup g{spec.substr(0, eq), {}};
                for (const auto& p : split(spec.substr(eq + 1), ','))
                    g.paths.emplace_back(p);
                groups.push_back(std::move(g));
            }
            const auto results = cmd_compare(groups, parse_metric(metric_name), alpha, compare_out);
            std::cout << fmt::format("{:<40} {:>10} {:>12} {}\n", "pair", "U", "p", "decision");
            for (const auto& r : results)
                std::cout << fmt::format("{:<40} {:>10} {:>12.6g} {}\n", r.label, format_double(r.u), r.p_value, r.reject ? "significant" : "not significant");
            return kExitOk;
        }
    }
    catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

} // namespace dnsqd::cli
