#pragma once

#include <dnsqd/competition.hpp>
#include <dnsqd/core.hpp>
#include <dnsqd/metrics.hpp>
#include <dnsqd/tasks.hpp>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dnsqd {

/// Invalid experiment configuration (bad values, unknown names, incompatible choices).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Algorithm { dns, map_elites, threshold_elites, cluster_elites, plain_ga };

std::string_view to_string(Algorithm algorithm);
std::optional<Algorithm> parse_algorithm(std::string_view name);
const std::vector<std::string>& algorithm_names();

struct TaskSpec {
    // arm | rastrigin | maze | maze_pca
    std::string name = "arm";
    std::size_t n_joints = 8;
    std::size_t genome_dim = 10;
    // "blocks", "open" or a path to a text grid.
    std::string maze = "blocks";
    std::size_t steps = 50;
    double step_size = 0.05;
    std::size_t n_samples = 10;
    MazeDescriptor descriptor = MazeDescriptor::final_position;
    std::size_t latent_dim = 10;
    std::size_t refit_period = 50;
};

const std::vector<std::string>& task_names();
Task build_task(const TaskSpec& spec);

struct ExperimentConfig {
    TaskSpec task;
    Algorithm algorithm = Algorithm::dns;
    std::size_t k = 3;
    double l = 0.1;
    std::size_t k_nov = 3;
    // Competition cells (MAP-Elites) or centroid subpopulation size (Cluster-Elites); 0 picks a default.
    std::size_t cells = 0;
    std::uint64_t cvt_seed = 0;

    std::size_t pop_size = 256;
    std::size_t generations = 500;
    std::size_t log_interval = 10;
    VariationParams variation;

    std::size_t metric_cells = 1024;
    std::uint64_t metric_seed = 2024;

    std::uint64_t seed = 1;
    std::size_t threads = 1;
    std::string output_dir = "runs";

    std::size_t batch_size() const { return variation.batch_size; }
    std::size_t resolved_cells() const;

    /// Throws ConfigError describing the first problem found.
    void validate() const;
};

struct ExperimentResult {
    std::vector<MetricsRecord> metrics;
    Population population;
    std::size_t evaluations = 0;
};

using RecordCallback = std::function<void(const MetricsRecord&)>;

/// Builds the competition function for a configuration (CVT grids are memoised per
/// process since they only depend on the configuration).
std::unique_ptr<Competition> make_competition(const ExperimentConfig& config, const Task& task);

/// Full run: random initial population, then `generations` rounds of
/// reproduce -> evaluate -> concat -> compete -> truncate. A metrics record is
/// emitted for generation 0, every `log_interval` generations and the last one.
/// Deterministic for a given configuration, whatever the thread count.
ExperimentResult run_experiment(const ExperimentConfig& config, const RecordCallback& on_record = {});

} // namespace dnsqd
