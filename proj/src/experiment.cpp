#include <dnsqd/experiment.hpp>

#include <iostream>
#include <map>
#include <mutex>
#include <tuple>

namespace dnsqd {

namespace {

    const std::vector<std::pair<Algorithm, std::string>>& algorithm_table()
    {
        static const std::vector<std::pair<Algorithm, std::string>> table = {
            {Algorithm::dns, "dns"},
            {Algorithm::map_elites, "map_elites"},
            {Algorithm::threshold_elites, "threshold_elites"},
            {Algorithm::cluster_elites, "cluster_elites"},
            {Algorithm::plain_ga, "plain_ga"},
        };
        return table;
    }

    CentroidSet cached_cvt(std::size_t cells, const Box& bounds, std::uint64_t seed)
    {
        using Key = std::tuple<std::size_t, std::uint64_t, std::vector<double>>;
        static std::mutex mutex;
        static std::map<Key, CentroidSet> cache;

        std::vector<double> box(bounds.lower.data(), bounds.lower.data() + bounds.dim());
        box.insert(box.end(), bounds.upper.data(), bounds.upper.data() + bounds.dim());
        Key key{cells, seed, std::move(box)};
        {
            std::lock_guard lock(mutex);
            if (auto it = cache.find(key); it != cache.end())
                return it->second;
        }
        CentroidSet grid = cvt_centroids(cells, bounds, seed);
        std::lock_guard lock(mutex);
        return cache.emplace(std::move(key), std::move(grid)).first->second;
    }

    Matrix uniform_genomes(std::size_t n, std::size_t dim, std::mt19937_64& rng)
    {
        std::uniform_real_distribution<double> unit(0., 1.);
        Matrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
        for (Eigen::Index i = 0; i < out.rows(); ++i)
            for (Eigen::Index d = 0; d < out.cols(); ++d)
                out(i, d) = unit(rng);
        return out;
    }

    Population from_batch(EvaluatedBatch batch)
    {
        Population pop;
        pop.genomes = std::move(batch.genomes);
        pop.fitness = std::move(batch.fitness);
        pop.descriptors = std::move(batch.descriptors);
        pop.raw_descriptors = std::move(batch.raw_descriptors);
        pop.competition_fitness = Vector::Constant(pop.fitness.size(), -kInf);
        return pop;
    }

} // namespace

std::string_view to_string(Algorithm algorithm)
{
    for (const auto& [a, name] : algorithm_table())
        if (a == algorithm)
            return name;
    return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name)
{
    for (const auto& [a, n] : algorithm_table())
        if (n == name)
            return a;
    return std::nullopt;
}

const std::vector<std::string>& algorithm_names()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& entry : algorithm_table())
            out.push_back(entry.second);
        return out;
    }();
    return names;
}

const std::vector<std::string>& task_names()
{
    static const std::vector<std::string> names = {"arm", "rastrigin", "maze", "maze_pca"};
    return names;
}

Task build_task(const TaskSpec& spec)
{
    try {
        if (spec.name == "arm")
            return arm_task(spec.n_joints);
        if (spec.name == "rastrigin")
            return rastrigin_projection_task(spec.genome_dim);
        if (spec.name == "maze" || spec.name == "maze_pca") {
            MazeLayout layout;
            if (spec.maze == "blocks") {
                layout = MazeLayout::blocks();
            }
            else if (spec.maze == "open") {
                layout = MazeLayout::blocks();
                layout.walls.clear();
            }
            else {
                layout = load_maze_layout(spec.maze, spec.steps, spec.step_size);
            }
            layout.steps = spec.steps;
            layout.step_size = spec.step_size;
            if (spec.name == "maze")
                return maze_task(layout, spec.n_samples, spec.descriptor);
            return maze_pca_task(layout, spec.n_samples, LearnedDescriptor{spec.latent_dim, spec.refit_period});
        }
    }
    catch (const ConfigError&) {
        throw;
    }
    catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    std::string valid;
    for (const auto& n : task_names())
        valid += (valid.empty() ? "" : ", ") + n;
    throw ConfigError("unknown task '" + spec.name + "' (valid: " + valid + ")");
}

std::size_t ExperimentConfig::resolved_cells() const
{
    if (cells > 0)
        return cells;
    if (algorithm == Algorithm::cluster_elites)
        return std::max<std::size_t>(1, pop_size / 2);
    return pop_size;
}

void ExperimentConfig::validate() const
{
    if (pop_size < 2)
        throw ConfigError("run.pop_size must be at least 2");
    if (log_interval == 0)
        throw ConfigError("run.log_interval must be positive");
    if (threads == 0)
        throw ConfigError("run.threads must be positive");
    if (metric_cells == 0)
        throw ConfigError("metrics.cells must be positive");
    if (k == 0)
        throw ConfigError("algo.k must be at least 1");
    if (k_nov == 0)
        throw ConfigError("algo.k_nov must be at least 1");
    if (!(l > 0.))
        throw ConfigError("algo.l must be positive");
    try {
        variation.validate();
    }
    catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const Task built = build_task(task);
    if (algorithm == Algorithm::map_elites && !built.descriptor_bounds)
        throw ConfigError("map_elites needs a task with bounded descriptors; '" + built.name + "' has none");
    if (built.learned && pop_size < built.learned->latent_dim)
        throw ConfigError("run.pop_size must be at least the latent descriptor dimension");
}

std::unique_ptr<Competition> make_competition(const ExperimentConfig& config, const Task& task)
{
    switch (config.algorithm) {
    case Algorithm::dns:
        return make_dns(DnsParams{config.k});
    case Algorithm::map_elites:
        return make_map_elites(cached_cvt(config.resolved_cells(), *task.descriptor_bounds, config.cvt_seed));
    case Algorithm::threshold_elites:
        return make_threshold_elites(TeParams{config.l, config.k_nov});
    case Algorithm::cluster_elites:
        return make_cluster_elites(config.resolved_cells());
    case Algorithm::plain_ga:
        return make_plain_ga();
    }
    throw ConfigError("unknown algorithm");
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RecordCallback& on_record)
{
    config.validate();
    const Task task = build_task(config.task);
    auto competition = make_competition(config, task);
    const EvaluationOptions eval_options{config.threads};
    std::mt19937_64 rng(config.seed);

    std::optional<CentroidSet> fixed_grid;
    if (task.descriptor_bounds)
        fixed_grid = make_metric_grid(task, config.metric_cells, config.metric_seed);

    ExperimentResult result;
    auto log = [&](std::size_t generation, const Population& pop) {
        std::optional<CentroidSet> grid = fixed_grid;
        if (!grid) {
            std::vector<std::size_t> alive;
            for (std::size_t i = 0; i < pop.size(); ++i)
                if (pop.competition_fitness[static_cast<Eigen::Index>(i)] > -kInf)
                    alive.push_back(i);
            const Matrix sample = take(pop, alive).descriptors;
            grid = make_metric_grid(task, config.metric_cells, config.metric_seed, &sample);
        }
        const ProjectedScore score = project_and_score(pop, *grid, task.fitness_offset);
        MetricsRecord record{generation, result.evaluations, score.qd_score, score.coverage, score.max_fitness};
        result.metrics.push_back(record);
        if (on_record)
            on_record(record);
    };

    std::optional<PcaDescriptorState> pca;
    bool warned_rank = false;
    auto refit = [&](Population& pop) {
        PcaDescriptorState base = pca ? *pca : PcaDescriptorState{task.learned->latent_dim, task.learned->refit_period, {}, {}, {}, false};
        pca = pca_refit(base, pop.raw_descriptors);
        if (pca->rank_deficient && !warned_rank) {
            std::clog << "warning: PCA refit on a rank-deficient trajectory buffer; trailing directions are arbitrary\n";
            warned_rank = true;
        }
        pop.descriptors = pca_encode(*pca, pop.raw_descriptors);
    };

    Population pop = from_batch(evaluate(uniform_genomes(config.pop_size, task.genome_dim, rng), task, eval_options));
    result.evaluations = config.pop_size;
    if (task.learned)
        refit(pop);
    pop.competition_fitness = competition->compete(pop.fitness, pop.descriptors);
    log(0, pop);

    for (std::size_t gen = 1; gen <= config.generations; ++gen) {
        const Matrix children = reproduce(pop, config.variation, rng);
        EvaluatedBatch batch = evaluate(children, task, eval_options);
        if (task.learned)
            batch.descriptors = pca_encode(*pca, batch.raw_descriptors);
        result.evaluations += config.batch_size();

        Population combined = concat(pop, batch);
        combined.competition_fitness = competition->compete(combined.fitness, combined.descriptors);
        pop = select_top_n(combined, config.pop_size);

        if (task.learned && gen % task.learned->refit_period == 0) {
            refit(pop);
            pop.competition_fitness = competition->compete(pop.fitness, pop.descriptors);
        }
        if (gen % config.log_interval == 0 || gen == config.generations)
            log(gen, pop);
    }
    result.population = std::move(pop);
    return result;
}

} // namespace dnsqd
