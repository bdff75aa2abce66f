#include <dnsqd/metrics.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace dnsqd {

ProjectedScore project_and_score(const Vector& fitness, const Matrix& descriptors, const CentroidSet& grid, double fitness_offset)
{
    if (fitness.size() != descriptors.rows())
        throw std::invalid_argument("project_and_score: fitness and descriptors disagree on population size");
    if (grid.size() == 0)
        throw std::invalid_argument("project_and_score: empty grid");
    ProjectedScore score;
    if (fitness.size() == 0)
        return score;
    if (grid.dim() != descriptors.cols())
        throw std::invalid_argument("project_and_score: grid dimension " + std::to_string(grid.dim()) + " does not match descriptor dimension "
            + std::to_string(descriptors.cols()));

    const auto cell = nearest_centroid(descriptors, grid.points);
    std::vector<double> elite(grid.size(), -kInf);
    for (std::size_t i = 0; i < cell.size(); ++i)
        elite[cell[i]] = std::max(elite[cell[i]], fitness[static_cast<Eigen::Index>(i)]);

    for (double f : elite) {
        if (f == -kInf)
            continue;
        const double contribution = f + fitness_offset;
        if (contribution < 0.)
            throw std::invalid_argument("project_and_score: fitness offset " + std::to_string(fitness_offset) + " leaves a negative contribution for fitness "
                + std::to_string(f));
        score.qd_score += contribution;
        ++score.occupied_cells;
        score.max_fitness = score.max_fitness ? std::max(*score.max_fitness, f) : f;
    }
    score.coverage = static_cast<double>(score.occupied_cells) / static_cast<double>(grid.size());
    return score;
}

ProjectedScore project_and_score(const Population& pop, const CentroidSet& grid, double fitness_offset)
{
    pop.check_consistent();
    std::vector<std::size_t> alive;
    for (std::size_t i = 0; i < pop.size(); ++i)
        if (pop.competition_fitness[static_cast<Eigen::Index>(i)] > -kInf)
            alive.push_back(i);
    const Population living = take(pop, alive);
    return project_and_score(living.fitness, living.descriptors, grid, fitness_offset);
}

CentroidSet make_metric_grid(const Task& task, std::size_t num_cells, std::uint64_t seed, const Matrix* population_sample)
{
    if (num_cells == 0)
        throw std::invalid_argument("make_metric_grid: need at least one cell");
    if (task.descriptor_bounds)
        return random_centroids(num_cells, *task.descriptor_bounds, seed);
    if (population_sample == nullptr || population_sample->rows() == 0)
        throw std::invalid_argument("make_metric_grid: task '" + task.name + "' has unbounded descriptors and no population sample was given");
    const Box box{population_sample->colwise().minCoeff().transpose(), population_sample->colwise().maxCoeff().transpose()};
    CentroidSet grid = random_centroids(num_cells, box, seed);
    grid.provenance = CentroidProvenance::data_driven;
    return grid;
}

} // namespace dnsqd
