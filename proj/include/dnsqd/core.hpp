#pragma once

#include <dnsqd/tasks.hpp>
#include <dnsqd/types.hpp>

#include <random>
#include <vector>

namespace dnsqd {

/// Parallel arrays describing N individuals.
///
/// `raw_descriptors` is only populated for tasks with learned descriptors; it then
/// holds the un-encoded descriptor of each individual and otherwise has zero columns.
struct Population {
    Matrix genomes;
    Vector fitness;
    Matrix descriptors;
    Vector competition_fitness;
    Matrix raw_descriptors;

    std::size_t size() const { return static_cast<std::size_t>(genomes.rows()); }

    /// Throws std::invalid_argument when the arrays disagree on N.
    void check_consistent() const;
};

/// Freshly evaluated offspring that have not been through competition yet.
struct EvaluatedBatch {
    Matrix genomes;
    Vector fitness;
    Matrix descriptors;
    Matrix raw_descriptors;
};

enum class VariationOperator { iso_line, gaussian };

/// Which score decides the parent pool.
enum class ParentGate { competition_fitness, raw_fitness };

struct VariationParams {
    VariationOperator op = VariationOperator::iso_line;
    // Standard deviation of the noise along the line between the two parents.
    double mutation_sigma = 0.05;
    double iso_sigma = 0.005;
    std::size_t batch_size = 256;
    double parent_pool_fraction = 0.5;
    ParentGate gate = ParentGate::competition_fitness;

    void validate() const;
};

/// Draws `params.batch_size` offspring. Parents are sampled uniformly (with
/// replacement) from the ceil(N * parent_pool_fraction) best individuals by the gate
/// score, excluding eliminated (-inf) individuals while any survivor exists.
Matrix reproduce(const Population& pop, const VariationParams& params, std::mt19937_64& rng);

/// Parents first, offspring appended. Offspring get a competition fitness of -inf
/// until the next competition step.
Population concat(const Population& pop, const EvaluatedBatch& offspring);

struct EvaluationOptions {
    // 0 or 1 evaluates serially.
    std::size_t threads = 1;
};

/// Applies the task to every genome row. Throws NumericalError naming the first
/// genome whose fitness or descriptor is not finite.
EvaluatedBatch evaluate(const Matrix& genomes, const Task& task, const EvaluationOptions& options = {});

/// Indices of the n individuals with the highest competition fitness, ties going to
/// the lower index, returned in ascending index order.
std::vector<std::size_t> top_n_indices(const Vector& competition_fitness, std::size_t n);

/// Keeps the n best individuals by competition fitness (original order preserved).
Population select_top_n(const Population& pop, std::size_t n);

/// Rows `indices` of every array.
Population take(const Population& pop, const std::vector<std::size_t>& indices);

} // namespace dnsqd
