#pragma once

#include <dnsqd/core.hpp>
#include <dnsqd/geometry.hpp>
#include <dnsqd/tasks.hpp>

#include <optional>

namespace dnsqd {

struct MetricsRecord {
    std::size_t generation = 0;
    std::size_t evaluations = 0;
    double qd_score = 0.;
    double coverage = 0.;
    // Empty when nothing was projected.
    std::optional<double> max_fitness;
};

struct ProjectedScore {
    double qd_score = 0.;
    double coverage = 0.;
    std::optional<double> max_fitness;
    std::size_t occupied_cells = 0;
};

/// Projects individuals onto a fresh grid archive (nearest centroid, one elite per
/// cell) and scores it. Every elite contributes fitness + fitness_offset, which must
/// be non-negative.
ProjectedScore project_and_score(const Vector& fitness, const Matrix& descriptors, const CentroidSet& grid, double fitness_offset);

/// Same, restricted to the individuals still alive (competition fitness above -inf).
ProjectedScore project_and_score(const Population& pop, const CentroidSet& grid, double fitness_offset);

/// Random-centroid grid used only for measurement. Bounded tasks sample inside their
/// descriptor bounds; otherwise the bounding box of `population_sample` is used.
CentroidSet make_metric_grid(const Task& task, std::size_t num_cells, std::uint64_t seed, const Matrix* population_sample = nullptr);

} // namespace dnsqd
