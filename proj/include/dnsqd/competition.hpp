#pragma once

#include <dnsqd/geometry.hpp>
#include <dnsqd/types.hpp>

#include <memory>
#include <string_view>
#include <vector>

namespace dnsqd {

// Competition functions map (fitness, descriptors) to a competition fitness used by
// truncation selection. Outputs live in R u {+inf, -inf}: +inf marks individuals that
// must be kept, -inf marks individuals that lost their local competition.

struct DnsParams {
    std::size_t k = 3;
};

/// Dominated novelty: mean descriptor distance to the k nearest strictly fitter
/// individuals, or +inf when nobody is fitter.
Vector dns_competition(const Vector& fitness, const Matrix& descriptors, const DnsParams& params);

/// MAP-Elites: each individual joins the cell of its nearest centroid and only the
/// fittest member of a cell (lowest index on ties) keeps its fitness.
Vector me_competition(const Vector& fitness, const Matrix& descriptors, const CentroidSet& centroids);

struct TeParams {
    double l = 0.1;
    std::size_t k_nov = 3;
};

/// Threshold-Elites. Individuals are processed in index order; an individual closer
/// than `l` to its nearest living predecessor must beat it on both fitness and
/// novelty (weakly on both, strictly on one) to replace it.
///
/// Novelty for the pair is measured against the pool of living predecessors plus the
/// individual being processed.
Vector te_competition(const Vector& fitness, const Matrix& descriptors, const TeParams& params);

struct ClusterElitesState {
    std::size_t target_size = 0;
    std::vector<std::size_t> centroid_indices;
    Matrix centroid_points;
};

struct ClusterElitesResult {
    Vector competition_fitness;
    ClusterElitesState state;
};

/// Greedy max-min (farthest point) selection of `count` rows, seeded with row 0.
std::vector<std::size_t> farthest_point_indices(const Matrix& points, std::size_t count);

/// Cluster-Elites variant: a farthest-point centroid subpopulation is re-selected from
/// the combined population every call and receives +inf; everyone else competes
/// MAP-Elites style in the cells spanned by those centroids.
ClusterElitesResult cluster_elites_competition(const Vector& fitness, const Matrix& descriptors, const ClusterElitesState& state);

/// Runtime-polymorphic wrapper used by the generation loop.
class Competition {
public:
    virtual ~Competition() = default;
    virtual Vector compete(const Vector& fitness, const Matrix& descriptors) = 0;
    virtual std::string_view name() const = 0;
};

std::unique_ptr<Competition> make_dns(DnsParams params);
std::unique_ptr<Competition> make_map_elites(CentroidSet centroids);
std::unique_ptr<Competition> make_threshold_elites(TeParams params);
std::unique_ptr<Competition> make_cluster_elites(std::size_t num_centroids);
/// Plain GA: competition fitness is the raw fitness.
std::unique_ptr<Competition> make_plain_ga();

} // namespace dnsqd
