#pragma once

#include <dnsqd/types.hpp>

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace dnsqd {

/// Euclidean distance, accumulated in dimension order.
double euclidean(std::span<const double> a, std::span<const double> b);

/// P x Q matrix of distances between the rows of `a` and the rows of `b`.
Matrix pairwise_distances(const Matrix& a, const Matrix& b);

struct Neighbor {
    std::size_t index;
    double distance;

    bool operator==(const Neighbor&) const = default;
};

/// Exact brute-force k-nearest-neighbour search within one point set.
///
/// For every query index the result holds up to `k` eligible neighbours sorted by
/// ascending distance, ties going to the lower index. A query never appears in its
/// own neighbour list.
std::vector<std::vector<Neighbor>> k_nearest(std::span<const std::size_t> queries, const Matrix& points, std::size_t k,
    const std::function<bool(std::size_t)>& eligible);

/// Mean distance of each row to its min(k, N-1) nearest other rows. Requires N >= 2.
Vector novelty_score(const Matrix& points, std::size_t k);

/// Index of the nearest centroid for each row of `points` (ties to the lower index).
std::vector<std::size_t> nearest_centroid(const Matrix& points, const Matrix& centroids);

/// Axis-aligned box.
struct Box {
    Vector lower;
    Vector upper;

    Eigen::Index dim() const { return lower.size(); }
    static Box unit(Eigen::Index dim);
};

enum class CentroidProvenance { cvt, random, data_driven };

struct CentroidSet {
    Matrix points;
    CentroidProvenance provenance = CentroidProvenance::random;
    std::uint64_t seed = 0;

    std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
    Eigen::Index dim() const { return points.cols(); }
};

struct CvtOptions {
    // 0 selects 50 samples per centroid.
    std::size_t sample_count = 0;
    std::size_t lloyd_iters = 100;
    // Stop once the relative energy improvement of one iteration drops below this.
    double rel_tolerance = 1e-9;
};

/// Centroidal Voronoi tessellation of a box, computed with Lloyd's algorithm on
/// uniform samples and a k-means++ initialisation.
///
/// The quantization energy (sum of squared sample-to-centroid distances) is checked
/// after every iteration and a `std::logic_error` is raised if it ever increases
/// beyond round-off. If `energy_trace` is given it receives the energy before the
/// first update and after each iteration.
CentroidSet cvt_centroids(std::size_t num_centroids, const Box& bounds, std::uint64_t seed, const CvtOptions& options = {},
    std::vector<double>* energy_trace = nullptr);

/// Sum of squared distances from each sample to its nearest centroid.
double quantization_energy(const Matrix& samples, const Matrix& centroids);

/// M centroids drawn uniformly from the box.
CentroidSet random_centroids(std::size_t num_centroids, const Box& bounds, std::uint64_t seed);

} // namespace dnsqd
