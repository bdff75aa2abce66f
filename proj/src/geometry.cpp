#include <dnsqd/geometry.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace dnsqd {

namespace {

    double squared_distance(std::span<const double> a, std::span<const double> b)
    {
        double sum = 0.;
        for (std::size_t d = 0; d < a.size(); ++d) {
            const double diff = a[d] - b[d];
            sum += diff * diff;
        }
        return sum;
    }

    bool neighbor_less(const Neighbor& a, const Neighbor& b)
    {
        return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
    }

    void check_box(const Box& bounds)
    {
        if (bounds.lower.size() != bounds.upper.size() || bounds.lower.size() == 0)
            throw std::invalid_argument("box bounds must be non-empty and of equal dimension");
        for (Eigen::Index d = 0; d < bounds.dim(); ++d) {
            if (!std::isfinite(bounds.lower[d]) || !std::isfinite(bounds.upper[d]) || bounds.lower[d] > bounds.upper[d])
                throw std::invalid_argument("invalid box bounds in dimension " + std::to_string(d));
        }
    }

    Matrix uniform_in_box(std::size_t count, const Box& bounds, std::mt19937_64& rng)
    {
        std::uniform_real_distribution<double> unit(0., 1.);
        Matrix out(static_cast<Eigen::Index>(count), bounds.dim());
        for (Eigen::Index i = 0; i < out.rows(); ++i)
            for (Eigen::Index d = 0; d < out.cols(); ++d)
                out(i, d) = bounds.lower[d] + (bounds.upper[d] - bounds.lower[d]) * unit(rng);
        return out;
    }

    // Assigns every sample to its nearest centroid by squared distance and returns the energy.
    double assign(const Matrix& samples, const Matrix& centroids, std::vector<std::size_t>& owner, std::vector<double>& dist2)
    {
        double energy = 0.;
        for (Eigen::Index i = 0; i < samples.rows(); ++i) {
            const auto s = row_of(samples, i);
            std::size_t best = 0;
            double best_d = squared_distance(s, row_of(centroids, 0));
            for (Eigen::Index c = 1; c < centroids.rows(); ++c) {
                const double d = squared_distance(s, row_of(centroids, c));
                if (d < best_d) {
                    best_d = d;
                    best = static_cast<std::size_t>(c);
                }
            }
            owner[i] = best;
            dist2[i] = best_d;
            energy += best_d;
        }
        return energy;
    }

    Matrix kmeans_pp_init(const Matrix& samples, std::size_t num_centroids, std::mt19937_64& rng)
    {
        const auto n = static_cast<std::size_t>(samples.rows());
        std::uniform_real_distribution<double> unit(0., 1.);
        Matrix centroids(static_cast<Eigen::Index>(num_centroids), samples.cols());

        auto pick_uniform = [&] { return std::min(n - 1, static_cast<std::size_t>(unit(rng) * static_cast<double>(n))); };

        std::size_t first = pick_uniform();
        centroids.row(0) = samples.row(static_cast<Eigen::Index>(first));
        std::vector<double> d2(n);
        for (std::size_t i = 0; i < n; ++i)
            d2[i] = squared_distance(row_of(samples, static_cast<Eigen::Index>(i)), row_of(centroids, 0));

        for (std::size_t c = 1; c < num_centroids; ++c) {
            double total = 0.;
            for (double v : d2)
                total += v;
            std::size_t chosen = 0;
            if (total <= 0.) {
                chosen = pick_uniform();
            }
            else {
                const double target = unit(rng) * total;
                double acc = 0.;
                chosen = n - 1;
                for (std::size_t i = 0; i < n; ++i) {
                    acc += d2[i];
                    if (acc > target && d2[i] > 0.) {
                        chosen = i;
                        break;
                    }
                }
            }
            centroids.row(static_cast<Eigen::Index>(c)) = samples.row(static_cast<Eigen::Index>(chosen));
            for (std::size_t i = 0; i < n; ++i)
                d2[i] = std::min(d2[i], squared_distance(row_of(samples, static_cast<Eigen::Index>(i)), row_of(centroids, static_cast<Eigen::Index>(c))));
        }
        return centroids;
    }

} // namespace

double euclidean(std::span<const double> a, std::span<const double> b)
{
    return std::sqrt(squared_distance(a, b));
}

Matrix pairwise_distances(const Matrix& a, const Matrix& b)
{
    if (a.cols() != b.cols())
        throw std::invalid_argument("pairwise_distances: dimension mismatch (" + std::to_string(a.cols()) + " vs " + std::to_string(b.cols()) + ")");
    Matrix out(a.rows(), b.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < b.rows(); ++j)
            out(i, j) = euclidean(row_of(a, i), row_of(b, j));
    return out;
}

std::vector<std::vector<Neighbor>> k_nearest(std::span<const std::size_t> queries, const Matrix& points, std::size_t k,
    const std::function<bool(std::size_t)>& eligible)
{
    if (k == 0)
        throw std::invalid_argument("k_nearest: k must be at least 1");
    const auto n = static_cast<std::size_t>(points.rows());
    std::vector<std::vector<Neighbor>> result;
    result.reserve(queries.size());
    std::vector<Neighbor> candidates;
    for (std::size_t q : queries) {
        if (q >= n)
            throw std::out_of_range("k_nearest: query index out of range");
        candidates.clear();
        const auto qrow = row_of(points, static_cast<Eigen::Index>(q));
        for (std::size_t j = 0; j < n; ++j) {
            if (j == q || (eligible && !eligible(j)))
                continue;
            candidates.push_back({j, euclidean(qrow, row_of(points, static_cast<Eigen::Index>(j)))});
        }
        const std::size_t keep = std::min(k, candidates.size());
        std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep), candidates.end(), neighbor_less);
        result.emplace_back(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep));
    }
    return result;
}

Vector novelty_score(const Matrix& points, std::size_t k)
{
    if (points.rows() < 2)
        throw std::invalid_argument("novelty_score: needs at least 2 points");
    if (k == 0)
        throw std::invalid_argument("novelty_score: k must be at least 1");
    std::vector<std::size_t> all(static_cast<std::size_t>(points.rows()));
    for (std::size_t i = 0; i < all.size(); ++i)
        all[i] = i;
    const auto neighbors = k_nearest(all, points, k, {});
    Vector out(points.rows());
    for (std::size_t i = 0; i < all.size(); ++i) {
        double sum = 0.;
        for (const auto& nb : neighbors[i])
            sum += nb.distance;
        out[static_cast<Eigen::Index>(i)] = sum / static_cast<double>(neighbors[i].size());
    }
    return out;
}

std::vector<std::size_t> nearest_centroid(const Matrix& points, const Matrix& centroids)
{
    if (centroids.rows() == 0)
        throw std::invalid_argument("nearest_centroid: empty centroid set");
    if (points.cols() != centroids.cols())
        throw std::invalid_argument("nearest_centroid: dimension mismatch (" + std::to_string(points.cols()) + " vs " + std::to_string(centroids.cols()) + ")");
    std::vector<std::size_t> out(static_cast<std::size_t>(points.rows()));
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        const auto p = row_of(points, i);
        std::size_t best = 0;
        double best_d = euclidean(p, row_of(centroids, 0));
        for (Eigen::Index c = 1; c < centroids.rows(); ++c) {
            const double d = euclidean(p, row_of(centroids, c));
            if (d < best_d) {
                best_d = d;
                best = static_cast<std::size_t>(c);
            }
        }
        out[static_cast<std::size_t>(i)] = best;
    }
    return out;
}

Box Box::unit(Eigen::Index dim)
{
    return Box{Vector::Zero(dim), Vector::Ones(dim)};
}

double quantization_energy(const Matrix& samples, const Matrix& centroids)
{
    std::vector<std::size_t> owner(static_cast<std::size_t>(samples.rows()));
    std::vector<double> d2(owner.size());
    return assign(samples, centroids, owner, d2);
}

CentroidSet cvt_centroids(std::size_t num_centroids, const Box& bounds, std::uint64_t seed, const CvtOptions& options,
    std::vector<double>* energy_trace)
{
    if (num_centroids == 0)
        throw std::invalid_argument("cvt_centroids: need at least one centroid");
    check_box(bounds);
    const std::size_t sample_count = options.sample_count == 0 ? 50 * num_centroids : options.sample_count;
    if (num_centroids > sample_count)
        throw std::invalid_argument("cvt_centroids: more centroids (" + std::to_string(num_centroids) + ") than samples (" + std::to_string(sample_count) + ")");

    std::mt19937_64 rng(seed);
    const Matrix samples = uniform_in_box(sample_count, bounds, rng);
    Matrix centroids = kmeans_pp_init(samples, num_centroids, rng);

    std::vector<std::size_t> owner(sample_count);
    std::vector<double> d2(sample_count);
    double energy = assign(samples, centroids, owner, d2);
    if (energy_trace) {
        energy_trace->clear();
        energy_trace->push_back(energy);
    }

    Matrix sums(centroids.rows(), centroids.cols());
    std::vector<std::size_t> counts(num_centroids);
    for (std::size_t it = 0; it < options.lloyd_iters; ++it) {
        sums.setZero();
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < sample_count; ++i) {
            sums.row(static_cast<Eigen::Index>(owner[i])) += samples.row(static_cast<Eigen::Index>(i));
            ++counts[owner[i]];
        }
        for (std::size_t c = 0; c < num_centroids; ++c) {
            const auto ci = static_cast<Eigen::Index>(c);
            if (counts[c] > 0) {
                centroids.row(ci) = sums.row(ci) / static_cast<double>(counts[c]);
                continue;
            }
            // Empty cell: move it onto the sample worst served by the current centroids.
            std::size_t far = 0;
            for (std::size_t i = 1; i < sample_count; ++i)
                if (d2[i] > d2[far])
                    far = i;
            centroids.row(ci) = samples.row(static_cast<Eigen::Index>(far));
            d2[far] = 0.;
        }

        const double next = assign(samples, centroids, owner, d2);
        if (next > energy * (1. + 1e-12))
            throw std::logic_error("cvt_centroids: Lloyd energy increased from " + std::to_string(energy) + " to " + std::to_string(next));
        if (energy_trace)
            energy_trace->push_back(next);
        const bool converged = (energy - next) <= options.rel_tolerance * energy;
        energy = next;
        if (converged)
            break;
    }
    return CentroidSet{std::move(centroids), CentroidProvenance::cvt, seed};
}

CentroidSet random_centroids(std::size_t num_centroids, const Box& bounds, std::uint64_t seed)
{
    if (num_centroids == 0)
        throw std::invalid_argument("random_centroids: need at least one centroid");
    check_box(bounds);
    std::mt19937_64 rng(seed);
    return CentroidSet{uniform_in_box(num_centroids, bounds, rng), CentroidProvenance::random, seed};
}

} // namespace dnsqd
