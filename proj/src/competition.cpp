#include <dnsqd/competition.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dnsqd {

namespace {

    void check_inputs(const Vector& fitness, const Matrix& descriptors, std::string_view who)
    {
        if (fitness.size() != descriptors.rows())
            throw std::invalid_argument(std::string(who) + ": fitness has " + std::to_string(fitness.size()) + " entries but descriptors have "
                + std::to_string(descriptors.rows()) + " rows");
        for (Eigen::Index i = 0; i < fitness.size(); ++i)
            if (!std::isfinite(fitness[i]))
                throw NumericalError(std::string(who) + ": non-finite fitness at index " + std::to_string(i));
        for (Eigen::Index i = 0; i < descriptors.rows(); ++i)
            for (Eigen::Index d = 0; d < descriptors.cols(); ++d)
                if (!std::isfinite(descriptors(i, d)))
                    throw NumericalError(std::string(who) + ": non-finite descriptor at index " + std::to_string(i));
    }

    // Mean of the `k` smallest values, summed in ascending order.
    double mean_of_smallest(std::vector<double>& values, std::size_t k)
    {
        const std::size_t keep = std::min(k, values.size());
        std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(keep - 1), values.end());
        std::sort(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(keep));
        double sum = 0.;
        for (std::size_t i = 0; i < keep; ++i)
            sum += values[i];
        return sum / static_cast<double>(keep);
    }

    // Novelty of `who` inside `pool` (which contains `who`).
    double pool_novelty(const Matrix& descriptors, const std::vector<std::size_t>& pool, std::size_t who, std::size_t k, std::vector<double>& scratch)
    {
        scratch.clear();
        const auto w = row_of(descriptors, static_cast<Eigen::Index>(who));
        for (std::size_t m : pool)
            if (m != who)
                scratch.push_back(euclidean(w, row_of(descriptors, static_cast<Eigen::Index>(m))));
        if (scratch.empty())
            return 0.;
        return mean_of_smallest(scratch, k);
    }

} // namespace

Vector dns_competition(const Vector& fitness, const Matrix& descriptors, const DnsParams& params)
{
    check_inputs(fitness, descriptors, "dns_competition");
    if (params.k == 0)
        throw std::invalid_argument("dns_competition: k must be at least 1");

    const auto n = static_cast<std::size_t>(fitness.size());
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fitness[a] > fitness[b]; });

    Vector out(fitness.size());
    std::vector<double> dist;
    dist.reserve(n);
    // Individuals strictly fitter than order[pos] form the prefix order[0, first_equal).
    std::size_t first_equal = 0;
    for (std::size_t pos = 0; pos < n; ++pos) {
        const std::size_t i = order[pos];
        if (fitness[order[first_equal]] != fitness[i])
            first_equal = pos;
        if (first_equal == 0) {
            out[i] = kInf;
            continue;
        }
        dist.clear();
        const auto di = row_of(descriptors, static_cast<Eigen::Index>(i));
        for (std::size_t p = 0; p < first_equal; ++p)
            dist.push_back(euclidean(di, row_of(descriptors, static_cast<Eigen::Index>(order[p]))));
        out[i] = mean_of_smallest(dist, params.k);
    }
    return out;
}

Vector me_competition(const Vector& fitness, const Matrix& descriptors, const CentroidSet& centroids)
{
    check_inputs(fitness, descriptors, "me_competition");
    if (centroids.size() == 0)
        throw std::invalid_argument("me_competition: empty centroid set");
    if (centroids.dim() != descriptors.cols())
        throw std::invalid_argument("me_competition: centroid dimension " + std::to_string(centroids.dim()) + " does not match descriptor dimension "
            + std::to_string(descriptors.cols()));

    const auto cell = nearest_centroid(descriptors, centroids.points);
    constexpr std::size_t none = static_cast<std::size_t>(-1);
    std::vector<std::size_t> winner(centroids.size(), none);
    for (std::size_t i = 0; i < cell.size(); ++i) {
        std::size_t& w = winner[cell[i]];
        if (w == none || fitness[static_cast<Eigen::Index>(i)] > fitness[static_cast<Eigen::Index>(w)])
            w = i;
    }
    Vector out = Vector::Constant(fitness.size(), -kInf);
    for (std::size_t w : winner)
        if (w != none)
            out[static_cast<Eigen::Index>(w)] = fitness[static_cast<Eigen::Index>(w)];
    return out;
}

Vector te_competition(const Vector& fitness, const Matrix& descriptors, const TeParams& params)
{
    check_inputs(fitness, descriptors, "te_competition");
    if (!(params.l > 0.))
        throw std::invalid_argument("te_competition: l must be positive");
    if (params.k_nov == 0)
        throw std::invalid_argument("te_competition: k_nov must be at least 1");

    const auto n = static_cast<std::size_t>(fitness.size());
    Vector out(fitness.size());
    std::vector<std::size_t> living;
    std::vector<double> scratch;
    for (std::size_t i = 0; i < n; ++i) {
        const auto ei = static_cast<Eigen::Index>(i);
        const auto di = row_of(descriptors, ei);

        std::size_t nearest = 0;
        double nearest_d = kInf;
        for (std::size_t j : living) {
            const double d = euclidean(di, row_of(descriptors, static_cast<Eigen::Index>(j)));
            if (d < nearest_d || (d == nearest_d && j < nearest)) {
                nearest_d = d;
                nearest = j;
            }
        }
        if (living.empty() || nearest_d > params.l) {
            out[ei] = fitness[ei];
            living.push_back(i);
            continue;
        }

        living.push_back(i);
        const double nov_i = pool_novelty(descriptors, living, i, params.k_nov, scratch);
        const double nov_j = pool_novelty(descriptors, living, nearest, params.k_nov, scratch);
        living.pop_back();

        const auto ej = static_cast<Eigen::Index>(nearest);
        const bool weakly_better = fitness[ei] >= fitness[ej] && nov_i >= nov_j;
        const bool strictly_somewhere = fitness[ei] > fitness[ej] || nov_i > nov_j;
        if (weakly_better && strictly_somewhere) {
            out[ei] = fitness[ei];
            out[ej] = -kInf;
            living.erase(std::find(living.begin(), living.end(), nearest));
            living.push_back(i);
        }
        else {
            out[ei] = -kInf;
        }
    }
    return out;
}

std::vector<std::size_t> farthest_point_indices(const Matrix& points, std::size_t count)
{
    const auto n = static_cast<std::size_t>(points.rows());
    count = std::min(count, n);
    std::vector<std::size_t> chosen;
    if (count == 0)
        return chosen;
    chosen.reserve(count);
    std::vector<bool> taken(n, false);
    std::vector<double> min_dist(n, kInf);

    std::size_t next = 0;
    while (true) {
        chosen.push_back(next);
        taken[next] = true;
        if (chosen.size() == count)
            break;
        const auto c = row_of(points, static_cast<Eigen::Index>(next));
        std::size_t best = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (taken[i])
                continue;
            min_dist[i] = std::min(min_dist[i], euclidean(row_of(points, static_cast<Eigen::Index>(i)), c));
            if (best == n || min_dist[i] > min_dist[best])
                best = i;
        }
        next = best;
    }
    return chosen;
}

ClusterElitesResult cluster_elites_competition(const Vector& fitness, const Matrix& descriptors, const ClusterElitesState& state)
{
    check_inputs(fitness, descriptors, "cluster_elites_competition");
    if (fitness.size() == 0)
        throw std::invalid_argument("cluster_elites_competition: empty population");
    if (state.target_size == 0)
        throw std::invalid_argument("cluster_elites_competition: centroid subpopulation size must be at least 1");

    ClusterElitesResult result;
    result.state.target_size = state.target_size;
    result.state.centroid_indices = farthest_point_indices(descriptors, state.target_size);
    const auto& centers = result.state.centroid_indices;

    result.state.centroid_points.resize(static_cast<Eigen::Index>(centers.size()), descriptors.cols());
    std::vector<bool> is_center(static_cast<std::size_t>(fitness.size()), false);
    for (std::size_t c = 0; c < centers.size(); ++c) {
        result.state.centroid_points.row(static_cast<Eigen::Index>(c)) = descriptors.row(static_cast<Eigen::Index>(centers[c]));
        is_center[centers[c]] = true;
    }

    std::vector<std::size_t> competitors;
    for (std::size_t i = 0; i < is_center.size(); ++i)
        if (!is_center[i])
            competitors.push_back(i);

    result.competition_fitness.resize(fitness.size());
    for (std::size_t c : centers)
        result.competition_fitness[static_cast<Eigen::Index>(c)] = kInf;
    if (competitors.empty())
        return result;

    Vector sub_fit(static_cast<Eigen::Index>(competitors.size()));
    Matrix sub_desc(static_cast<Eigen::Index>(competitors.size()), descriptors.cols());
    for (std::size_t r = 0; r < competitors.size(); ++r) {
        sub_fit[static_cast<Eigen::Index>(r)] = fitness[static_cast<Eigen::Index>(competitors[r])];
        sub_desc.row(static_cast<Eigen::Index>(r)) = descriptors.row(static_cast<Eigen::Index>(competitors[r]));
    }
    const CentroidSet cells{result.state.centroid_points, CentroidProvenance::data_driven, 0};
    const Vector sub_out = me_competition(sub_fit, sub_desc, cells);
    for (std::size_t r = 0; r < competitors.size(); ++r)
        result.competition_fitness[static_cast<Eigen::Index>(competitors[r])] = sub_out[static_cast<Eigen::Index>(r)];
    return result;
}

namespace {

    class DnsCompetition final : public Competition {
    public:
        explicit DnsCompetition(DnsParams p) : _params(p) {}
        Vector compete(const Vector& f, const Matrix& d) override { return dns_competition(f, d, _params); }
        std::string_view name() const override { return "dns"; }

    private:
        DnsParams _params;
    };

    class MapElitesCompetition final : public Competition {
    public:
        explicit MapElitesCompetition(CentroidSet c) : _centroids(std::move(c)) {}
        Vector compete(const Vector& f, const Matrix& d) override { return me_competition(f, d, _centroids); }
        std::string_view name() const override { return "map_elites"; }

    private:
        CentroidSet _centroids;
    };

    class ThresholdElitesCompetition final : public Competition {
    public:
        explicit ThresholdElitesCompetition(TeParams p) : _params(p) {}
        Vector compete(const Vector& f, const Matrix& d) override { return te_competition(f, d, _params); }
        std::string_view name() const override { return "threshold_elites"; }

    private:
        TeParams _params;
    };

    class ClusterElitesCompetition final : public Competition {
    public:
        explicit ClusterElitesCompetition(std::size_t m) { _state.target_size = m; }
        Vector compete(const Vector& f, const Matrix& d) override
        {
            auto result = cluster_elites_competition(f, d, _state);
            _state = std::move(result.state);
            return std::move(result.competition_fitness);
        }
        std::string_view name() const override { return "cluster_elites"; }

    private:
        ClusterElitesState _state;
    };

    class PlainGaCompetition final : public Competition {
    public:
        Vector compete(const Vector& f, const Matrix& d) override
        {
            check_inputs(f, d, "plain_ga");
            return f;
        }
        std::string_view name() const override { return "plain_ga"; }
    };

} // namespace

std::unique_ptr<Competition> make_dns(DnsParams params) { return std::make_unique<DnsCompetition>(params); }
std::unique_ptr<Competition> make_map_elites(CentroidSet centroids) { return std::make_unique<MapElitesCompetition>(std::move(centroids)); }
std::unique_ptr<Competition> make_threshold_elites(TeParams params) { return std::make_unique<ThresholdElitesCompetition>(params); }
std::unique_ptr<Competition> make_cluster_elites(std::size_t num_centroids) { return std::make_unique<ClusterElitesCompetition>(num_centroids); }
std::unique_ptr<Competition> make_plain_ga() { return std::make_unique<PlainGaCompetition>(); }

} // namespace dnsqd
