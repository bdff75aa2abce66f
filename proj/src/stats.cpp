#include <dnsqd/stats.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace dnsqd {

namespace {

    // Twice the midranks of the pooled sample (integers), a first.
    std::vector<std::int64_t> doubled_midranks(std::span<const double> a, std::span<const double> b)
    {
        std::vector<double> pooled(a.begin(), a.end());
        pooled.insert(pooled.end(), b.begin(), b.end());
        std::vector<std::size_t> order(pooled.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return pooled[x] < pooled[y]; });

        std::vector<std::int64_t> rank2(pooled.size());
        std::size_t i = 0;
        while (i < order.size()) {
            std::size_t j = i;
            while (j + 1 < order.size() && pooled[order[j + 1]] == pooled[order[i]])
                ++j;
            // Ranks i+1 .. j+1 share (i + j + 2) / 2.
            for (std::size_t t = i; t <= j; ++t)
                rank2[order[t]] = static_cast<std::int64_t>(i + j + 2);
            i = j + 1;
        }
        return rank2;
    }

    // Number of arrangements with U_a = u for tie-free data, u = 0..n*m.
    std::vector<double> untied_distribution(std::size_t n, std::size_t m)
    {
        // table[i][j] is the distribution for sample sizes (i, j).
        std::vector<std::vector<std::vector<double>>> table(n + 1, std::vector<std::vector<double>>(m + 1));
        for (std::size_t i = 0; i <= n; ++i) {
            for (std::size_t j = 0; j <= m; ++j) {
                auto& cur = table[i][j];
                cur.assign(i * j + 1, 0.);
                if (i == 0 || j == 0) {
                    cur[0] = 1.;
                    continue;
                }
                // The largest pooled value belongs to a (beats all j values of b) or to b.
                const auto& with_a = table[i - 1][j];
                const auto& with_b = table[i][j - 1];
                for (std::size_t u = 0; u < with_a.size(); ++u)
                    cur[u + j] += with_a[u];
                for (std::size_t u = 0; u < with_b.size(); ++u)
                    cur[u] += with_b[u];
            }
        }
        return table[n][m];
    }

    double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.)); }

} // namespace

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b, MannWhitneyMethod method)
{
    if (a.empty() || b.empty())
        throw std::invalid_argument("mann_whitney_u: both samples must be non-empty");
    for (double v : a)
        if (std::isnan(v))
            throw std::invalid_argument("mann_whitney_u: NaN in first sample");
    for (double v : b)
        if (std::isnan(v))
            throw std::invalid_argument("mann_whitney_u: NaN in second sample");

    const std::size_t n = a.size(), m = b.size(), total = n + m;
    const auto rank2 = doubled_midranks(a, b);
    std::int64_t rank_sum2 = 0;
    for (std::size_t i = 0; i < n; ++i)
        rank_sum2 += rank2[i];
    // 2 * U_a and 2 * n * m / 2.
    const std::int64_t nn = static_cast<std::int64_t>(n);
    const std::int64_t u2 = rank_sum2 - nn * (nn + 1);
    const std::int64_t center2 = static_cast<std::int64_t>(n * m);
    const std::int64_t observed_dev = std::llabs(u2 - center2);

    MannWhitneyResult result;
    result.u = 0.5 * static_cast<double>(std::min(u2, 2 * center2 - u2));

    const bool tied = [&] {
        auto sorted = rank2;
        std::sort(sorted.begin(), sorted.end());
        return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
    }();

    const bool small = n <= kExactMannWhitneyLimit && m <= kExactMannWhitneyLimit;
    if (method == MannWhitneyMethod::exact && !small)
        throw std::invalid_argument("mann_whitney_u: exact test limited to samples of at most 8 values");
    if (method == MannWhitneyMethod::exact || (method == MannWhitneyMethod::automatic && small)) {
        result.exact = true;
        double extreme = 0., count = 0.;
        if (!tied) {
            const auto dist = untied_distribution(n, m);
            for (std::size_t u = 0; u < dist.size(); ++u) {
                count += dist[u];
                if (std::llabs(2 * static_cast<std::int64_t>(u) - center2) >= observed_dev)
                    extreme += dist[u];
            }
        }
        else {
            // Enumerate every way of giving n of the pooled midranks to the first sample.
            std::vector<bool> in_a(total, false);
            std::fill(in_a.begin(), in_a.begin() + static_cast<std::ptrdiff_t>(n), true);
            do {
                std::int64_t s = 0;
                for (std::size_t i = 0; i < total; ++i)
                    if (in_a[i])
                        s += rank2[i];
                const std::int64_t dev = std::llabs(s - nn * (nn + 1) - center2);
                count += 1.;
                if (dev >= observed_dev)
                    extreme += 1.;
            } while (std::prev_permutation(in_a.begin(), in_a.end()));
        }
        result.p_value = std::min(1., extreme / count);
        return result;
    }

    // Normal approximation with tie correction on the variance and continuity correction.
    std::vector<std::int64_t> sorted = rank2;
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0.;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i])
            ++j;
        const double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        i = j;
    }
    const double dn = static_cast<double>(n), dm = static_cast<double>(m), dt = static_cast<double>(total);
    const double variance = dn * dm / 12. * ((dt + 1.) - tie_term / (dt * (dt - 1.)));
    if (variance <= 0.) {
        result.p_value = 1.;
        return result;
    }
    const double deviation = 0.5 * static_cast<double>(observed_dev) - 0.5;
    const double z = std::max(0., deviation) / std::sqrt(variance);
    result.p_value = std::min(1., 2. * normal_sf(z));
    return result;
}

std::vector<bool> holm_bonferroni(std::span<const double> p_values, double alpha)
{
    if (!(alpha > 0. && alpha < 1.))
        throw std::invalid_argument("holm_bonferroni: alpha must lie in (0, 1)");
    for (double p : p_values)
        if (!(p >= 0. && p <= 1.))
            throw std::invalid_argument("holm_bonferroni: p-values must lie in [0, 1]");

    const std::size_t m = p_values.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });

    std::vector<bool> reject(m, false);
    for (std::size_t rank = 0; rank < m; ++rank) {
        const double threshold = alpha / static_cast<double>(m - rank);
        if (p_values[order[rank]] > threshold)
            break;
        reject[order[rank]] = true;
    }
    return reject;
}

std::vector<ComparisonResult> compare_groups(const std::vector<std::string>& labels, const std::vector<std::vector<double>>& samples, double alpha)
{
    if (labels.size() != samples.size())
        throw std::invalid_argument("compare_groups: one label per group required");
    if (labels.size() < 2)
        throw std::invalid_argument("compare_groups: need at least two groups");

    std::vector<ComparisonResult> results;
    std::vector<double> p;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        for (std::size_t j = i + 1; j < labels.size(); ++j) {
            const auto mw = mann_whitney_u(samples[i], samples[j]);
            results.push_back({labels[i] + " vs " + labels[j], mw.u, mw.p_value, false, alpha});
            p.push_back(mw.p_value);
        }
    }
    const auto flags = holm_bonferroni(p, alpha);
    for (std::size_t i = 0; i < results.size(); ++i)
        results[i].reject = flags[i];
    return results;
}

} // namespace dnsqd
