#pragma once

// Brute-force reference implementations used by the unit and acceptance suites.
// They transcribe the definitions directly and share no code with the library
// beyond the Matrix/Vector aliases.

#include <dnsqd/types.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <vector>

namespace oracle {

using dnsqd::Matrix;
using dnsqd::Vector;

inline constexpr double inf = std::numeric_limits<double>::infinity();

inline double dist(const Matrix& a, Eigen::Index i, const Matrix& b, Eigen::Index j)
{
    double s = 0.;
    for (Eigen::Index d = 0; d < a.cols(); ++d)
        s += (a(i, d) - b(j, d)) * (a(i, d) - b(j, d));
    return std::sqrt(s);
}

inline double mean_smallest(std::vector<double> v, std::size_t k)
{
    std::sort(v.begin(), v.end());
    const std::size_t m = std::min(k, v.size());
    double s = 0.;
    for (std::size_t i = 0; i < m; ++i)
        s += v[i];
    return s / static_cast<double>(m);
}

/// Dominated novelty: D_i = {j : f_j > f_i}; +inf when empty.
inline Vector dns(const Vector& f, const Matrix& d, std::size_t k)
{
    Vector out(f.size());
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        std::vector<double> fitter;
        for (Eigen::Index j = 0; j < f.size(); ++j)
            if (f[j] > f[i])
                fitter.push_back(dist(d, i, d, j));
        out[i] = fitter.empty() ? inf : mean_smallest(fitter, k);
    }
    return out;
}

inline std::vector<std::size_t> cells(const Matrix& d, const Matrix& centroids)
{
    std::vector<std::size_t> cell(static_cast<std::size_t>(d.rows()));
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        Eigen::Index best = 0;
        for (Eigen::Index c = 1; c < centroids.rows(); ++c)
            if (dist(d, i, centroids, c) < dist(d, i, centroids, best))
                best = c;
        cell[static_cast<std::size_t>(i)] = static_cast<std::size_t>(best);
    }
    return cell;
}

/// MAP-Elites: i keeps f_i unless a cell-mate is fitter, or equally fit with a lower index.
inline Vector me(const Vector& f, const Matrix& d, const Matrix& centroids)
{
    const auto cell = cells(d, centroids);
    Vector out(f.size());
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        bool beaten = false;
        for (Eigen::Index j = 0; j < f.size() && !beaten; ++j)
            if (j != i && cell[j] == cell[i] && (f[j] > f[i] || (f[j] == f[i] && j < i)))
                beaten = true;
        out[i] = beaten ? -inf : f[i];
    }
    return out;
}

/// Threshold-Elites, processed in index order.
inline Vector te(const Vector& f, const Matrix& d, double l, std::size_t k_nov)
{
    const Eigen::Index n = f.size();
    Vector out = Vector::Constant(n, std::nan(""));
    auto novelty = [&](Eigen::Index who, Eigen::Index current) {
        std::vector<double> v;
        for (Eigen::Index m = 0; m <= current; ++m) {
            const bool in_pool = m == current || out[m] > -inf;
            if (in_pool && m != who)
                v.push_back(dist(d, who, d, m));
        }
        return v.empty() ? 0. : mean_smallest(v, k_nov);
    };
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index j = -1;
        double best = inf;
        for (Eigen::Index m = 0; m < i; ++m) {
            if (!(out[m] > -inf))
                continue;
            const double dm = dist(d, i, d, m);
            if (dm < best) {
                best = dm;
                j = m;
            }
        }
        if (j < 0 || best > l) {
            out[i] = f[i];
            continue;
        }
        const double ni = novelty(i, i), nj = novelty(j, i);
        if (f[i] >= f[j] && ni >= nj && (f[i] > f[j] || ni > nj)) {
            out[i] = f[i];
            out[j] = -inf;
        }
        else {
            out[i] = -inf;
        }
    }
    return out;
}

/// Best fitness per occupied cell.
inline std::map<std::size_t, double> elites_per_cell(const Vector& f, const Matrix& d, const Matrix& centroids)
{
    const auto cell = cells(d, centroids);
    std::map<std::size_t, double> best;
    for (std::size_t i = 0; i < cell.size(); ++i) {
        auto it = best.find(cell[i]);
        if (it == best.end() || f[static_cast<Eigen::Index>(i)] > it->second)
            best[cell[i]] = f[static_cast<Eigen::Index>(i)];
    }
    return best;
}

struct Projection {
    double qd_score = 0.;
    double coverage = 0.;
    std::size_t occupied = 0;
};

inline Projection project(const Vector& f, const Matrix& d, const Matrix& centroids, double offset)
{
    Projection p;
    if (f.size() == 0)
        return p;
    for (const auto& [cell, best] : elites_per_cell(f, d, centroids)) {
        p.qd_score += best + offset;
        ++p.occupied;
    }
    p.coverage = static_cast<double>(p.occupied) / static_cast<double>(centroids.rows());
    return p;
}

/// Two-sided exact Mann-Whitney p by enumerating every split of the pooled sample,
/// with U counted from pairwise comparisons.
inline double mann_whitney_p(const std::vector<double>& a, const std::vector<double>& b, double* u_out = nullptr)
{
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    const std::size_t n = a.size(), total = pooled.size();
    auto u_of = [&](std::uint32_t mask) {
        double u = 0.;
        for (std::size_t i = 0; i < total; ++i) {
            if (!(mask >> i & 1u))
                continue;
            for (std::size_t j = 0; j < total; ++j) {
                if (mask >> j & 1u)
                    continue;
                u += pooled[i] > pooled[j] ? 1. : (pooled[i] == pooled[j] ? 0.5 : 0.);
            }
        }
        return u;
    };
    const double center = 0.5 * static_cast<double>(a.size() * b.size());
    const double observed = u_of((1u << n) - 1u);
    if (u_out)
        *u_out = std::min(observed, 2. * center - observed);
    double hits = 0., count = 0.;
    for (std::uint32_t mask = 0; mask < (1u << total); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != n)
            continue;
        count += 1.;
        if (std::abs(u_of(mask) - center) >= std::abs(observed - center) - 1e-9)
            hits += 1.;
    }
    return hits / count;
}

/// Random population with deliberately frequent fitness ties and duplicated descriptors.
struct Instance {
    Vector fitness;
    Matrix descriptors;
};

inline Instance random_instance(std::mt19937_64& rng, Eigen::Index n, Eigen::Index dim)
{
    std::uniform_real_distribution<double> u(0., 1.);
    std::uniform_int_distribution<int> small(0, 5);
    Instance inst{Vector(n), Matrix(n, dim)};
    const bool discrete_fitness = u(rng) < 0.5;
    const bool grid_descriptors = u(rng) < 0.3;
    for (Eigen::Index i = 0; i < n; ++i) {
        inst.fitness[i] = discrete_fitness ? static_cast<double>(small(rng)) : u(rng) * 10. - 5.;
        for (Eigen::Index d = 0; d < dim; ++d)
            inst.descriptors(i, d) = grid_descriptors ? static_cast<double>(small(rng)) * 0.25 : u(rng);
    }
    return inst;
}

inline Matrix random_points(std::mt19937_64& rng, Eigen::Index n, Eigen::Index dim)
{
    std::uniform_real_distribution<double> u(0., 1.);
    Matrix m(n, dim);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index d = 0; d < dim; ++d)
            m(i, d) = u(rng);
    return m;
}

/// Same bits, with +inf == +inf and -inf == -inf.
inline bool identical(const Vector& a, const Vector& b)
{
    if (a.size() != b.size())
        return false;
    for (Eigen::Index i = 0; i < a.size(); ++i)
        if (!(a[i] == b[i]))
            return false;
    return true;
}

} // namespace oracle
