#include <dnsqd/core.hpp>

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

namespace dnsqd {

namespace {

    Matrix take_rows(const Matrix& m, const std::vector<std::size_t>& indices)
    {
        Matrix out(static_cast<Eigen::Index>(indices.size()), m.cols());
        for (std::size_t r = 0; r < indices.size(); ++r)
            out.row(static_cast<Eigen::Index>(r)) = m.row(static_cast<Eigen::Index>(indices[r]));
        return out;
    }

    Matrix stack(const Matrix& top, const Matrix& bottom)
    {
        Matrix out(top.rows() + bottom.rows(), top.cols());
        out.topRows(top.rows()) = top;
        out.bottomRows(bottom.rows()) = bottom;
        return out;
    }

    Vector stack(const Vector& top, const Vector& bottom)
    {
        Vector out(top.size() + bottom.size());
        out.head(top.size()) = top;
        out.tail(bottom.size()) = bottom;
        return out;
    }

} // namespace

void Population::check_consistent() const
{
    const auto n = genomes.rows();
    if (fitness.size() != n || descriptors.rows() != n || competition_fitness.size() != n)
        throw std::invalid_argument("population arrays have inconsistent lengths");
    if (raw_descriptors.cols() > 0 && raw_descriptors.rows() != n)
        throw std::invalid_argument("population raw descriptors have inconsistent length");
}

void VariationParams::validate() const
{
    if (!(mutation_sigma >= 0.) || !(iso_sigma >= 0.))
        throw std::invalid_argument("variation sigmas must be non-negative");
    if (batch_size == 0)
        throw std::invalid_argument("batch size must be positive");
    if (!(parent_pool_fraction > 0. && parent_pool_fraction <= 1.))
        throw std::invalid_argument("parent_pool_fraction must lie in (0, 1]");
}

Matrix reproduce(const Population& pop, const VariationParams& params, std::mt19937_64& rng)
{
    params.validate();
    pop.check_consistent();
    const std::size_t n = pop.size();
    if (n < 2)
        throw std::invalid_argument("insufficient parents: population has " + std::to_string(n) + " individuals, need at least 2");

    const Vector& score = params.gate == ParentGate::competition_fitness ? pop.competition_fitness : pop.fitness;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[static_cast<Eigen::Index>(a)] > score[static_cast<Eigen::Index>(b)]; });

    std::size_t pool = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * params.parent_pool_fraction));
    pool = std::clamp<std::size_t>(pool, 1, n);
    const auto living = static_cast<std::size_t>(std::count_if(order.begin(), order.end(), [&](std::size_t i) { return pop.competition_fitness[static_cast<Eigen::Index>(i)] > -kInf; }));
    if (params.gate == ParentGate::competition_fitness && living > 0)
        pool = std::min(pool, living);

    const auto dim = pop.genomes.cols();
    Matrix offspring(static_cast<Eigen::Index>(params.batch_size), dim);
    std::uniform_int_distribution<std::size_t> pick(0, pool - 1);
    std::normal_distribution<double> gauss(0., 1.);
    for (Eigen::Index b = 0; b < offspring.rows(); ++b) {
        const auto first = static_cast<Eigen::Index>(order[pick(rng)]);
        const auto second = static_cast<Eigen::Index>(order[pick(rng)]);
        if (params.op == VariationOperator::iso_line) {
            const double line = params.mutation_sigma * gauss(rng);
            for (Eigen::Index d = 0; d < dim; ++d) {
                const double x = pop.genomes(first, d);
                const double y = pop.genomes(second, d);
                offspring(b, d) = x + params.iso_sigma * gauss(rng) + line * (y - x);
            }
        }
        else {
            for (Eigen::Index d = 0; d < dim; ++d)
                offspring(b, d) = pop.genomes(first, d) + params.iso_sigma * gauss(rng);
        }
    }
    offspring = offspring.cwiseMax(0.).cwiseMin(1.);
    return offspring;
}

Population concat(const Population& pop, const EvaluatedBatch& offspring)
{
    pop.check_consistent();
    const auto b = offspring.genomes.rows();
    if (offspring.fitness.size() != b || offspring.descriptors.rows() != b)
        throw std::invalid_argument("concat: offspring arrays have inconsistent lengths");
    if (b == 0)
        return pop;
    if (offspring.genomes.cols() != pop.genomes.cols() || offspring.descriptors.cols() != pop.descriptors.cols()
        || offspring.raw_descriptors.cols() != pop.raw_descriptors.cols())
        throw std::invalid_argument("concat: offspring dimensions do not match the population");

    Population out;
    out.genomes = stack(pop.genomes, offspring.genomes);
    out.fitness = stack(pop.fitness, offspring.fitness);
    out.descriptors = stack(pop.descriptors, offspring.descriptors);
    out.competition_fitness = stack(pop.competition_fitness, Vector::Constant(b, -kInf));
    if (pop.raw_descriptors.cols() > 0)
        out.raw_descriptors = stack(pop.raw_descriptors, offspring.raw_descriptors);
    return out;
}

EvaluatedBatch evaluate(const Matrix& genomes, const Task& task, const EvaluationOptions& options)
{
    if (genomes.rows() > 0 && static_cast<std::size_t>(genomes.cols()) != task.genome_dim)
        throw std::invalid_argument("evaluate: genome length " + std::to_string(genomes.cols()) + " does not match task genome dimension "
            + std::to_string(task.genome_dim));

    const auto n = static_cast<std::size_t>(genomes.rows());
    EvaluatedBatch out;
    out.genomes = genomes;
    out.fitness.resize(genomes.rows());
    out.descriptors.resize(genomes.rows(), static_cast<Eigen::Index>(task.descriptor_dim));

    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            Evaluation e = task.evaluate(row_of(genomes, r));
            if (e.descriptor.size() != task.descriptor_dim)
                throw std::logic_error("task '" + task.name + "' returned a descriptor of the wrong size");
            out.fitness[r] = e.fitness;
            for (std::size_t d = 0; d < task.descriptor_dim; ++d)
                out.descriptors(r, static_cast<Eigen::Index>(d)) = e.descriptor[d];
        }
    };

    const std::size_t threads = std::min(std::max<std::size_t>(options.threads, 1), std::max<std::size_t>(n, 1));
    if (threads <= 1) {
        work(0, n);
    }
    else {
        // Each worker owns a contiguous slice, so results do not depend on scheduling.
        std::vector<std::exception_ptr> errors(threads);
        std::vector<std::thread> pool;
        const std::size_t chunk = (n + threads - 1) / threads;
        for (std::size_t t = 0; t < threads; ++t) {
            const std::size_t begin = std::min(n, t * chunk), end = std::min(n, begin + chunk);
            pool.emplace_back([&, t, begin, end] {
                try {
                    work(begin, end);
                }
                catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        for (auto& th : pool)
            th.join();
        for (auto& e : errors)
            if (e)
                std::rethrow_exception(e);
    }

    for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        if (!std::isfinite(out.fitness[r]) || !out.descriptors.row(r).allFinite())
            throw NumericalError("task '" + task.name + "' produced a non-finite output for genome " + std::to_string(i));
    }
    if (task.learned)
        out.raw_descriptors = out.descriptors;
    return out;
}

std::vector<std::size_t> top_n_indices(const Vector& competition_fitness, std::size_t n)
{
    const auto size = static_cast<std::size_t>(competition_fitness.size());
    if (n > size)
        throw std::invalid_argument("select_top_n: cannot keep " + std::to_string(n) + " of " + std::to_string(size) + " individuals");
    for (Eigen::Index i = 0; i < competition_fitness.size(); ++i)
        if (std::isnan(competition_fitness[i]))
            throw NumericalError("select_top_n: NaN competition fitness at index " + std::to_string(i));

    std::vector<std::size_t> order(size);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return competition_fitness[static_cast<Eigen::Index>(a)] > competition_fitness[static_cast<Eigen::Index>(b)];
    });
    order.resize(n);
    std::sort(order.begin(), order.end());
    return order;
}

Population take(const Population& pop, const std::vector<std::size_t>& indices)
{
    Population out;
    out.genomes = take_rows(pop.genomes, indices);
    out.descriptors = take_rows(pop.descriptors, indices);
    out.fitness.resize(static_cast<Eigen::Index>(indices.size()));
    out.competition_fitness.resize(static_cast<Eigen::Index>(indices.size()));
    for (std::size_t r = 0; r < indices.size(); ++r) {
        out.fitness[static_cast<Eigen::Index>(r)] = pop.fitness[static_cast<Eigen::Index>(indices[r])];
        out.competition_fitness[static_cast<Eigen::Index>(r)] = pop.competition_fitness[static_cast<Eigen::Index>(indices[r])];
    }
    if (pop.raw_descriptors.cols() > 0)
        out.raw_descriptors = take_rows(pop.raw_descriptors, indices);
    return out;
}

Population select_top_n(const Population& pop, std::size_t n)
{
    pop.check_consistent();
    return take(pop, top_n_indices(pop.competition_fitness, n));
}

} // namespace dnsqd
