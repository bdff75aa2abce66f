#include <doctest.h>

#include <dnsqd/metrics.hpp>

#include "oracles.hpp"

#include <random>

using namespace dnsqd;

namespace {

CentroidSet grid_1d(std::initializer_list<double> xs)
{
    Matrix m(static_cast<Eigen::Index>(xs.size()), 1);
    Eigen::Index i = 0;
    for (double x : xs)
        m(i++, 0) = x;
    return {m, CentroidProvenance::random, 0};
}

} // namespace

TEST_CASE("projection examples")
{
    const CentroidSet grid = grid_1d({0., 1., 2., 3.});

    const auto empty = project_and_score(Vector(0), Matrix(0, 1), grid, 5.);
    CHECK(empty.qd_score == 0.);
    CHECK(empty.coverage == 0.);
    CHECK_FALSE(empty.max_fitness);

    Matrix d(2, 1);
    d << 0., 1.;
    auto s = project_and_score(Eigen::Vector2d(1., 2.), d, grid, 0.);
    CHECK(s.qd_score == 3.);
    CHECK(s.coverage == 2. / 4.);
    CHECK(*s.max_fitness == 2.);

    d << 0.9, 1.1;
    s = project_and_score(Eigen::Vector2d(1., 2.), d, grid, 10.);
    CHECK(s.qd_score == 12.);
    CHECK(s.occupied_cells == 1);

    d << 0., 1.;
    CHECK_THROWS_AS(project_and_score(Eigen::Vector2d(-11., 2.), d, grid, 10.), std::invalid_argument);
    CHECK_THROWS_AS(project_and_score(Eigen::Vector2d(1., 2.), Matrix::Zero(2, 2), grid, 10.), std::invalid_argument);
}

TEST_CASE("projection of a population ignores eliminated individuals")
{
    Population pop;
    pop.genomes = Matrix::Zero(3, 1);
    pop.fitness = Eigen::Vector3d(1., 2., 3.);
    pop.descriptors = Matrix(3, 1);
    pop.descriptors << 0., 1., 2.;
    pop.competition_fitness = Eigen::Vector3d(1., -kInf, 3.);
    const auto s = project_and_score(pop, grid_1d({0., 1., 2.}), 0.);
    CHECK(s.qd_score == 4.);
    CHECK(s.occupied_cells == 2);
}

TEST_CASE("projection agrees with the brute-force oracle")
{
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> n_dist(0, 300), m_dist(1, 128), d_dist(1, 4);
    for (int trial = 0; trial < 100; ++trial) {
        const auto dim = d_dist(rng);
        const auto inst = oracle::random_instance(rng, n_dist(rng), dim);
        const CentroidSet grid{oracle::random_points(rng, m_dist(rng), dim), CentroidProvenance::random, 0};
        const auto got = project_and_score(inst.fitness, inst.descriptors, grid, 6.);
        const auto want = oracle::project(inst.fitness, inst.descriptors, grid.points, 6.);
        CHECK(got.qd_score == want.qd_score);
        CHECK(got.coverage == want.coverage);
        CHECK(got.occupied_cells == want.occupied);
        CHECK(got.coverage <= static_cast<double>(std::min<Eigen::Index>(inst.fitness.size(), grid.points.rows())) / static_cast<double>(grid.points.rows()));
    }
}

TEST_CASE("landing in an empty cell raises both qd score and coverage")
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0., 1.);
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto inst = oracle::random_instance(rng, 20, 2);
        const CentroidSet grid{oracle::random_points(rng, 64, 2), CentroidProvenance::random, 0};
        const auto before = project_and_score(inst.fitness, inst.descriptors, grid, 6.);
        const auto occupied = oracle::cells(inst.descriptors, grid.points);
        Matrix extra(1, 2);
        extra << u(rng), u(rng);
        const auto cell = oracle::cells(extra, grid.points)[0];
        if (std::find(occupied.begin(), occupied.end(), cell) != occupied.end())
            continue;
        Vector f(21);
        f << inst.fitness, -5.;
        Matrix d(21, 2);
        d << inst.descriptors, extra;
        const auto after = project_and_score(f, d, grid, 6.);
        CHECK(after.qd_score > before.qd_score);
        CHECK(after.coverage > before.coverage);
        ++checked;
    }
    CHECK(checked > 0);
}

TEST_CASE("metric grids")
{
    const Task arm = arm_task(4);
    const auto a = make_metric_grid(arm, 100, 7);
    const auto b = make_metric_grid(arm, 100, 7);
    CHECK(a.points == b.points);
    CHECK(a.points.minCoeff() >= 0.);
    CHECK(a.points.maxCoeff() <= 1.);

    const auto single = make_metric_grid(arm, 1, 3);
    std::mt19937_64 rng(3);
    const auto inst = oracle::random_instance(rng, 10, 2);
    const double cov = project_and_score(inst.fitness, inst.descriptors, single, 6.).coverage;
    CHECK((cov == 0. || cov == 1.));

    const Task pca = maze_pca_task(MazeLayout::blocks(), 10, LearnedDescriptor{2, 10});
    CHECK_THROWS_AS(make_metric_grid(pca, 16, 1), std::invalid_argument);
    Matrix sample = oracle::random_points(rng, 50, 2) * 2.;
    const auto grid = make_metric_grid(pca, 64, 1, &sample);
    CHECK(grid.provenance == CentroidProvenance::data_driven);
    CHECK(grid.points.minCoeff() >= 0.);
    CHECK(grid.points.maxCoeff() <= 2.);

    CHECK_THROWS_AS(make_metric_grid(arm, 0, 1), std::invalid_argument);
}
