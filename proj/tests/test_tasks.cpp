#include <doctest.h>

#include <dnsqd/tasks.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace dnsqd;

namespace {

std::vector<double> genome_of(std::size_t dim, double value)
{
    return std::vector<double>(dim, value);
}

// Commands (cx, cy) in [-1,1] repeated for every step, as genes in [0,1].
std::vector<double> constant_commands(std::size_t steps, double cx, double cy)
{
    std::vector<double> g;
    for (std::size_t t = 0; t < steps; ++t) {
        g.push_back((cx + 1.) / 2.);
        g.push_back((cy + 1.) / 2.);
    }
    return g;
}

MazeLayout single_wall()
{
    MazeLayout layout;
    layout.walls = {{0.5, 0., 0.6, 1.}};
    layout.start_x = 0.25;
    layout.start_y = 0.5;
    return layout;
}

} // namespace

TEST_CASE("arm examples")
{
    const Task task = arm_task(4);
    CHECK(task.genome_dim == 4);
    CHECK(task.descriptor_dim == 2);
    REQUIRE(task.descriptor_bounds);

    // All angles zero: the arm is stretched along +x.
    const auto straight = task.evaluate(genome_of(4, 0.5));
    CHECK(straight.fitness == doctest::Approx(0.));
    CHECK(straight.descriptor[0] == doctest::Approx(1.));
    CHECK(straight.descriptor[1] == doctest::Approx(0.5));

    // First joint at pi/2, the rest straight: tip at (0, 1).
    std::vector<double> g = genome_of(4, 0.5);
    g[0] = 0.75;
    const auto up = task.evaluate(g);
    CHECK(up.descriptor[0] == doctest::Approx(0.5));
    CHECK(up.descriptor[1] == doctest::Approx(1.));
    CHECK(up.fitness < 0.);

    CHECK_THROWS_AS(arm_task(1), std::invalid_argument);
}

TEST_CASE("arm outputs stay within bounds and above the offset")
{
    const Task task = arm_task(8);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0., 1.);
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<double> g(8);
        for (double& x : g)
            x = trial % 10 == 0 ? std::round(u(rng)) : u(rng);
        const auto e = task.evaluate(g);
        CHECK(std::isfinite(e.fitness));
        CHECK(e.fitness + task.fitness_offset >= 0.);
        for (double d : e.descriptor) {
            CHECK(d >= -1e-12);
            CHECK(d <= 1. + 1e-12);
        }
    }
}

TEST_CASE("rastrigin projection")
{
    const Task task = rastrigin_projection_task(5);
    const auto centre = task.evaluate(genome_of(5, 0.5));
    CHECK(centre.fitness == doctest::Approx(0.));
    CHECK(centre.descriptor == std::vector<double>{0.5, 0.5});

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0., 1.);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> g(5);
        for (double& x : g)
            x = u(rng);
        const auto e = task.evaluate(g);
        CHECK(e.descriptor[0] == g[0]);
        CHECK(e.descriptor[1] == g[1]);
        CHECK(e.fitness <= 0.);
        CHECK(e.fitness + task.fitness_offset >= 0.);
    }
    CHECK_THROWS_AS(rastrigin_projection_task(1), std::invalid_argument);
}

TEST_CASE("maze: zero commands keep the robot at the start")
{
    const MazeLayout layout = MazeLayout::blocks();
    const Task task = maze_task(layout, 5, MazeDescriptor::trajectory);
    CHECK(task.genome_dim == 2 * layout.steps);
    CHECK(task.descriptor_dim == 10);
    const auto e = task.evaluate(genome_of(task.genome_dim, 0.5));
    CHECK(e.fitness == 0.);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(e.descriptor[2 * i] == layout.start_x);
        CHECK(e.descriptor[2 * i + 1] == layout.start_y);
    }
}

TEST_CASE("maze: a full-height wall stops the robot at its face")
{
    const MazeLayout layout = single_wall();
    const auto path = simulate_maze(layout, constant_commands(layout.steps, 1., 0.));
    CHECK(path.size() == layout.steps + 1);
    for (const auto& p : path)
        CHECK(p[0] <= 0.5);
    CHECK(path.back()[0] == doctest::Approx(0.5));

    const Task task = maze_task(layout, 1, MazeDescriptor::final_position);
    const auto e = task.evaluate(constant_commands(layout.steps, 1., 0.));
    CHECK(e.descriptor[0] <= 0.5);
    CHECK(e.fitness == doctest::Approx(-static_cast<double>(layout.steps)));
}

TEST_CASE("maze: n_samples equal to the step count records every step")
{
    MazeLayout layout = single_wall();
    layout.steps = 12;
    const Task task = maze_task(layout, 12, MazeDescriptor::trajectory);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0., 1.);
    std::vector<double> g(24);
    for (double& x : g)
        x = u(rng);
    const auto path = simulate_maze(layout, g);
    const auto e = task.evaluate(g);
    REQUIRE(e.descriptor.size() == 24);
    for (std::size_t t = 0; t < 12; ++t) {
        CHECK(e.descriptor[2 * t] == path[t + 1][0]);
        CHECK(e.descriptor[2 * t + 1] == path[t + 1][1]);
    }
}

TEST_CASE("maze: layout validation")
{
    MazeLayout layout = single_wall();
    layout.start_x = 0.55;
    CHECK_THROWS_AS(layout.validate(), std::invalid_argument);
    CHECK_THROWS_AS(maze_task(layout, 2, MazeDescriptor::final_position), std::invalid_argument);

    layout = single_wall();
    layout.walls.push_back({0.2, 0.2, 0.2, 0.4});
    CHECK_THROWS_AS(layout.validate(), std::invalid_argument);

    layout = single_wall();
    layout.walls.push_back({0.9, 0.9, 1.2, 1.});
    CHECK_THROWS_AS(layout.validate(), std::invalid_argument);

    layout = single_wall();
    layout.steps = 0;
    CHECK_THROWS_AS(layout.validate(), std::invalid_argument);

    CHECK_THROWS_AS(maze_task(single_wall(), 0, MazeDescriptor::trajectory), std::invalid_argument);
    CHECK(MazeLayout::blocks().blocked_fraction() >= 0.3);
    CHECK(single_wall().blocked_fraction() == doctest::Approx(0.1));
}

TEST_CASE("maze: text grids")
{
    std::istringstream in("##..\n#...\n..S.\n....\n");
    const MazeLayout layout = load_maze_layout(in, 20, 0.05);
    CHECK(layout.blocked_fraction() == doctest::Approx(3. / 16.));
    CHECK(layout.start_x == doctest::Approx(0.625));
    CHECK(layout.start_y == doctest::Approx(0.375));
    CHECK(layout.inside_wall(0.1, 0.9));
    CHECK_FALSE(layout.inside_wall(0.1, 0.4));

    std::istringstream no_start("...\n.#.\n");
    CHECK_THROWS_AS(load_maze_layout(no_start, 20, 0.05), std::invalid_argument);
    std::istringstream ragged("S..\n..\n");
    CHECK_THROWS_AS(load_maze_layout(ragged, 20, 0.05), std::invalid_argument);
}

TEST_CASE("maze: collision soundness over random layouts and genomes")
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0., 1.);
    int layouts = 0;
    while (layouts < 200) {
        MazeLayout layout;
        layout.steps = 30;
        layout.step_size = 0.02 + 0.1 * u(rng);
        const int walls = 1 + static_cast<int>(u(rng) * 5);
        for (int w = 0; w < walls; ++w) {
            const double x0 = u(rng), y0 = u(rng);
            layout.walls.push_back({x0, y0, std::min(1., x0 + 0.05 + 0.3 * u(rng)), std::min(1., y0 + 0.05 + 0.3 * u(rng))});
        }
        layout.start_x = u(rng);
        layout.start_y = u(rng);
        if (layout.inside_wall(layout.start_x, layout.start_y))
            continue;
        ++layouts;
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> g(60);
            for (double& x : g)
                x = trial % 4 == 0 ? std::round(u(rng)) : u(rng);
            for (const auto& p : simulate_maze(layout, g)) {
                CHECK(p[0] >= 0.);
                CHECK(p[0] <= 1.);
                CHECK(p[1] >= 0.);
                CHECK(p[1] <= 1.);
                CHECK_FALSE(layout.inside_wall(p[0], p[1]));
            }
        }
    }
}

TEST_CASE("maze: outputs are finite and the offset keeps scores non-negative")
{
    const MazeLayout layout = MazeLayout::blocks();
    const Task task = maze_task(layout, 10, MazeDescriptor::trajectory);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0., 1.);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> g(task.genome_dim);
        for (double& x : g)
            x = trial % 5 == 0 ? std::round(u(rng)) : u(rng);
        const auto e = task.evaluate(g);
        CHECK(std::isfinite(e.fitness));
        CHECK(e.fitness + task.fitness_offset >= 0.);
        CHECK(e.descriptor.size() == task.descriptor_dim);
        for (double d : e.descriptor)
            CHECK(std::isfinite(d));
    }
}

TEST_CASE("pca: identical trajectories encode to the same point")
{
    Matrix raw(6, 4);
    for (Eigen::Index i = 0; i < 6; ++i)
        raw.row(i) << 0.1, 0.2, 0.3, 0.4;
    const auto state = pca_refit(PcaDescriptorState{2, 50, {}, {}, {}, false}, raw);
    CHECK(state.rank_deficient);
    const Matrix enc = pca_encode(state, raw);
    for (Eigen::Index i = 1; i < 6; ++i)
        CHECK((enc.row(i) - enc.row(0)).norm() == 0.);
    const Matrix gram = state.directions * state.directions.transpose();
    CHECK((gram - Matrix::Identity(2, 2)).norm() < 1e-8);
}

TEST_CASE("pca: collinear data gives the line direction")
{
    std::mt19937_64 rng(6);
    std::normal_distribution<double> n(0., 1.);
    Matrix raw(40, 2);
    for (Eigen::Index i = 0; i < 40; ++i) {
        const double t = n(rng);
        raw.row(i) << 1. + 3. * t, -2. + 4. * t;
    }
    const auto state = pca_refit(PcaDescriptorState{1, 50, {}, {}, {}, false}, raw);
    const double cosine = std::abs(state.directions.row(0).dot(Eigen::RowVector2d(0.6, 0.8)));
    CHECK(cosine == doctest::Approx(1.).epsilon(1e-6));
}

TEST_CASE("pca: orthonormal directions and idempotent refits")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0., 1.);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix raw(30, 12);
        for (Eigen::Index i = 0; i < raw.rows(); ++i)
            for (Eigen::Index j = 0; j < raw.cols(); ++j)
                raw(i, j) = u(rng);
        const auto first = pca_refit(PcaDescriptorState{5, 50, {}, {}, {}, false}, raw);
        const Matrix gram = first.directions * first.directions.transpose();
        CHECK((gram - Matrix::Identity(5, 5)).norm() < 1e-8);
        const auto second = pca_refit(first, first.buffer);
        CHECK(pca_encode(first, raw) == pca_encode(second, raw));
    }

    Matrix small(3, 4);
    small.setRandom();
    CHECK_THROWS_AS(pca_refit(PcaDescriptorState{5, 50, {}, {}, {}, false}, small), std::invalid_argument);
}

TEST_CASE("maze_pca task advertises a learned descriptor")
{
    const Task task = maze_pca_task(MazeLayout::blocks(), 10, LearnedDescriptor{4, 25});
    CHECK(task.learned);
    CHECK_FALSE(task.descriptor_bounds);
    CHECK(task.descriptor_dim == 20);
    CHECK(task.competition_descriptor_dim() == 4);
}
