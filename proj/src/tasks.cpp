#include <dnsqd/tasks.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dnsqd {

namespace {

    void check_genome(std::span<const double> genome, std::size_t expected, const char* who)
    {
        if (genome.size() != expected)
            throw std::invalid_argument(std::string(who) + ": genome has " + std::to_string(genome.size()) + " genes, expected " + std::to_string(expected));
    }

    // Moves one coordinate by `delta`, stopping at the arena border or the first wall face crossed.
    double move_axis(const MazeLayout& layout, double pos, double other, double delta, bool along_x)
    {
        double target = std::clamp(pos + delta, 0., 1.);
        for (const auto& w : layout.walls) {
            const double lo = along_x ? w.x0 : w.y0;
            const double hi = along_x ? w.x1 : w.y1;
            const double olo = along_x ? w.y0 : w.x0;
            const double ohi = along_x ? w.y1 : w.x1;
            if (!(other > olo && other < ohi))
                continue;
            if (delta > 0. && pos <= lo && target > lo)
                target = lo;
            else if (delta < 0. && pos >= hi && target < hi)
                target = hi;
        }
        return target;
    }

    std::vector<std::size_t> sample_steps(std::size_t steps, std::size_t n_samples)
    {
        // Step indices (1-based positions in the trajectory) sampled at regular intervals; the last is T.
        std::vector<std::size_t> idx(n_samples);
        for (std::size_t s = 0; s < n_samples; ++s)
            idx[s] = (s + 1) * steps / n_samples;
        return idx;
    }

} // namespace

Task arm_task(std::size_t n_joints)
{
    if (n_joints < 2)
        throw std::invalid_argument("arm_task: need at least 2 joints");
    Task task;
    task.name = "arm";
    task.genome_dim = n_joints;
    task.descriptor_dim = 2;
    task.descriptor_bounds = Box::unit(2);
    // Variance of values in [-pi, pi] is at most pi^2.
    task.fitness_offset = std::numbers::pi * std::numbers::pi;
    task.evaluate = [n_joints](std::span<const double> genome) {
        check_genome(genome, n_joints, "arm_task");
        const double link = 1. / static_cast<double>(n_joints);
        double mean = 0.;
        for (double g : genome)
            mean += (g - 0.5) * 2. * std::numbers::pi;
        mean /= static_cast<double>(n_joints);

        double var = 0., heading = 0., x = 0., y = 0.;
        for (double g : genome) {
            const double angle = (g - 0.5) * 2. * std::numbers::pi;
            var += (angle - mean) * (angle - mean);
            heading += angle;
            x += link * std::cos(heading);
            y += link * std::sin(heading);
        }
        // Rounding can push the variance a few ulps past its bound pi^2.
        var = std::min(var / static_cast<double>(n_joints), std::numbers::pi * std::numbers::pi);
        return Evaluation{-var, {(x + 1.) / 2., (y + 1.) / 2.}};
    };
    return task;
}

Task rastrigin_projection_task(std::size_t genome_dim)
{
    if (genome_dim < 2)
        throw std::invalid_argument("rastrigin_projection_task: need at least 2 genes");
    constexpr double half_width = 5.12;
    Task task;
    task.name = "rastrigin";
    task.genome_dim = genome_dim;
    task.descriptor_dim = 2;
    task.descriptor_bounds = Box::unit(2);
    // Each term x^2 - 10 cos(2 pi x) + 10 is bounded by 5.12^2 + 20.
    task.fitness_offset = static_cast<double>(genome_dim) * (half_width * half_width + 20.);
    task.evaluate = [genome_dim](std::span<const double> genome) {
        check_genome(genome, genome_dim, "rastrigin_projection_task");
        double value = 10. * static_cast<double>(genome_dim);
        for (double g : genome) {
            const double x = (g - 0.5) * 2. * half_width;
            value += x * x - 10. * std::cos(2. * std::numbers::pi * x);
        }
        return Evaluation{-value, {genome[0], genome[1]}};
    };
    return task;
}

void MazeLayout::validate() const
{
    if (steps == 0)
        throw std::invalid_argument("maze layout: step count must be positive");
    if (!(step_size > 0.) || !std::isfinite(step_size))
        throw std::invalid_argument("maze layout: step size must be positive");
    for (std::size_t i = 0; i < walls.size(); ++i) {
        const auto& w = walls[i];
        if (!(w.x0 < w.x1 && w.y0 < w.y1))
            throw std::invalid_argument("maze layout: wall " + std::to_string(i) + " is degenerate");
        if (w.x0 < 0. || w.y0 < 0. || w.x1 > 1. || w.y1 > 1.)
            throw std::invalid_argument("maze layout: wall " + std::to_string(i) + " leaves the unit arena");
    }
    if (!(start_x >= 0. && start_x <= 1. && start_y >= 0. && start_y <= 1.))
        throw std::invalid_argument("maze layout: start outside the arena");
    if (inside_wall(start_x, start_y))
        throw std::invalid_argument("maze layout: start lies inside a wall");
}

bool MazeLayout::inside_wall(double x, double y) const
{
    return std::any_of(walls.begin(), walls.end(), [&](const Wall& w) { return x > w.x0 && x < w.x1 && y > w.y0 && y < w.y1; });
}

double MazeLayout::blocked_fraction() const
{
    std::vector<double> xs{0., 1.}, ys{0., 1.};
    for (const auto& w : walls) {
        xs.insert(xs.end(), {w.x0, w.x1});
        ys.insert(ys.end(), {w.y0, w.y1});
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

    double area = 0.;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        for (std::size_t j = 0; j + 1 < ys.size(); ++j)
            if (inside_wall(0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])))
                area += (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j]);
    return area;
}

MazeLayout MazeLayout::blocks()
{
    MazeLayout layout;
    layout.walls = {
        {0.00, 0.25, 0.65, 0.40},
        {0.35, 0.55, 1.00, 0.70},
        {0.00, 0.75, 0.20, 1.00},
        {0.80, 0.00, 1.00, 0.20},
        {0.60, 0.80, 0.80, 1.00},
    };
    layout.start_x = 0.3;
    layout.start_y = 0.1;
    layout.steps = 50;
    layout.step_size = 0.05;
    return layout;
}

MazeLayout load_maze_layout(std::istream& in, std::size_t steps, double step_size)
{
    std::vector<std::string> rows;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (!line.empty())
            rows.push_back(line);
    }
    if (rows.empty())
        throw std::invalid_argument("maze file: empty grid");
    const std::size_t cols = rows.front().size();
    const double cw = 1. / static_cast<double>(cols);
    const double ch = 1. / static_cast<double>(rows.size());

    MazeLayout layout;
    layout.steps = steps;
    layout.step_size = step_size;
    bool have_start = false;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols)
            throw std::invalid_argument("maze file: row " + std::to_string(r) + " has a different width");
        const double y1 = 1. - static_cast<double>(r) * ch;
        const double y0 = 1. - static_cast<double>(r + 1) * ch;
        std::size_t c = 0;
        while (c < cols) {
            const char cell = rows[r][c];
            if (cell == '#') {
                std::size_t end = c;
                while (end < cols && rows[r][end] == '#')
                    ++end;
                layout.walls.push_back({static_cast<double>(c) * cw, y0, static_cast<double>(end) * cw, y1});
                c = end;
                continue;
            }
            if (cell == 'S') {
                if (have_start)
                    throw std::invalid_argument("maze file: more than one start cell");
                have_start = true;
                layout.start_x = (static_cast<double>(c) + 0.5) * cw;
                layout.start_y = 0.5 * (y0 + y1);
            }
            else if (cell != '.') {
                throw std::invalid_argument(std::string("maze file: unexpected character '") + cell + "'");
            }
            ++c;
        }
    }
    if (!have_start)
        throw std::invalid_argument("maze file: no start cell");
    layout.validate();
    return layout;
}

MazeLayout load_maze_layout(const std::string& path, std::size_t steps, double step_size)
{
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open maze file '" + path + "'");
    return load_maze_layout(in, steps, step_size);
}

std::vector<std::array<double, 2>> simulate_maze(const MazeLayout& layout, std::span<const double> genome)
{
    check_genome(genome, 2 * layout.steps, "maze_task");
    std::vector<std::array<double, 2>> path;
    path.reserve(layout.steps + 1);
    double x = layout.start_x, y = layout.start_y;
    path.push_back({x, y});
    for (std::size_t t = 0; t < layout.steps; ++t) {
        const double vx = 2. * genome[2 * t] - 1.;
        const double vy = 2. * genome[2 * t + 1] - 1.;
        x = move_axis(layout, x, y, layout.step_size * vx, true);
        y = move_axis(layout, y, x, layout.step_size * vy, false);
        path.push_back({x, y});
    }
    return path;
}

namespace {

    double control_energy(std::span<const double> genome)
    {
        double energy = 0.;
        for (double g : genome) {
            const double v = 2. * g - 1.;
            energy += v * v;
        }
        return energy;
    }

    EvaluationFn maze_evaluator(const MazeLayout& layout, std::size_t n_samples, MazeDescriptor mode)
    {
        return [layout, mode, samples = sample_steps(layout.steps, n_samples)](std::span<const double> genome) {
            const auto path = simulate_maze(layout, genome);
            Evaluation eval;
            eval.fitness = -control_energy(genome);
            if (mode == MazeDescriptor::final_position) {
                eval.descriptor = {path.back()[0], path.back()[1]};
            }
            else {
                eval.descriptor.reserve(2 * samples.size());
                for (std::size_t s : samples) {
                    eval.descriptor.push_back(path[s][0]);
                    eval.descriptor.push_back(path[s][1]);
                }
            }
            return eval;
        };
    }

} // namespace

Task maze_task(const MazeLayout& layout, std::size_t n_samples, MazeDescriptor mode)
{
    layout.validate();
    if (mode == MazeDescriptor::trajectory && (n_samples == 0 || n_samples > layout.steps))
        throw std::invalid_argument("maze_task: n_samples must lie in [1, steps]");
    Task task;
    task.name = "maze";
    task.genome_dim = 2 * layout.steps;
    task.descriptor_dim = mode == MazeDescriptor::final_position ? 2 : 2 * n_samples;
    task.descriptor_bounds = Box::unit(static_cast<Eigen::Index>(task.descriptor_dim));
    // Each command has squared norm at most 2.
    task.fitness_offset = 2. * static_cast<double>(layout.steps);
    task.evaluate = maze_evaluator(layout, n_samples, mode);
    return task;
}

Task maze_pca_task(const MazeLayout& layout, std::size_t n_samples, LearnedDescriptor learned)
{
    Task task = maze_task(layout, n_samples, MazeDescriptor::trajectory);
    if (learned.latent_dim == 0 || learned.latent_dim > task.descriptor_dim)
        throw std::invalid_argument("maze_pca_task: latent dimension must lie in [1, 2 * n_samples]");
    if (learned.refit_period == 0)
        throw std::invalid_argument("maze_pca_task: refit period must be positive");
    task.name = "maze_pca";
    task.descriptor_bounds.reset();
    task.learned = learned;
    return task;
}

PcaDescriptorState pca_refit(const PcaDescriptorState& state, const Matrix& raw)
{
    if (state.latent_dim == 0)
        throw std::invalid_argument("pca_refit: latent dimension must be positive");
    if (raw.rows() < static_cast<Eigen::Index>(state.latent_dim))
        throw std::invalid_argument("pca_refit: buffer holds fewer trajectories than latent dimensions");
    if (raw.cols() < static_cast<Eigen::Index>(state.latent_dim))
        throw std::invalid_argument("pca_refit: latent dimension exceeds raw dimension");

    PcaDescriptorState next = state;
    next.buffer = raw;
    next.mean = raw.colwise().mean().transpose();
    const Eigen::MatrixXd centered = raw.rowwise() - next.mean.transpose();
    const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(raw.rows());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success)
        throw NumericalError("pca_refit: eigen decomposition failed");
    const auto& values = solver.eigenvalues();
    const auto& vectors = solver.eigenvectors();
    const Eigen::Index raw_dim = raw.cols();
    const double scale = std::max(1., values[raw_dim - 1]);

    next.directions.resize(static_cast<Eigen::Index>(state.latent_dim), raw_dim);
    next.rank_deficient = false;
    for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(state.latent_dim); ++c) {
        // Eigenvalues come in ascending order.
        const Eigen::Index src = raw_dim - 1 - c;
        Eigen::VectorXd dir = vectors.col(src);
        Eigen::Index pivot = 0;
        dir.cwiseAbs().maxCoeff(&pivot);
        if (dir[pivot] < 0.)
            dir = -dir;
        next.directions.row(c) = dir.transpose();
        if (values[src] <= 1e-12 * scale)
            next.rank_deficient = true;
    }
    return next;
}

Matrix pca_encode(const PcaDescriptorState& state, const Matrix& raw)
{
    if (raw.cols() != state.directions.cols())
        throw std::invalid_argument("pca_encode: raw dimension does not match the fitted projection");
    Matrix out = (raw.rowwise() - state.mean.transpose()) * state.directions.transpose();
    return out;
}

} // namespace dnsqd
