#pragma once

#include <dnsqd/geometry.hpp>
#include <dnsqd/types.hpp>

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dnsqd {

struct Evaluation {
    double fitness = 0.;
    std::vector<double> descriptor;
};

using EvaluationFn = std::function<Evaluation(std::span<const double>)>;

/// Descriptors that are learned online: the task emits a raw descriptor which the
/// generation loop encodes with a periodically refit PCA projection.
struct LearnedDescriptor {
    std::size_t latent_dim = 10;
    std::size_t refit_period = 50;
};

/// Benchmark task. Genomes live in [0,1]^genome_dim; the task rescales internally.
/// `evaluate` must be pure and thread-safe.
struct Task {
    std::string name;
    std::size_t genome_dim = 0;
    // Dimension of the descriptor returned by `evaluate` (the raw one when `learned` is set).
    std::size_t descriptor_dim = 0;
    std::optional<Box> descriptor_bounds;
    // Added to every fitness when scoring so that QD-score contributions are non-negative.
    double fitness_offset = 0.;
    EvaluationFn evaluate;
    std::optional<LearnedDescriptor> learned;

    /// Dimension of the descriptors that competition functions see.
    std::size_t competition_descriptor_dim() const { return learned ? learned->latent_dim : descriptor_dim; }
};

/// Planar arm with `n_joints` revolute joints and total length 1. Fitness is minus the
/// variance of the joint angles, the descriptor is the tip position mapped to [0,1]^2.
Task arm_task(std::size_t n_joints);

/// Negated Rastrigin on [-5.12, 5.12]^n with the first two genes as descriptor.
Task rastrigin_projection_task(std::size_t genome_dim);

struct Wall {
    double x0, y0, x1, y1;
};

/// Point-robot arena: the unit square with axis-aligned rectangular walls.
struct MazeLayout {
    std::vector<Wall> walls;
    double start_x = 0.5;
    double start_y = 0.5;
    std::size_t steps = 50;
    double step_size = 0.05;

    /// Throws std::invalid_argument on walls outside the arena, degenerate walls, a
    /// start inside a wall, or zero steps.
    void validate() const;

    /// Fraction of the arena covered by the union of the walls.
    double blocked_fraction() const;

    /// True when (x, y) lies strictly inside some wall.
    bool inside_wall(double x, double y) const;

    /// Built-in layout with four blocks covering about a third of the arena.
    static MazeLayout blocks();
};

/// Reads a text grid: '#' wall cell, '.' free cell, 'S' start cell (exactly one).
/// The grid is stretched over the unit square; the first line is the top row.
MazeLayout load_maze_layout(std::istream& in, std::size_t steps, double step_size);
MazeLayout load_maze_layout(const std::string& path, std::size_t steps, double step_size);

/// Positions of the robot: start followed by the position after each of the T steps.
std::vector<std::array<double, 2>> simulate_maze(const MazeLayout& layout, std::span<const double> genome);

enum class MazeDescriptor { final_position, trajectory };

/// Maze navigation task. Genome has 2*T genes (velocity commands in [-1,1]^2 after
/// rescaling), fitness is minus the control energy.
Task maze_task(const MazeLayout& layout, std::size_t n_samples, MazeDescriptor mode);

/// Maze task whose descriptor is a PCA embedding of the sampled trajectory.
Task maze_pca_task(const MazeLayout& layout, std::size_t n_samples, LearnedDescriptor learned);

struct PcaDescriptorState {
    std::size_t latent_dim = 10;
    std::size_t refit_period = 50;
    Vector mean;
    // latent_dim x raw_dim, rows orthonormal.
    Matrix directions;
    Matrix buffer;
    bool rank_deficient = false;
};

/// Refits mean and principal directions on `raw` (one trajectory per row), which also
/// becomes the new buffer.
PcaDescriptorState pca_refit(const PcaDescriptorState& state, const Matrix& raw);

/// Projects raw descriptors on the current principal directions.
Matrix pca_encode(const PcaDescriptorState& state, const Matrix& raw);

} // namespace dnsqd
