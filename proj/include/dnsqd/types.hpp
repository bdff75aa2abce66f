#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

namespace dnsqd {

// Row-major so that each individual's genome/descriptor is contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline std::span<const double> row_of(const Matrix& m, Eigen::Index i)
{
    return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

inline std::span<double> row_of(Matrix& m, Eigen::Index i)
{
    return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

/// Raised when an operation receives NaN or otherwise non-finite data that it
/// cannot process (task outputs, fitness values, descriptors).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace dnsqd
