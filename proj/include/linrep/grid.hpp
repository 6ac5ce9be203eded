#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace linrep {

/// One axis of a uniform lattice: nodes at low + i * spacing for
/// i = 0 .. points-1, spacing = (high - low) / points. The upper bound is
/// not a node; on the periodic interpretation it coincides with node 0.
struct Axis {
    double low = 0.0;
    double high = 1.0;
    Eigen::Index points = 2;

    double spacing() const noexcept { return (high - low) / static_cast<double>(points); }
    double length() const noexcept { return high - low; }
    double node(Eigen::Index i) const noexcept { return low + static_cast<double>(i) * spacing(); }
};

/// Uniform lattice on an axis-aligned box in one or two dimensions.
/// Flattening is row-major: index = i * ny + j for node (x_i, y_j).
class Grid {
public:
    Grid() = default;
    explicit Grid(std::vector<Axis> axes);

    std::size_t dim() const noexcept { return axes_.size(); }
    const Axis& axis(std::size_t a) const { return axes_.at(a); }
    const std::vector<Axis>& axes() const noexcept { return axes_; }

    Eigen::Index size() const noexcept { return size_; }
    double spacing(std::size_t a) const { return axis(a).spacing(); }
    std::vector<Eigen::Index> shape() const;

    Eigen::Index flatten(std::span<const Eigen::Index> multi) const;
    std::vector<Eigen::Index> unflatten(Eigen::Index flat) const;

    /// Coordinate of a node along one axis, by flattened index.
    double coordinate(Eigen::Index flat, std::size_t a) const;
    Eigen::VectorXd point(Eigen::Index flat) const;

    /// Node coordinates along axis `a` for every flattened index.
    Eigen::VectorXd coordinates(std::size_t a) const;

    bool contains(const Eigen::VectorXd& x) const;

    /// Flattened index of the closest node. Throws std::invalid_argument if
    /// x lies outside [low, high] on any axis.
    Eigen::Index nearest_node(const Eigen::VectorXd& x) const;

    bool operator==(const Grid& other) const;

private:
    std::vector<Axis> axes_;
    std::vector<Eigen::Index> strides_;
    Eigen::Index size_ = 0;
};

/// Validated construction; rejects low >= high and fewer than two points.
Grid make_grid(const std::vector<std::array<double, 2>>& bounds,
               const std::vector<Eigen::Index>& points);

}  // namespace linrep
