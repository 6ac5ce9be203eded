#include "linrep/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace linrep {

Grid::Grid(std::vector<Axis> axes) : axes_(std::move(axes)) {
    if (axes_.empty() || axes_.size() > 2) {
        throw std::invalid_argument("Grid: dimension must be 1 or 2, got " + std::to_string(axes_.size()));
    }
    for (const auto& ax : axes_) {
        if (!(ax.low < ax.high)) throw std::invalid_argument("Grid: axis requires low < high");
        if (ax.points < 2) throw std::invalid_argument("Grid: axis requires at least 2 points");
    }
    strides_.assign(axes_.size(), 1);
    for (std::size_t a = axes_.size(); a-- > 1;) strides_[a - 1] = strides_[a] * axes_[a].points;
    size_ = strides_[0] * axes_[0].points;
}

std::vector<Eigen::Index> Grid::shape() const {
    std::vector<Eigen::Index> s;
    for (const auto& ax : axes_) s.push_back(ax.points);
    return s;
}

Eigen::Index Grid::flatten(std::span<const Eigen::Index> multi) const {
    if (multi.size() != axes_.size()) throw std::invalid_argument("Grid::flatten: wrong arity");
    Eigen::Index flat = 0;
    for (std::size_t a = 0; a < axes_.size(); ++a) {
        if (multi[a] < 0 || multi[a] >= axes_[a].points) {
            throw std::out_of_range("Grid::flatten: index out of range");
        }
        flat += multi[a] * strides_[a];
    }
    return flat;
}

std::vector<Eigen::Index> Grid::unflatten(Eigen::Index flat) const {
    if (flat < 0 || flat >= size_) throw std::out_of_range("Grid::unflatten: index out of range");
    std::vector<Eigen::Index> multi(axes_.size());
    for (std::size_t a = 0; a < axes_.size(); ++a) {
        multi[a] = flat / strides_[a];
        flat %= strides_[a];
    }
    return multi;
}

double Grid::coordinate(Eigen::Index flat, std::size_t a) const {
    return axes_.at(a).node((flat / strides_[a]) % axes_[a].points);
}

Eigen::VectorXd Grid::point(Eigen::Index flat) const {
    Eigen::VectorXd x(static_cast<Eigen::Index>(axes_.size()));
    for (std::size_t a = 0; a < axes_.size(); ++a) x[static_cast<Eigen::Index>(a)] = coordinate(flat, a);
    return x;
}

Eigen::VectorXd Grid::coordinates(std::size_t a) const {
    Eigen::VectorXd c(size_);
    for (Eigen::Index k = 0; k < size_; ++k) c[k] = coordinate(k, a);
    return c;
}

bool Grid::contains(const Eigen::VectorXd& x) const {
    if (x.size() != static_cast<Eigen::Index>(axes_.size())) return false;
    for (std::size_t a = 0; a < axes_.size(); ++a) {
        const double v = x[static_cast<Eigen::Index>(a)];
        if (!(v >= axes_[a].low && v <= axes_[a].high)) return false;
    }
    return true;
}

Eigen::Index Grid::nearest_node(const Eigen::VectorXd& x) const {
    if (!contains(x)) throw std::invalid_argument("Grid::nearest_node: point outside the domain");
    std::vector<Eigen::Index> multi(axes_.size());
    for (std::size_t a = 0; a < axes_.size(); ++a) {
        const auto& ax = axes_[a];
        const double r = std::round((x[static_cast<Eigen::Index>(a)] - ax.low) / ax.spacing());
        multi[a] = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(r), 0, ax.points - 1);
    }
    return flatten(multi);
}

bool Grid::operator==(const Grid& other) const {
    if (axes_.size() != other.axes_.size()) return false;
    for (std::size_t a = 0; a < axes_.size(); ++a) {
        const auto& l = axes_[a];
        const auto& r = other.axes_[a];
        if (l.low != r.low || l.high != r.high || l.points != r.points) return false;
    }
    return true;
}

Grid make_grid(const std::vector<std::array<double, 2>>& bounds, const std::vector<Eigen::Index>& points) {
    if (bounds.size() != points.size()) {
        throw std::invalid_argument("make_grid: bounds and points must have the same length");
    }
    std::vector<Axis> axes;
    for (std::size_t a = 0; a < bounds.size(); ++a) {
        if (points[a] <= 0) throw std::invalid_argument("make_grid: point counts must be positive");
        axes.push_back(Axis{bounds[a][0], bounds[a][1], points[a]});
    }
    return Grid(std::move(axes));
}

}  // namespace linrep
