#include "enls/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace enls {

namespace {
bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
}

TorusGrid::TorusGrid(int dim, int points_per_axis, double length)
    : dim_(dim), n_(points_per_axis), length_(length) {
    if (dim < 1 || dim > 3)
        throw std::invalid_argument("TorusGrid: dim must be 1, 2 or 3, got " + std::to_string(dim));
    if (!power_of_two(points_per_axis) || points_per_axis < 8)
        throw std::invalid_argument("TorusGrid: points per axis must be a power of two >= 8, got " +
                                    std::to_string(points_per_axis));
    if (!(length > 0.0) || !std::isfinite(length))
        throw std::invalid_argument("TorusGrid: box length must be positive and finite");
    total_ = 1;
    for (int a = 0; a < dim_; ++a) total_ *= static_cast<std::size_t>(n_);
    volume_ = std::pow(length_, dim_);
    cell_volume_ = volume_ / static_cast<double>(total_);
}

std::array<int, 3> TorusGrid::unflatten(std::size_t idx) const {
    std::array<int, 3> j{0, 0, 0};
    for (int a = dim_ - 1; a >= 0; --a) {
        j[a] = static_cast<int>(idx % static_cast<std::size_t>(n_));
        idx /= static_cast<std::size_t>(n_);
    }
    return j;
}

std::size_t TorusGrid::flatten(const std::array<int, 3>& j) const {
    std::size_t idx = 0;
    for (int a = 0; a < dim_; ++a)
        idx = idx * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j[a]);
    return idx;
}

std::array<double, 3> TorusGrid::coords(std::size_t idx) const {
    auto j = unflatten(idx);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int a = 0; a < dim_; ++a) x[a] = dx() * j[a];
    return x;
}

std::array<int, 3> TorusGrid::modes_at(std::size_t idx) const {
    auto j = unflatten(idx);
    std::array<int, 3> k{0, 0, 0};
    for (int a = 0; a < dim_; ++a) k[a] = freq(j[a]);
    return k;
}

double TorusGrid::k_sq(std::size_t idx) const {
    auto k = modes_at(idx);
    double s = 0.0;
    for (int a = 0; a < dim_; ++a) {
        double kp = k_scale() * k[a];
        s += kp * kp;
    }
    return s;
}

bool TorusGrid::is_nyquist(std::size_t idx) const {
    auto j = unflatten(idx);
    for (int a = 0; a < dim_; ++a)
        if (j[a] == n_ / 2) return true;
    return false;
}

bool TorusGrid::mode_on_grid(const std::array<int, 3>& k) const {
    for (int a = 0; a < dim_; ++a)
        if (k[a] < -(n_ / 2 - 1) || k[a] > n_ / 2 - 1) return false;
    for (int a = dim_; a < 3; ++a)
        if (k[a] != 0) return false;
    return true;
}

std::size_t TorusGrid::index_of_mode(const std::array<int, 3>& k) const {
    if (!mode_on_grid(k))
        throw std::invalid_argument("TorusGrid: mode outside the alias-free lattice");
    std::array<int, 3> j{0, 0, 0};
    for (int a = 0; a < dim_; ++a) j[a] = k[a] >= 0 ? k[a] : k[a] + n_;
    return flatten(j);
}

} // namespace enls
