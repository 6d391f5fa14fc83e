#pragma once
// Uniform periodic grid on the d-torus [0,L)^d, d in {1,2,3}, with the same
// number of points per axis (power of two, >= 8). Flat storage is row-major
// with the last axis contiguous, matching the FFT layout. FFT index j on an
// axis carries the signed integer frequency (j < n/2 ? j : j - n); index n/2
// is the unpaired Nyquist mode, which admissible states keep at zero.

#include <array>
#include <cstddef>
#include <cstdint>

namespace enls {

inline constexpr double pi = 3.141592653589793238462643383279502884;

class TorusGrid {
public:
    TorusGrid() = default;
    TorusGrid(int dim, int points_per_axis, double length = 2.0 * pi);

    int dim() const { return dim_; }
    int n() const { return n_; }
    double length() const { return length_; }
    std::size_t total() const { return total_; }
    double dx() const { return length_ / n_; }
    double cell_volume() const { return cell_volume_; }
    double volume() const { return volume_; }

    int nyquist() const { return n_ / 2; }
    // physical wavenumber = k_scale() * signed integer frequency
    double k_scale() const { return 2.0 * pi / length_; }
    int freq(int j) const { return j < n_ / 2 ? j : j - n_; }

    std::array<int, 3> unflatten(std::size_t idx) const;
    std::size_t flatten(const std::array<int, 3>& j) const;
    // grid point coordinates in [0,L)^d (unused axes report 0)
    std::array<double, 3> coords(std::size_t idx) const;
    // signed integer frequencies at a spectral slot
    std::array<int, 3> modes_at(std::size_t idx) const;
    // |k_phys|^2 at a spectral slot
    double k_sq(std::size_t idx) const;
    bool is_nyquist(std::size_t idx) const;

    // true when |k_i| <= n/2 - 1 on every used axis and k_i = 0 on unused ones
    bool mode_on_grid(const std::array<int, 3>& k) const;
    // spectral flat index of an integer lattice mode; throws if off-grid
    std::size_t index_of_mode(const std::array<int, 3>& k) const;

    bool operator==(const TorusGrid& o) const {
        return dim_ == o.dim_ && n_ == o.n_ && length_ == o.length_;
    }
    bool operator!=(const TorusGrid& o) const { return !(*this == o); }

private:
    int dim_ = 0;
    int n_ = 0;
    double length_ = 0.0;
    std::size_t total_ = 0;
    double cell_volume_ = 0.0;
    double volume_ = 0.0;
};

} // namespace enls
