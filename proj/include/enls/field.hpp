#pragma once
// Complex scalar state on a TorusGrid, tagged with its current representation.
// Spectral coefficients are normalized against the orthonormal plane-wave
// basis e_k(x) = e^{ik.x}/sqrt(V):
//
//   hat f_k = <e_k, f> = cell_volume * sum_x f(x) e^{-ik.x} / sqrt(V),
//
// so Plancherel holds with unit weights (integral |f|^2 = sum_k |hat f_k|^2)
// and sum_k (1+|k|^2)^s |hat f_k|^2 is the squared H^s norm. The Nyquist row
// carries no energy in admissible states; synthetic-data constructors zero it.

#include "enls/grid.hpp"
#include "enls/rng.hpp"

#include <complex>
#include <vector>

namespace enls {

enum class Space { physical, spectral };

class Field {
public:
    Field() = default;
    Field(const TorusGrid& grid, Space space)
        : grid_(grid), space_(space), data_(grid.total(), std::complex<double>(0.0, 0.0)) {}
    static Field from_values(const TorusGrid& grid, Space space,
                             std::vector<std::complex<double>> values);

    const TorusGrid& grid() const { return grid_; }
    Space space() const { return space_; }
    std::size_t size() const { return data_.size(); }
    std::vector<std::complex<double>>& data() { return data_; }
    const std::vector<std::complex<double>>& data() const { return data_; }
    std::complex<double>& operator[](std::size_t i) { return data_[i]; }
    const std::complex<double>& operator[](std::size_t i) const { return data_[i]; }

    // amplitude * e^{ik.x} sampled on the grid (physical space)
    static Field plane_wave(const TorusGrid& grid, const std::array<int, 3>& k,
                            std::complex<double> amplitude);
    // periodized real Gaussian bump amplitude*exp(-|x-c|^2/(2 width^2)),
    // Nyquist-cleaned (physical space)
    static Field gaussian_bump(const TorusGrid& grid, const std::array<double, 3>& center,
                               double width, double amplitude);
    // random band-limited field: coefficient g_k/(1+|k|^2)^decay on |k_i| <= kmax,
    // Nyquist row zero (spectral space)
    static Field random_bandlimited(const TorusGrid& grid, GaussianStream& stream, int kmax,
                                    double decay = 1.0);

private:
    TorusGrid grid_;
    Space space_ = Space::physical;
    std::vector<std::complex<double>> data_;
};

Field fft(const Field& f);              // physical -> spectral
Field ifft(const Field& f);             // spectral -> physical
Field to_space(const Field& f, Space s);

// integral |f|^2 (cell_volume-weighted in physical space, Plancherel-equal in spectral)
double l2_norm_sq(const Field& f);
// <a,b>, conjugate-linear in a; both fields in the same space
std::complex<double> inner(const Field& a, const Field& b);
// sum_k (1+|k|^2)^s |hat f_k|^2
double sobolev_norm_sq(const Field& f, double s);
// free flow with mass shift: multiplies mode k by e^{-it(|k|^2 + mass_shift)};
// returns a field in the same space as the input
Field apply_semigroup(const Field& f, double t, double mass_shift);
// d/dx_axis via spectral multiplication by i k_axis (same space as input)
Field gradient_component(const Field& f, int axis);

Field zero_nyquist(Field f);                   // spectral in, spectral out
bool nyquist_clean(const Field& f, double tol = 0.0);
// 2/3-rule dealias filter: zero every coefficient with |freq| > n/3 on any axis
Field low_pass_two_thirds(Field f);            // spectral in, spectral out

} // namespace enls
