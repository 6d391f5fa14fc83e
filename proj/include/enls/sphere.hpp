#pragma once
// Spherical-harmonics checks on S^2 (embedded in R^3). The degree-n kernel
// K_n(x) = sum_m |Y_nm(x)|^2 is a constant, N_n / surface_area, where N_n is
// the dimension of the degree-n harmonic space on S^d:
// N_n = C(n+d, d) - C(n+d-2, d). Harmonics are the orthonormal real family
// built from fully normalized associated Legendre functions via the standard
// stable recurrences (valid far beyond the supported n <= 32).

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

namespace enls {

// dimension of the space of degree-n spherical harmonics on S^d
std::uint64_t harmonic_dimension(int degree, int sphere_dim);
// -Lap_{S^d} eigenvalue n(n+d-1) of degree-n harmonics
double laplace_eigenvalue(int degree, int sphere_dim);

struct SphereSample {
    std::vector<std::array<double, 3>> points; // unit vectors
    std::vector<double> weights;               // sum to 4*pi for quadrature rules
};

// quasi-uniform Fibonacci lattice; weights 4*pi/N (constancy scans)
SphereSample fibonacci_sphere_sample(int npoints);
// product rule: Gauss-Legendre in cos(theta) x uniform in phi; integrates
// spherical polynomials up to degree min(2*n_theta - 1, n_phi - 1) exactly
SphereSample gauss_legendre_sphere_sample(int n_theta, int n_phi);

// the 2n+1 orthonormal real spherical harmonics of degree n at a unit vector
std::vector<double> real_harmonics(int degree, const std::array<double, 3>& p);
// K_n(p) = sum_m |Y_nm(p)|^2
double kernel_sum(int degree, const std::array<double, 3>& p);

struct SphereDensity {
    std::vector<double> values; // sum_n |a_n|^2 K_n at each sample point
    double level;               // the constant value
};

// evaluates the equilibrium density sum_n |a_n|^2 K_n on the sample, checks
// constancy to 1e-9 relative, and reports the level
SphereDensity sphere_equilibrium_density(const std::vector<std::complex<double>>& a,
                                         const SphereSample& sample);

} // namespace enls
