#pragma once
// Plane-wave equilibria: the ensemble Y(t) = sum_k a_k e^{ik.x} e^{-it(|k|^2+m)} g_k
// with m = sum_k |a_k|^2 solves the expectation-coupled equation exactly. Its
// mean density is the constant m for all time and each mode only rotates in
// phase, which is what the fidelity checks verify.

#include "enls/field.hpp"
#include "enls/grid.hpp"
#include "enls/mode_ensemble.hpp"

#include <complex>
#include <vector>

namespace enls {

struct EquilibriumCoefficient {
    std::array<int, 3> k{0, 0, 0};
    std::complex<double> a{0.0, 0.0};
};

struct EquilibriumSpec {
    TorusGrid grid;
    std::vector<EquilibriumCoefficient> coefficients;

    // m = sum |a_k|^2 (the constant density level and the dispersion shift)
    double mass_level() const;
    // sum |k_phys|^2 |a_k|^2 (second spectral moment; finite by construction)
    double second_moment() const;
    // throws std::invalid_argument on off-lattice, duplicate or zero coefficients
    void validate() const;
};

// one mode per coefficient: weight |a_k|^2, mode e^{i(k.x + arg a_k)}
ModeEnsemble build_equilibrium(const EquilibriumSpec& eq);

// closed-form phase factors e^{-it(|k|^2 + m)}, aligned with eq.coefficients
std::vector<std::complex<double>> equilibrium_phases(const EquilibriumSpec& eq, double t);

// full wave a_k e^{ik.x} e^{-it(|k|^2+m)} of one coefficient (physical space);
// these are the operator columns of Y against its own noise coordinates
Field equilibrium_wave(const EquilibriumSpec& eq, std::size_t index, double t);

} // namespace enls
