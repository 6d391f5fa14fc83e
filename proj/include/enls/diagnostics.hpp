#pragma once
// Pointwise observables of an ensemble state. Conventions:
//   energy      E = 1/2 E||X||_{H^1}^2 + sign/4 * integral (E|X|^2)^2
//   virial      V = integral phi_R(x - center) E|X|^2 dx with the compactly
//               supported weight phi_R(x) = R^2 phi(|x|/R), R = L/4,
//               phi(r) = r^2 on [0,1], exp(1 - 1/(r-2)^2) on [1,2], 0 beyond;
//               phi_R equals |x|^2 on the quarter-period ball, so V matches
//               the variance of well-localized states
//   virial rate 4 Im sum_n w_n integral (x-center).(grad u_n) conj(u_n) dx
// Displacements x - center are wrapped per axis into [-L/2, L/2).

#include "enls/equilibrium.hpp"
#include "enls/field.hpp"
#include "enls/mode_ensemble.hpp"
#include "enls/monte_carlo.hpp"

#include <array>
#include <optional>
#include <vector>

namespace enls {

struct DiagnosticsRecord {
    double t = 0.0;
    double mass = 0.0;       // E ||X||_{L^2}^2
    double energy = 0.0;     // sign-aware energy above
    double h1_sq = 0.0;      // E ||X||_{H^1}^2
    double density_L4 = 0.0; // integral (E|X|^2)^2 dx
    std::optional<double> virial;
    std::optional<double> virial_rate;
    std::optional<double> A, B, D, E, modE; // perturbed-run energy terms
    std::optional<double> scatter_cauchy;
};

// integral rho^2 for a real density field
double density_l4(const Field& rho);

double energy(const ModeEnsemble& e, double sign);
double energy(const MonteCarloEnsemble& mc, double sign);

double virial(const ModeEnsemble& e, const std::array<double, 3>& center);
double virial_rate(const ModeEnsemble& e, const std::array<double, 3>& center);

// sum_k |k_phys|^2 |hat u(k)|^2 weighted by the ensemble (no mass term)
double kinetic_energy(const ModeEnsemble& e);

// cutoff weight phi_R(x) and its defining profile phi(r)
double virial_cutoff_profile(double r);
double virial_cutoff(double R, double r);

struct ModifiedEnergyTerms {
    double A; // 1/2 integral conj(Z)(m - Lap)Z
    double B; // 1/4 integral (E|Z|^2)^2
    double D; // integral E|Z|^2 Re E(conj(Z) Y)
    double E; // 1/2 integral E|Z|^2
    double total; // A + B + D + 2 m E
};

// z_eq: operator columns of Z against the equilibrium's noise coordinates
// (aligned with eq.coefficients); z_extra: columns on independent coordinates.
// t selects the closed-form equilibrium waves Y(t) entering the cross term.
ModifiedEnergyTerms modified_energy(const std::vector<Field>& z_eq,
                                    const std::vector<Field>& z_extra,
                                    const EquilibriumSpec& eq, double t);

// free-flow pullback S(-t)X(t): multiplies mode k by e^{+it|k|^2}
ModeEnsemble scattering_profile(const ModeEnsemble& state, double t);
// H^1 ensemble distance between the profiles of two snapshots of one
// trajectory (shared noise coordinates)
double scatter_cauchy(const ModeEnsemble& state1, double t1, const ModeEnsemble& state2,
                      double t2);

} // namespace enls
