#pragma once
// Time integration of i dX/dt = -Lap X + sign E(|X|^2) X by Strang splitting.
// The expectation potential is deterministic, so every mode/realization obeys
// the same linear equation and both substeps are exactly unitary per member:
//   * half-step potential phase exp(-i sign rho(x) dt/2), with rho the exact
//     (mode) or empirical (Monte Carlo) density, dealiased by the 2/3 rule
//     before the multiply; a common real phase leaves |X| pointwise invariant,
//     so the potential substep solves its subflow exactly,
//   * full linear step e^{-i dt |k|^2},
//   * half-step potential phase with the density recomputed after the linear
//     step.
// Blow-up detection is a dual trigger: the H^1 ceiling is checked on each
// attempted step first, then the per-step energy drift; drift beyond tolerance
// halves dt and retries, and dt < dt_min terminates with dt_underflow.

#include "enls/diagnostics.hpp"
#include "enls/equilibrium.hpp"
#include "enls/mode_ensemble.hpp"
#include "enls/monte_carlo.hpp"

#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace enls {

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EvolutionConfig {
    double sign = +1.0; // +1 defocusing, -1 focusing
    double dt = 1e-3;
    double t_end = 1.0;
    double dt_min = 1e-9;
    // ceiling on sqrt(E||X||_{H^1}^2); crossing it terminates with blow_up
    double h1_ceiling = std::numeric_limits<double>::infinity();
    int record_every = 1;
    // per accepted step, relative to max(1, |energy(t=0)|); exceeding it
    // triggers dt halving
    double energy_drift_tol = 1e-6;

    void validate() const;
};

struct Termination {
    enum class Kind { completed, blow_up, dt_underflow } kind = Kind::completed;
    double t_star = 0.0; // detection time (t_end when completed)
};

struct RecordingOptions {
    bool virial = false;
    std::array<double, 3> virial_center{0.0, 0.0, 0.0};
    bool snapshots = false; // keep ensemble copies at record times
};

struct Trajectory {
    TorusGrid grid;
    std::vector<DiagnosticsRecord> records;
    std::vector<double> snapshot_times;
    std::vector<ModeEnsemble> snapshots;
    Termination termination;

    const DiagnosticsRecord& last() const { return records.back(); }
    // snapshot whose time matches t (within 1e-9 relative); throws if absent
    const ModeEnsemble& snapshot_at(double t) const;
};

// one Strang step (exact representation / Monte Carlo realizations)
ModeEnsemble strang_step(const ModeEnsemble& state, double dt, double sign);
MonteCarloEnsemble strang_step(const MonteCarloEnsemble& state, double dt, double sign);

Trajectory evolve(const ModeEnsemble& init, const EvolutionConfig& cfg,
                  const RecordingOptions& opts = {});

// Perturbation around an equilibrium: Z rides the same noise coordinates as
// Y, so the combined columns c_k = y_k + z_k (plus the extra independent
// columns) evolve as a weight-1 mode system; recorded Z diagnostics subtract
// the closed-form equilibrium waves at the record time. Records carry the
// modified-energy terms A, B, D, E, modE.
Trajectory evolve_perturbed(const std::vector<Field>& z_eq, const std::vector<Field>& z_extra,
                            const EquilibriumSpec& eq, const EvolutionConfig& cfg,
                            const RecordingOptions& opts = {});

// trajectory-level checks -----------------------------------------------------

struct VirialCheckResult {
    double max_rel_residual;       // finite-difference vs closed form
    double max_second_derivative;  // largest FD value encountered
    double bound;                  // 16 * energy0
    bool bound_satisfied;          // FD <= bound + bound_tol*|energy0| throughout
};

// Compares centered second differences of the recorded virial column against
// 8*kinetic + sign*2*dim*density_L4 at the interior record times and checks
// the 16*energy0 ceiling. Requires >= 5 uniformly spaced records with the
// virial column present.
VirialCheckResult virial_second_derivative_check(const Trajectory& traj, double sign,
                                                 double energy0, double bound_tol = 1e-3);

// cumulative trapezoid of density_L4 over the recorded times
std::vector<double> morawetz_accumulator(const Trajectory& traj);

// Cauchy difference of free-flow profiles between two snapshot times
double scatter_cauchy(const Trajectory& traj, double t1, double t2);

} // namespace enls
