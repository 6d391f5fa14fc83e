#pragma once
// Monte Carlo view of a mode ensemble: J equally weighted realizations
// X_j = sum_n sqrt(w_n) g_{j,n} u_n, with the Gaussians of realization j drawn
// from the child stream derived(j) in ascending mode order. Draws therefore
// depend only on (seed, stream_id, j, n), never on thread partitioning, and
// empirical averages use fixed-order pairwise reduction, so repeated runs are
// bit-identical.

#include "enls/covariance.hpp"
#include "enls/mode_ensemble.hpp"
#include "enls/rng.hpp"

#include <vector>

namespace enls {

struct MonteCarloEnsemble {
    TorusGrid grid;
    std::vector<Field> realizations; // weight 1/J each

    std::size_t count() const { return realizations.size(); }
};

MonteCarloEnsemble sample_gaussian(const ModeEnsemble& e, std::size_t realizations,
                                   const GaussianStream& stream);

// (1/J) sum_j |X_j(x)|^2 (physical space, real values)
Field empirical_density(const MonteCarloEnsemble& mc);
// (1/J) sum_j hat X_j(k) conj(hat X_j(k')) on the covariance basis
CovarianceMatrix empirical_covariance(const MonteCarloEnsemble& mc, int k_cut);
// (1/J) sum_j hat X_j(k) conj(hat Y_j(k')): cross-covariance of two ensembles
// sampled with shared draws
Eigen::MatrixXcd empirical_cross_covariance(const MonteCarloEnsemble& a,
                                            const MonteCarloEnsemble& b, int k_cut);

// (1/J) sum_j ||X_j||^2 and the H^s analogue
double empirical_mass(const MonteCarloEnsemble& mc);
double empirical_sobolev_sq(const MonteCarloEnsemble& mc, double s);

// sup_x |rho_a(x) - rho_b(x)| between two real-valued density fields
double density_sup_distance(const Field& a, const Field& b);

} // namespace enls
