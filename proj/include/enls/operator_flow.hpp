#pragma once
// Density-operator dynamics i d(gamma)/dt = [H(gamma), gamma] with
// H(gamma) = diag(|k|^2) + sign * (multiplication by rho_gamma) on the
// truncated plane-wave basis, integrated by classical RK4 with per-step
// re-Hermitization. The flow is a unitary conjugation, so trace and spectrum
// are conserved; trace drift is the step-size health check.
//
// bures_wasserstein is the Wasserstein-2 distance between the centered
// Gaussian laws of two covariances, computed in the Sobolev-weighted frame
// A_i = W^{1/2} gamma_i W^{1/2}, W = diag((1+|k|^2)^s):
//   d^2 = tr A_1 + tr A_2 - 2 tr((A_1^{1/2} A_2 A_1^{1/2})^{1/2}).

#include "enls/covariance.hpp"
#include "enls/dynamics.hpp"

#include <vector>

namespace enls {

// mean density rho_gamma(x) = (1/V) sum_{k,k'} gamma[k,k'] e^{i(k-k').x}
// (physical space, real values); requires 2*k_cut to fit the alias-free grid
Field rho_from_cov(const CovarianceMatrix& c);

// diag(|k|^2) + sign * convolution matrix of rho_gamma
Eigen::MatrixXcd covariance_hamiltonian(const CovarianceMatrix& c, double sign);

struct OperatorTrajectory {
    std::vector<double> times;
    std::vector<CovarianceMatrix> states;
};

// RK4 at fixed cfg.dt up to cfg.t_end, recording every cfg.record_every steps;
// throws NumericalError with a smaller-dt suggestion if the trace drifts
// beyond 1e-6 relative
OperatorTrajectory evolve_operator(const CovarianceMatrix& init, const EvolutionConfig& cfg);

// Wasserstein-2 distance between centered Gaussian laws in the H^s frame
double bures_wasserstein(const CovarianceMatrix& a, const CovarianceMatrix& b, double s = 1.0);

} // namespace enls
