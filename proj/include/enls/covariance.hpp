#pragma once
// Covariance operator gamma(v) = E(<X,v> X) restricted to the plane-wave
// basis e_k = e^{ik.x}/sqrt(V), as a dense Hermitian PSD matrix
//
//   gamma[k,k'] = E( hat X(k) conj(hat X(k')) ).
//
// The basis is the cube |k_i| <= k_cut enumerated lexicographically
// (k_1 fastest within k_0, unused axes pinned to 0). The default cutoff is a
// third of the Nyquist frequency, matching the dealias-safe block.

#include "enls/grid.hpp"
#include "enls/mode_ensemble.hpp"

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace enls {

int default_k_cut(const TorusGrid& grid);
std::vector<std::array<int, 3>> covariance_basis(const TorusGrid& grid, int k_cut);

struct CovarianceMatrix {
    TorusGrid grid;
    int k_cut = 0;
    std::vector<std::array<int, 3>> basis; // covariance_basis(grid, k_cut)
    Eigen::MatrixXcd m;

    std::size_t dim() const { return basis.size(); }
    void validate() const; // shape, Hermitian symmetry, basis consistency
};

CovarianceMatrix covariance_from_modes(const ModeEnsemble& e, int k_cut);
CovarianceMatrix covariance_from_modes(const ModeEnsemble& e); // default cutoff

// Frobenius norm of the difference (same grid and cutoff required)
double covariance_distance(const CovarianceMatrix& a, const CovarianceMatrix& b);

// trace of the matrix (equals integral of the density for ensembles whose
// modes live inside the cutoff)
double covariance_trace(const CovarianceMatrix& c);

// smallest eigenvalue (PSD check helper)
double covariance_min_eigenvalue(const CovarianceMatrix& c);

} // namespace enls
