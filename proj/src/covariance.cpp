#include "enls/covariance.hpp"

#include <stdexcept>
#include <string>

namespace enls {

int default_k_cut(const TorusGrid& grid) { return std::max(1, grid.nyquist() / 3); }

std::vector<std::array<int, 3>> covariance_basis(const TorusGrid& grid, int k_cut) {
    if (k_cut < 0 || k_cut > grid.nyquist() - 1)
        throw std::invalid_argument("covariance_basis: k_cut outside the alias-free lattice");
    const int lo[3] = {-k_cut, grid.dim() > 1 ? -k_cut : 0, grid.dim() > 2 ? -k_cut : 0};
    const int hi[3] = {k_cut, grid.dim() > 1 ? k_cut : 0, grid.dim() > 2 ? k_cut : 0};
    std::vector<std::array<int, 3>> basis;
    for (int k0 = lo[0]; k0 <= hi[0]; ++k0)
        for (int k1 = lo[1]; k1 <= hi[1]; ++k1)
            for (int k2 = lo[2]; k2 <= hi[2]; ++k2)
                basis.push_back({k0, k1, k2});
    return basis;
}

void CovarianceMatrix::validate() const {
    if (basis != covariance_basis(grid, k_cut))
        throw std::invalid_argument("CovarianceMatrix: basis does not match grid/k_cut");
    if (m.rows() != static_cast<Eigen::Index>(basis.size()) || m.rows() != m.cols())
        throw std::invalid_argument("CovarianceMatrix: matrix shape mismatch");
    double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw std::invalid_argument("CovarianceMatrix: matrix is not Hermitian");
}

CovarianceMatrix covariance_from_modes(const ModeEnsemble& e, int k_cut) {
    e.validate();
    CovarianceMatrix c;
    c.grid = e.grid;
    c.k_cut = k_cut;
    c.basis = covariance_basis(e.grid, k_cut);
    const auto B = static_cast<Eigen::Index>(c.basis.size());
    c.m = Eigen::MatrixXcd::Zero(B, B);
    Eigen::VectorXcd v(B);
    for (std::size_t n = 0; n < e.rank(); ++n) {
        Field u = to_space(e.modes[n], Space::spectral);
        for (Eigen::Index a = 0; a < B; ++a)
            v(a) = u[e.grid.index_of_mode(c.basis[a])];
        c.m.noalias() += e.weights[n] * (v * v.adjoint());
    }
    return c;
}

CovarianceMatrix covariance_from_modes(const ModeEnsemble& e) {
    return covariance_from_modes(e, default_k_cut(e.grid));
}

double covariance_distance(const CovarianceMatrix& a, const CovarianceMatrix& b) {
    if (a.grid != b.grid || a.k_cut != b.k_cut)
        throw std::invalid_argument("covariance_distance: mismatched grid or cutoff");
    return (a.m - b.m).norm();
}

double covariance_trace(const CovarianceMatrix& c) { return c.m.trace().real(); }

double covariance_min_eigenvalue(const CovarianceMatrix& c) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (c.m + c.m.adjoint()),
                                                       Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

} // namespace enls
