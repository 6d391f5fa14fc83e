#include "enls/monte_carlo.hpp"

#include "enls/reduce.hpp"

#include <cmath>
#include <stdexcept>

namespace enls {

MonteCarloEnsemble sample_gaussian(const ModeEnsemble& e, std::size_t realizations,
                                   const GaussianStream& stream) {
    e.validate();
    MonteCarloEnsemble mc;
    mc.grid = e.grid;
    mc.realizations.reserve(realizations);
    std::vector<double> root_w(e.rank());
    for (std::size_t n = 0; n < e.rank(); ++n) root_w[n] = std::sqrt(e.weights[n]);
    std::vector<Field> physical_modes;
    physical_modes.reserve(e.rank());
    for (const auto& u : e.modes) physical_modes.push_back(to_space(u, Space::physical));
    for (std::size_t j = 0; j < realizations; ++j) {
        GaussianStream sj = stream.derived(j);
        Field x(e.grid, Space::physical);
        for (std::size_t n = 0; n < e.rank(); ++n) {
            const std::complex<double> c = root_w[n] * sj.gaussian();
            const auto& u = physical_modes[n];
            for (std::size_t i = 0; i < x.size(); ++i) x[i] += c * u[i];
        }
        mc.realizations.push_back(std::move(x));
    }
    return mc;
}

Field empirical_density(const MonteCarloEnsemble& mc) {
    if (mc.count() == 0) throw std::invalid_argument("empirical_density: no realizations");
    const std::size_t npts = mc.grid.total();
    // fixed-order pairwise tree over realizations, vector-valued accumulator
    struct Node {
        std::vector<double> v;
        Node& operator+=(const Node& o) {
            for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
            return *this;
        }
        Node operator+(const Node& o) const {
            Node r = *this;
            r += o;
            return r;
        }
    };
    Node zero{std::vector<double>(npts, 0.0)};
    Node total = pairwise_sum_from<Node>(
        mc.count(),
        [&](std::size_t j) {
            Node n{std::vector<double>(npts)};
            const Field x = to_space(mc.realizations[j], Space::physical);
            for (std::size_t i = 0; i < npts; ++i) n.v[i] = std::norm(x[i]);
            return n;
        },
        zero);
    Field rho(mc.grid, Space::physical);
    const double inv = 1.0 / static_cast<double>(mc.count());
    for (std::size_t i = 0; i < npts; ++i) rho[i] = total.v[i] * inv;
    return rho;
}

namespace {
Eigen::VectorXcd coefficients_on_basis(const Field& x,
                                       const std::vector<std::array<int, 3>>& basis) {
    Field s = to_space(x, Space::spectral);
    Eigen::VectorXcd v(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t a = 0; a < basis.size(); ++a)
        v(static_cast<Eigen::Index>(a)) = s[s.grid().index_of_mode(basis[a])];
    return v;
}
}

CovarianceMatrix empirical_covariance(const MonteCarloEnsemble& mc, int k_cut) {
    if (mc.count() == 0) throw std::invalid_argument("empirical_covariance: no realizations");
    CovarianceMatrix c;
    c.grid = mc.grid;
    c.k_cut = k_cut;
    c.basis = covariance_basis(mc.grid, k_cut);
    const auto B = static_cast<Eigen::Index>(c.basis.size());
    Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(B, B);
    c.m = pairwise_sum_from<Eigen::MatrixXcd>(
              mc.count(),
              [&](std::size_t j) {
                  Eigen::VectorXcd v = coefficients_on_basis(mc.realizations[j], c.basis);
                  return Eigen::MatrixXcd(v * v.adjoint());
              },
              zero) /
          static_cast<double>(mc.count());
    return c;
}

Eigen::MatrixXcd empirical_cross_covariance(const MonteCarloEnsemble& a,
                                            const MonteCarloEnsemble& b, int k_cut) {
    if (a.count() != b.count() || a.count() == 0)
        throw std::invalid_argument("empirical_cross_covariance: realization counts differ");
    auto basis = covariance_basis(a.grid, k_cut);
    const auto B = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(B, B);
    return pairwise_sum_from<Eigen::MatrixXcd>(
               a.count(),
               [&](std::size_t j) {
                   Eigen::VectorXcd va = coefficients_on_basis(a.realizations[j], basis);
                   Eigen::VectorXcd vb = coefficients_on_basis(b.realizations[j], basis);
                   return Eigen::MatrixXcd(va * vb.adjoint());
               },
               zero) /
           static_cast<double>(a.count());
}

double empirical_mass(const MonteCarloEnsemble& mc) {
    if (mc.count() == 0) throw std::invalid_argument("empirical_mass: no realizations");
    return pairwise_sum<double>(mc.count(),
                                [&](std::size_t j) { return l2_norm_sq(mc.realizations[j]); }) /
           static_cast<double>(mc.count());
}

double empirical_sobolev_sq(const MonteCarloEnsemble& mc, double s) {
    if (mc.count() == 0) throw std::invalid_argument("empirical_sobolev_sq: no realizations");
    return pairwise_sum<double>(
               mc.count(),
               [&](std::size_t j) { return sobolev_norm_sq(mc.realizations[j], s); }) /
           static_cast<double>(mc.count());
}

double density_sup_distance(const Field& a, const Field& b) {
    if (a.grid() != b.grid())
        throw std::invalid_argument("density_sup_distance: grid mismatch");
    const Field pa = to_space(a, Space::physical);
    const Field pb = to_space(b, Space::physical);
    double sup = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i)
        sup = std::max(sup, std::abs(pa[i].real() - pb[i].real()));
    return sup;
}

} // namespace enls
