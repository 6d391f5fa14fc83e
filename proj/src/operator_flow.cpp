#include "enls/operator_flow.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace enls {

namespace {

// Fourier coefficients c_q = (1/V) sum_{k-k'=q} gamma[k,k'] of the density,
// indexed by the difference lattice |q_i| <= 2*k_cut
struct DensityCoefficients {
    int span; // 2*k_cut
    std::vector<std::complex<double>> c;
    int side() const { return 2 * span + 1; }
    std::complex<double>& at(const std::array<int, 3>& q) {
        return c[static_cast<std::size_t>(((q[0] + span) * side() + (q[1] + span)) * side() +
                                          (q[2] + span))];
    }
    std::complex<double> at(const std::array<int, 3>& q) const {
        return c[static_cast<std::size_t>(((q[0] + span) * side() + (q[1] + span)) * side() +
                                          (q[2] + span))];
    }
};

DensityCoefficients density_coefficients(const CovarianceMatrix& cov, const Eigen::MatrixXcd& m) {
    DensityCoefficients dc;
    dc.span = 2 * cov.k_cut;
    dc.c.assign(static_cast<std::size_t>(dc.side()) * dc.side() * dc.side(),
                std::complex<double>(0.0, 0.0));
    const double inv_v = 1.0 / cov.grid.volume();
    const auto B = static_cast<Eigen::Index>(cov.basis.size());
    for (Eigen::Index a = 0; a < B; ++a)
        for (Eigen::Index b = 0; b < B; ++b) {
            const auto& ka = cov.basis[static_cast<std::size_t>(a)];
            const auto& kb = cov.basis[static_cast<std::size_t>(b)];
            dc.at({ka[0] - kb[0], ka[1] - kb[1], ka[2] - kb[2]}) += inv_v * m(a, b);
        }
    return dc;
}

} // namespace

Field rho_from_cov(const CovarianceMatrix& c) {
    c.validate();
    if (2 * c.k_cut > c.grid.nyquist() - 1)
        throw std::invalid_argument("rho_from_cov: density harmonics exceed the alias-free grid");
    const DensityCoefficients dc = density_coefficients(c, c.m);
    Field spec(c.grid, Space::spectral);
    const double root_v = std::sqrt(c.grid.volume());
    for (int q0 = -dc.span; q0 <= dc.span; ++q0)
        for (int q1 = (c.grid.dim() > 1 ? -dc.span : 0); q1 <= (c.grid.dim() > 1 ? dc.span : 0); ++q1)
            for (int q2 = (c.grid.dim() > 2 ? -dc.span : 0); q2 <= (c.grid.dim() > 2 ? dc.span : 0);
                 ++q2) {
                const std::array<int, 3> q{q0, q1, q2};
                spec[c.grid.index_of_mode(q)] = root_v * dc.at(q);
            }
    Field rho = ifft(spec);
    for (auto& v : rho.data()) v = std::complex<double>(v.real(), 0.0);
    return rho;
}

Eigen::MatrixXcd covariance_hamiltonian(const CovarianceMatrix& c, double sign) {
    const DensityCoefficients dc = density_coefficients(c, c.m);
    const auto B = static_cast<Eigen::Index>(c.basis.size());
    Eigen::MatrixXcd h(B, B);
    const double ks = c.grid.k_scale();
    for (Eigen::Index a = 0; a < B; ++a) {
        const auto& ka = c.basis[static_cast<std::size_t>(a)];
        for (Eigen::Index b = 0; b < B; ++b) {
            const auto& kb = c.basis[static_cast<std::size_t>(b)];
            h(a, b) = sign * dc.at({ka[0] - kb[0], ka[1] - kb[1], ka[2] - kb[2]});
        }
        double ksq = 0.0;
        for (int ax = 0; ax < c.grid.dim(); ++ax) ksq += (ks * ka[ax]) * (ks * ka[ax]);
        h(a, a) += ksq;
    }
    return h;
}

OperatorTrajectory evolve_operator(const CovarianceMatrix& init, const EvolutionConfig& cfg) {
    cfg.validate();
    init.validate();
    const std::complex<double> mi(0.0, -1.0);
    CovarianceMatrix state = init;

    auto flow = [&](const Eigen::MatrixXcd& g) {
        CovarianceMatrix tmp = state;
        tmp.m = g;
        const Eigen::MatrixXcd h = covariance_hamiltonian(tmp, cfg.sign);
        return Eigen::MatrixXcd(mi * (h * g - g * h));
    };

    OperatorTrajectory traj;
    traj.times.push_back(0.0);
    traj.states.push_back(state);

    const double trace0 = covariance_trace(state);
    const double trace_scale = std::max(1.0, std::abs(trace0));
    double t = 0.0;
    long step = 0;
    const double t_tail = 1e-12 * std::max(1.0, cfg.t_end);
    while (t < cfg.t_end - t_tail) {
        const double dt = std::min(cfg.dt, cfg.t_end - t);
        const Eigen::MatrixXcd k1 = flow(state.m);
        const Eigen::MatrixXcd k2 = flow(state.m + 0.5 * dt * k1);
        const Eigen::MatrixXcd k3 = flow(state.m + 0.5 * dt * k2);
        const Eigen::MatrixXcd k4 = flow(state.m + dt * k3);
        state.m += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        state.m = 0.5 * (state.m + state.m.adjoint()).eval();
        t += dt;
        ++step;
        const double trace_now = covariance_trace(state);
        if (!std::isfinite(trace_now) || std::abs(trace_now - trace0) > 1e-6 * trace_scale)
            throw NumericalError("evolve_operator: trace drift at t = " + std::to_string(t) +
                                 "; reduce dt below " + std::to_string(cfg.dt));
        if (step % cfg.record_every == 0 || t >= cfg.t_end - t_tail) {
            traj.times.push_back(t);
            traj.states.push_back(state);
        }
    }
    return traj;
}

namespace {
// Hermitian square root via eigendecomposition, clipping tiny negative
// eigenvalues from roundoff at zero
Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (a + a.adjoint()));
    Eigen::VectorXd ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = std::sqrt(std::max(0.0, ev(i)));
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}
}

double bures_wasserstein(const CovarianceMatrix& a, const CovarianceMatrix& b, double s) {
    if (a.grid != b.grid || a.k_cut != b.k_cut)
        throw std::invalid_argument("bures_wasserstein: mismatched grid or cutoff");
    a.validate();
    b.validate();
    const double psd_tol = 1e-8;
    if (covariance_min_eigenvalue(a) < -psd_tol * std::max(1.0, covariance_trace(a)) ||
        covariance_min_eigenvalue(b) < -psd_tol * std::max(1.0, covariance_trace(b)))
        throw std::invalid_argument("bures_wasserstein: input is not PSD within tolerance");

    // equal inputs: the trace formula only cancels to sqrt(roundoff), not zero
    if ((a.m - b.m).squaredNorm() == 0.0) return 0.0;

    const auto B = static_cast<Eigen::Index>(a.basis.size());
    Eigen::VectorXd wsqrt(B);
    const double ks = a.grid.k_scale();
    for (Eigen::Index i = 0; i < B; ++i) {
        const auto& k = a.basis[static_cast<std::size_t>(i)];
        double ksq = 0.0;
        for (int ax = 0; ax < a.grid.dim(); ++ax) ksq += (ks * k[ax]) * (ks * k[ax]);
        wsqrt(i) = std::pow(1.0 + ksq, 0.5 * s);
    }
    const Eigen::MatrixXcd a1 = wsqrt.asDiagonal() * a.m * wsqrt.asDiagonal();
    const Eigen::MatrixXcd a2 = wsqrt.asDiagonal() * b.m * wsqrt.asDiagonal();

    const Eigen::MatrixXcd r1 = psd_sqrt(a1);
    const Eigen::MatrixXcd cross = psd_sqrt(r1 * a2 * r1);
    double d2 = a1.trace().real() + a2.trace().real() - 2.0 * cross.trace().real();
    return std::sqrt(std::max(0.0, d2));
}

} // namespace enls
