#include "doctest.h"

#include "enls/dynamics.hpp"
#include "enls/operator_flow.hpp"
#include "support/coupling_oracle.hpp"

#include <cmath>

using namespace enls;

namespace {

CovarianceMatrix make_cov(const TorusGrid& g, int k_cut, const Eigen::MatrixXcd& m) {
    CovarianceMatrix c;
    c.grid = g;
    c.k_cut = k_cut;
    c.basis = covariance_basis(g, k_cut);
    c.m = m;
    c.validate();
    return c;
}

Eigen::MatrixXcd random_psd(int n, std::uint64_t seed, double ridge) {
    GaussianStream s(seed, 17);
    Eigen::MatrixXcd b(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b(i, j) = s.gaussian();
    return b.adjoint() * b + ridge * Eigen::MatrixXcd::Identity(n, n);
}

} // namespace

TEST_CASE("rho_from_cov reproduces the exact density of a superposition") {
    TorusGrid g(1, 16);
    ModeEnsemble e;
    e.grid = g;
    e.weights = {1.0};
    Field u(g, Space::physical);
    const Field w1 = Field::plane_wave(g, {1, 0, 0}, 0.8);
    const Field w2 = Field::plane_wave(g, {-2, 0, 0}, std::complex<double>(0.0, 0.5));
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = w1[i] + w2[i];
    e.modes = {u};

    const CovarianceMatrix c = covariance_from_modes(e, 3);
    const Field rho_op = rho_from_cov(c);
    const Field rho_exact = exact_density(e);
    double diff = 0.0;
    for (std::size_t i = 0; i < g.total(); ++i)
        diff = std::max(diff, std::abs(rho_op[i] - rho_exact[i]));
    CHECK(diff < 1e-12);

    CHECK_THROWS_AS((void)rho_from_cov(make_cov(g, 4, random_psd(9, 1, 0.1))),
                    std::invalid_argument);
}

TEST_CASE("hamiltonian of a flat density is diagonal") {
    TorusGrid g(1, 16);
    EquilibriumSpec eq;
    eq.grid = g;
    eq.coefficients = {{{0, 0, 0}, {0.5, 0.0}}, {{1, 0, 0}, {0.0, 0.4}}, {{-1, 0, 0}, {0.3, 0.0}}};
    const double m = eq.mass_level();
    const CovarianceMatrix c = covariance_from_modes(build_equilibrium(eq), 2);
    for (double sign : {+1.0, -1.0}) {
        const Eigen::MatrixXcd h = covariance_hamiltonian(c, sign);
        for (std::size_t a = 0; a < c.dim(); ++a) {
            for (std::size_t b = 0; b < c.dim(); ++b) {
                if (a == b) {
                    const double ksq = g.k_sq(g.index_of_mode(c.basis[a]));
                    CHECK(std::abs(h(a, a) - std::complex<double>(ksq + sign * m, 0.0)) < 1e-12);
                } else {
                    CHECK(std::abs(h(a, b)) < 1e-12);
                }
            }
        }
    }
}

TEST_CASE("equilibrium covariance is stationary under the operator flow") {
    TorusGrid g(1, 16);
    EquilibriumSpec eq;
    eq.grid = g;
    eq.coefficients = {{{0, 0, 0}, {0.5, 0.0}}, {{2, 0, 0}, {0.0, 0.4}}};
    const CovarianceMatrix c0 = covariance_from_modes(build_equilibrium(eq), 3);
    EvolutionConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 0.1;
    cfg.record_every = 100;
    const OperatorTrajectory traj = evolve_operator(c0, cfg);
    REQUIRE(traj.times.size() >= 2);
    CHECK(traj.times.front() == 0.0);
    CHECK(traj.times.back() == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(covariance_distance(traj.states.back(), c0) < 1e-12);
}

TEST_CASE("operator flow tracks the evolved ensemble covariance") {
    TorusGrid g(1, 16);
    ModeEnsemble e;
    e.grid = g;
    GaussianStream s1(21, 1), s2(21, 2);
    Field a = ifft(Field::random_bandlimited(g, s1, 1, 1.0));
    Field b = ifft(Field::random_bandlimited(g, s2, 1, 1.0));
    for (auto& c : a.data()) c *= 0.3;
    for (auto& c : b.data()) c *= 0.3;
    e.weights = {0.6, 0.4};
    e.modes = {a, b};

    EvolutionConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 0.05;
    cfg.record_every = 50;
    const int k_cut = 3;

    RecordingOptions opts;
    opts.snapshots = true;
    const Trajectory ens = evolve(e, cfg, opts);
    REQUIRE(ens.termination.kind == Termination::Kind::completed);
    const OperatorTrajectory op = evolve_operator(covariance_from_modes(e, k_cut), cfg);

    const CovarianceMatrix from_modes =
        covariance_from_modes(ens.snapshot_at(op.times.back()), k_cut);
    const double frob = covariance_distance(from_modes, op.states.back());
    CHECK(frob < 1e-6);
    CHECK(bures_wasserstein(from_modes, op.states.back()) < 1e-2);
}

TEST_CASE("unstable step size is reported, not silently accepted") {
    TorusGrid g(1, 16);
    ModeEnsemble e;
    e.grid = g;
    e.weights = {1.0};
    Field u(g, Space::physical);
    const Field w1 = Field::plane_wave(g, {2, 0, 0}, 1.5);
    const Field w2 = Field::plane_wave(g, {3, 0, 0}, 1.5);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = w1[i] + w2[i];
    e.modes = {u};
    EvolutionConfig cfg;
    cfg.dt = 1.0; // far beyond the RK4 stability limit for |k|^2 = 9
    cfg.t_end = 30.0;
    CHECK_THROWS_AS((void)evolve_operator(covariance_from_modes(e, 3), cfg), NumericalError);
}

TEST_CASE("bures distance basics") {
    TorusGrid g(1, 16);
    const CovarianceMatrix a = make_cov(g, 1, random_psd(3, 5, 0.1));
    CHECK(bures_wasserstein(a, a) < 1e-12);
    CHECK(bures_wasserstein(a, a, 0.0) < 1e-12);

    // diagonal laws: d^2 = sum (sqrt p - sqrt q)^2 in the unweighted frame
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(3, 3), q = Eigen::MatrixXcd::Zero(3, 3);
    p(0, 0) = 1.0;
    p(1, 1) = 4.0;
    p(2, 2) = 1.0;
    q(0, 0) = 4.0;
    q(1, 1) = 1.0;
    q(2, 2) = 4.0;
    const double d = bures_wasserstein(make_cov(g, 1, p), make_cov(g, 1, q), 0.0);
    CHECK(d == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));

    Eigen::MatrixXcd p2 = Eigen::MatrixXcd::Zero(3, 3), q2 = Eigen::MatrixXcd::Zero(3, 3);
    p2(0, 0) = 1.0;
    p2(1, 1) = 4.0;
    p2(2, 2) = 0.0;
    q2(0, 0) = 4.0;
    q2(1, 1) = 1.0;
    q2(2, 2) = 0.0;
    CHECK(bures_wasserstein(make_cov(g, 1, p2), make_cov(g, 1, q2), 0.0) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));

    // scaling law: d(A, cA)^2 = (1 - sqrt c)^2 tr A
    const Eigen::MatrixXcd base = random_psd(3, 9, 0.05);
    const double c = 2.25;
    const double ds = bures_wasserstein(make_cov(g, 1, base), make_cov(g, 1, c * base), 0.0);
    CHECK(ds * ds == doctest::Approx((1.0 - 1.5) * (1.0 - 1.5) * base.real().trace())
                         .epsilon(1e-10));

    // sobolev weighting equals pre-weighting by W^{1/2}
    Eigen::MatrixXcd wsqrt = Eigen::MatrixXcd::Zero(3, 3);
    const auto basis = covariance_basis(g, 1);
    for (int i = 0; i < 3; ++i) {
        const double ksq = g.k_sq(g.index_of_mode(basis[i]));
        wsqrt(i, i) = std::sqrt(1.0 + ksq);
    }
    const Eigen::MatrixXcd g1 = random_psd(3, 31, 0.1), g2 = random_psd(3, 32, 0.1);
    const double dw = bures_wasserstein(make_cov(g, 1, g1), make_cov(g, 1, g2), 1.0);
    const double dm = bures_wasserstein(make_cov(g, 1, wsqrt * g1 * wsqrt),
                                        make_cov(g, 1, wsqrt * g2 * wsqrt), 0.0);
    CHECK(dw == doctest::Approx(dm).epsilon(1e-11));

    Eigen::MatrixXcd neg = Eigen::MatrixXcd::Identity(3, 3);
    neg(2, 2) = -0.5;
    CHECK_THROWS_AS((void)bures_wasserstein(make_cov(g, 1, neg), a), std::invalid_argument);
}

TEST_CASE("bures satisfies symmetry and the triangle inequality") {
    TorusGrid g(1, 16);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto a = make_cov(g, 1, random_psd(3, 100 + seed, 0.02));
        const auto b = make_cov(g, 1, random_psd(3, 200 + seed, 0.02));
        const auto c = make_cov(g, 1, random_psd(3, 300 + seed, 0.02));
        const double dab = bures_wasserstein(a, b), dba = bures_wasserstein(b, a);
        CHECK(std::abs(dab - dba) < 1e-9);
        CHECK(bures_wasserstein(a, c) <= dab + bures_wasserstein(b, c) + 1e-10);
    }
}

TEST_CASE("closed form matches the coupling oracles") {
    TorusGrid g(1, 8);
    const auto basis = covariance_basis(g, 1); // not used by the oracles, frame only
    REQUIRE(basis.size() == 3);
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const Eigen::MatrixXcd a1 = random_psd(2, 400 + seed, 1e-3);
        const Eigen::MatrixXcd a2 = random_psd(2, 500 + seed, 1e-3);
        // nuclear-norm route (Denman-Beavers + Jacobi SVD)
        const double tn = testing::coupling_value_tracenorm(a1, a2);
        // raw-definition route (ellipsoid on the semidefinite program)
        const double el = testing::coupling_value_ellipsoid(a1, a2);
        CHECK(el == doctest::Approx(tn).epsilon(1e-6));

        const double closed = a1.real().trace() + a2.real().trace() - 2.0 * tn;
        const double d_oracle = std::sqrt(std::max(0.0, closed));
        CHECK(d_oracle == doctest::Approx(testing::bures_oracle(a1, a2)).epsilon(1e-12));
    }

    // diagonal sanity of the oracle itself
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(2, 2), q = Eigen::MatrixXcd::Zero(2, 2);
    p(0, 0) = 1.0;
    p(1, 1) = 4.0;
    q(0, 0) = 4.0;
    q(1, 1) = 1.0;
    CHECK(testing::bures_oracle(p, q) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
}

TEST_CASE("library distance agrees with the independent oracle on 2x2 blocks") {
    // embed 2x2 laws in the k_cut = 1 frame by zero-padding the third slot
    TorusGrid g(1, 16);
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(3, 3), b = Eigen::MatrixXcd::Zero(3, 3);
        a.topLeftCorner(2, 2) = random_psd(2, 600 + seed, 1e-3);
        b.topLeftCorner(2, 2) = random_psd(2, 700 + seed, 1e-3);
        const double lib = bures_wasserstein(make_cov(g, 1, a), make_cov(g, 1, b), 0.0);
        const double oracle = testing::bures_oracle(a.topLeftCorner(2, 2).eval(),
                                                    b.topLeftCorner(2, 2).eval());
        CHECK(lib == doctest::Approx(oracle).epsilon(1e-9));
    }
}
