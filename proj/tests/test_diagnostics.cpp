#include "doctest.h"

#include "enls/dynamics.hpp"

#include <cmath>

using namespace enls;

TEST_CASE("density integrals and energy of a single plane wave") {
    TorusGrid g(1, 16);
    ModeEnsemble e;
    e.grid = g;
    e.weights = {1.0};
    e.modes = {Field::plane_wave(g, {1, 0, 0}, 1.0)};
    const double V = 2.0 * pi;

    const Field rho = exact_density(e);
    CHECK(density_l4(rho) == doctest::Approx(V).epsilon(1e-13));
    CHECK(energy(e, +1.0) == doctest::Approx(2.0 * pi + pi / 2.0).epsilon(1e-13));
    CHECK(energy(e, -1.0) == doctest::Approx(2.0 * pi - pi / 2.0).epsilon(1e-13));
    CHECK(kinetic_energy(e) == doctest::Approx(V).epsilon(1e-13));
}

TEST_CASE("virial cutoff profile shape") {
    CHECK(virial_cutoff_profile(0.0) == 0.0);
    CHECK(virial_cutoff_profile(0.5) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(virial_cutoff_profile(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(virial_cutoff_profile(2.0) == 0.0);
    CHECK(virial_cutoff_profile(3.0) == 0.0);
    // smooth decay on (1,2)
    const double v15 = virial_cutoff_profile(1.5);
    CHECK(v15 > 0.0);
    CHECK(v15 < 1.1);
    CHECK(virial_cutoff_profile(1.9) < v15);
    // scaled weight R^2 phi(r/R) equals r^2 inside the quarter ball
    CHECK(virial_cutoff(2.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(virial_cutoff(2.0, 2.0) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(virial_cutoff(2.0, 4.5) == 0.0);
}

TEST_CASE("virial of a localized bump is its second moment") {
    TorusGrid g(1, 64);
    ModeEnsemble e;
    e.grid = g;
    e.weights = {1.0};
    const double width = 0.4, amp = 1.0;
    e.modes = {Field::gaussian_bump(g, {pi, 0.0, 0.0}, width, amp)};
    // integral x^2 a^2 exp(-x^2/width^2) = a^2 width^3 sqrt(pi)/2
    const double expected = amp * amp * width * width * width * std::sqrt(pi) / 2.0;
    CHECK(virial(e, {pi, 0.0, 0.0}) == doctest::Approx(expected).epsilon(1e-5));
    // real states have zero virial rate
    CHECK(std::abs(virial_rate(e, {pi, 0.0, 0.0})) < 1e-12);
}

TEST_CASE("virial rate of a boosted bump about a shifted center") {
    TorusGrid g(1, 64);
    const double width = 0.4;
    const Field bump = Field::gaussian_bump(g, {pi, 0.0, 0.0}, width, 1.0);
    const Field boost = Field::plane_wave(g, {2, 0, 0}, 1.0);
    Field u(g, Space::physical);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = bump[i] * boost[i];
    ModeEnsemble e;
    e.grid = g;
    e.weights = {1.0};
    e.modes = {u};
    // rate = 4 v integral (x - c') |b|^2 = 4 v (c - c') ||b||^2
    const double mass_b = l2_norm_sq(bump); // width sqrt(pi) up to tails
    CHECK(mass_b == doctest::Approx(width * std::sqrt(pi)).epsilon(1e-6));
    const double rate = virial_rate(e, {pi - 0.5, 0.0, 0.0});
    CHECK(rate == doctest::Approx(4.0 * 2.0 * 0.5 * mass_b).epsilon(1e-6));
}

TEST_CASE("modified energy terms for a constant perturbation") {
    TorusGrid g(1, 16);
    EquilibriumSpec eq;
    eq.grid = g;
    eq.coefficients = {{{0, 0, 0}, {0.6, 0.0}}};
    const double eps = 0.1, V = 2.0 * pi, m = 0.36;
    std::vector<Field> z_eq = {Field::plane_wave(g, {0, 0, 0}, eps)};
    const auto terms = modified_energy(z_eq, {}, eq, 0.0);
    CHECK(terms.A == doctest::Approx(0.5 * m * eps * eps * V).epsilon(1e-12));
    CHECK(terms.B == doctest::Approx(0.25 * eps * eps * eps * eps * V).epsilon(1e-12));
    CHECK(terms.D == doctest::Approx(0.6 * eps * eps * eps * V).epsilon(1e-12));
    CHECK(terms.E == doctest::Approx(0.5 * eps * eps * V).epsilon(1e-12));
    CHECK(terms.total ==
          doctest::Approx(terms.A + terms.B + terms.D + 2.0 * m * terms.E).epsilon(1e-12));
}

TEST_CASE("modified energy cross term rotates with the equilibrium phase") {
    TorusGrid g(1, 16);
    EquilibriumSpec eq;
    eq.grid = g;
    eq.coefficients = {{{0, 0, 0}, {0.6, 0.0}}};
    const double eps = 0.1;
    std::vector<Field> z_eq = {Field::plane_wave(g, {0, 0, 0}, eps)};
    // at t with phase e^{-itm}: D picks up cos(t m)
    const double t = 0.8, m = 0.36, V = 2.0 * pi;
    const auto terms = modified_energy(z_eq, {}, eq, t);
    CHECK(terms.D == doctest::Approx(0.6 * eps * eps * eps * V * std::cos(t * m)).epsilon(1e-11));
    CHECK(terms.A == doctest::Approx(0.5 * m * eps * eps * V).epsilon(1e-12));
}

TEST_CASE("gradient term enters the quadratic form") {
    TorusGrid g(1, 16);
    EquilibriumSpec eq;
    eq.grid = g;
    eq.coefficients = {{{0, 0, 0}, {0.5, 0.0}}};
    const double eps = 0.05, V = 2.0 * pi, m = 0.25;
    std::vector<Field> z_extra = {Field::plane_wave(g, {3, 0, 0}, eps)};
    const auto terms = modified_energy({Field(g, Space::physical)}, z_extra, eq, 0.0);
    // A = 1/2 (m + |k|^2) eps^2 V with k = 3
    CHECK(terms.A == doctest::Approx(0.5 * (m + 9.0) * eps * eps * V).epsilon(1e-12));
    // an extra column is independent of Y: no cross term
    CHECK(std::abs(terms.D) < 1e-14);
}

TEST_CASE("scattering profile undoes the free flow") {
    TorusGrid g(1, 16);
    ModeEnsemble e;
    e.grid = g;
    e.weights = {1.0};
    e.modes = {Field::plane_wave(g, {2, 0, 0}, 1.0)};
    ModeEnsemble flowed = e;
    flowed.modes[0] = apply_semigroup(e.modes[0], 0.4, 0.0);
    const ModeEnsemble profile = scattering_profile(flowed, 0.4);
    double diff = 0.0;
    for (std::size_t i = 0; i < g.total(); ++i)
        diff = std::max(diff, std::abs(profile.modes[0][i] - e.modes[0][i]));
    CHECK(diff < 1e-13);
    CHECK(scatter_cauchy(flowed, 0.4, flowed, 0.4) == 0.0);
    // distance picks up the H^1 gap between the pulled-back states
    const double d = scatter_cauchy(e, 0.0, flowed, 0.0);
    CHECK(d > 0.0);
}

TEST_CASE("virial second derivative matches the closed form on a short run") {
    TorusGrid g(1, 64);
    ModeEnsemble e;
    e.grid = g;
    e.weights = {1.0};
    e.modes = {Field::gaussian_bump(g, {pi, 0.0, 0.0}, 0.3, 1.2)};
    EvolutionConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 8e-3;
    RecordingOptions opts;
    opts.virial = true;
    opts.virial_center = {pi, 0.0, 0.0};
    const Trajectory traj = evolve(e, cfg, opts);
    REQUIRE(traj.termination.kind == Termination::Kind::completed);
    const double e0 = energy(e, +1.0);
    const auto check = virial_second_derivative_check(traj, +1.0, e0);
    CHECK(check.max_rel_residual < 2e-3);
    CHECK(check.bound == doctest::Approx(16.0 * e0).epsilon(1e-15));
    CHECK(check.bound_satisfied);
}

TEST_CASE("virial check requires enough uniform virial records") {
    TorusGrid g(1, 16);
    ModeEnsemble e;
    e.grid = g;
    e.weights = {1.0};
    e.modes = {Field::gaussian_bump(g, {pi, 0.0, 0.0}, 0.5, 0.5)};
    EvolutionConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 3e-3;
    RecordingOptions opts;
    opts.virial = true;
    const Trajectory traj = evolve(e, cfg, opts); // only 4 records
    CHECK_THROWS_AS((void)virial_second_derivative_check(traj, +1.0, energy(e, +1.0)),
                    std::invalid_argument);
}
