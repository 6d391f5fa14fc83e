#include "doctest.h"

#include "enls/dynamics.hpp"
#include "support/fit.hpp"
#include "support/scalar_nls.hpp"

#include <cmath>

using namespace enls;

namespace {

ModeEnsemble generic_two_modes(const TorusGrid& g) {
    ModeEnsemble e;
    e.grid = g;
    GaussianStream s1(31, 1), s2(31, 2);
    Field a = ifft(Field::random_bandlimited(g, s1, 2, 1.0));
    Field b = ifft(Field::random_bandlimited(g, s2, 2, 0.5));
    e.weights = {0.7, 0.3};
    e.modes = {a, b};
    return e;
}

} // namespace

TEST_CASE("evolution config validation") {
    EvolutionConfig c;
    CHECK_NOTHROW(c.validate());
    c.sign = 0.5;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.sign = -1.0;
    c.dt = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.dt = 1e-3;
    c.dt_min = 1e-2;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.dt_min = 1e-9;
    c.record_every = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("one strang step is unitary per member") {
    TorusGrid g(1, 32);
    ModeEnsemble e = generic_two_modes(g);
    for (double sign : {+1.0, -1.0}) {
        const ModeEnsemble stepped = strang_step(e, 1e-2, sign);
        for (std::size_t n = 0; n < e.rank(); ++n) {
            const double before = l2_norm_sq(e.modes[n]);
            const double after = l2_norm_sq(stepped.modes[n]);
            CHECK(std::abs(after - before) <= 1e-13 * before);
        }
    }
}

TEST_CASE("strang endpoint converges at second order to the reference flow") {
    TorusGrid g(1, 16);
    const ModeEnsemble e0 = generic_two_modes(g);
    const double sign = +1.0;
    const double t_end = 0.048; // divisible by every dt below

    // reference: RK4 on the spectral coefficients with naive-DFT transforms
    testing::SpectralState ref_state;
    for (const auto& u : e0.modes) ref_state.push_back(fft(u).data());
    const std::size_t ref_steps = 480;
    ref_state = testing::nls_rk4(g, ref_state, e0.weights, sign, t_end / ref_steps, ref_steps);

    std::vector<double> dts, errs;
    for (double dt : {4e-3, 2e-3, 1e-3}) {
        ModeEnsemble state = e0;
        const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
        for (std::size_t s = 0; s < steps; ++s) state = strang_step(state, dt, sign);
        double err = 0.0;
        for (std::size_t n = 0; n < state.rank(); ++n) {
            const Field hat = fft(state.modes[n]);
            double sq = 0.0;
            for (std::size_t i = 0; i < hat.size(); ++i) sq += std::norm(hat[i] - ref_state[n][i]);
            err = std::max(err, std::sqrt(sq));
        }
        dts.push_back(dt);
        errs.push_back(err);
    }
    for (double e : errs) CHECK(e > 1e-12); // non-degenerate study
    const double slope = testing::fit_log_slope(dts, errs);
    CHECK(slope == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("equilibria are preserved to roundoff") {
    TorusGrid g(1, 16);
    EquilibriumSpec eq;
    eq.grid = g;
    eq.coefficients = {{{0, 0, 0}, {0.5, 0.0}}, {{1, 0, 0}, {0.0, 0.3}}, {{-2, 0, 0}, {0.2, 0.1}}};
    EvolutionConfig cfg;
    cfg.dt = 1e-2;
    cfg.t_end = 0.5;
    RecordingOptions opts;
    opts.snapshots = true;
    const Trajectory traj = evolve(build_equilibrium(eq), cfg, opts);
    REQUIRE(traj.termination.kind == Termination::Kind::completed);

    const double m = eq.mass_level();
    const auto phases = equilibrium_phases(eq, traj.records.back().t);
    const ModeEnsemble& last = traj.snapshot_at(traj.records.back().t);
    for (std::size_t n = 0; n < eq.coefficients.size(); ++n) {
        const Field expect = Field::plane_wave(
            g, eq.coefficients[n].k,
            eq.coefficients[n].a / std::abs(eq.coefficients[n].a) * phases[n]);
        double diff = 0.0;
        for (std::size_t i = 0; i < expect.size(); ++i)
            diff = std::max(diff, std::abs(to_space(last.modes[n], Space::physical)[i] - expect[i]));
        CHECK(diff < 1e-11);
    }
    const Field rho = exact_density(last);
    for (std::size_t i = 0; i < rho.size(); ++i)
        CHECK(std::abs(rho[i].real() - m) < 1e-12);
}

TEST_CASE("trajectory recording layout") {
    TorusGrid g(1, 16);
    EvolutionConfig cfg;
    cfg.dt = 1e-2;
    cfg.t_end = 0.1;
    cfg.record_every = 2;
    RecordingOptions opts;
    opts.snapshots = true;
    const Trajectory traj = evolve(generic_two_modes(g), cfg, opts);
    REQUIRE(traj.termination.kind == Termination::Kind::completed);
    CHECK(traj.records.front().t == 0.0);
    CHECK(traj.records.back().t == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(traj.records.size() == 6); // t=0 plus every other of 10 steps
    REQUIRE(traj.snapshot_times.size() == traj.snapshots.size());
    CHECK(traj.snapshot_times.size() == traj.records.size());
    CHECK_NOTHROW((void)traj.snapshot_at(0.06));
    CHECK_THROWS_AS((void)traj.snapshot_at(0.05), std::invalid_argument);

    // mass column stays at the ensemble mass to near machine precision
    const double m0 = traj.records.front().mass;
    for (const auto& r : traj.records) CHECK(std::abs(r.mass - m0) <= 1e-12 * m0);
}

TEST_CASE("monte carlo realizations step like weight-1/J columns") {
    TorusGrid g(1, 16);
    const ModeEnsemble e = generic_two_modes(g);
    MonteCarloEnsemble mc = sample_gaussian(e, 16, GaussianStream(8, 0));
    const MonteCarloEnsemble stepped = strang_step(mc, 1e-2, +1.0);

    ModeEnsemble view;
    view.grid = g;
    view.weights.assign(mc.count(), 1.0 / static_cast<double>(mc.count()));
    view.modes = mc.realizations;
    const ModeEnsemble view_stepped = strang_step(view, 1e-2, +1.0);
    double diff = 0.0;
    for (std::size_t j = 0; j < mc.count(); ++j) {
        const auto& a = to_space(stepped.realizations[j], Space::physical);
        const auto& b = to_space(view_stepped.modes[j], Space::physical);
        for (std::size_t i = 0; i < g.total(); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
    }
    CHECK(diff == 0.0);
    for (std::size_t j = 0; j < mc.count(); ++j)
        CHECK(std::abs(l2_norm_sq(stepped.realizations[j]) - l2_norm_sq(mc.realizations[j])) <=
              1e-13 * l2_norm_sq(mc.realizations[j]));
}

TEST_CASE("h1 ceiling terminates with blow_up") {
    TorusGrid g(1, 16);
    const ModeEnsemble e = generic_two_modes(g);
    EvolutionConfig cfg;
    cfg.sign = -1.0;
    cfg.dt = 1e-3;
    cfg.t_end = 1.0;
    cfg.h1_ceiling = 0.5 * std::sqrt(ensemble_sobolev_sq(e, 1.0));
    const Trajectory traj = evolve(e, cfg);
    CHECK(traj.termination.kind == Termination::Kind::blow_up);
    CHECK(traj.termination.t_star == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK(traj.records.back().t == doctest::Approx(1e-3).epsilon(1e-12));
}

TEST_CASE("unresolvable drift terminates with dt_underflow") {
    TorusGrid g(1, 16);
    ModeEnsemble e = generic_two_modes(g);
    for (auto& u : e.modes)
        for (auto& c : u.data()) c *= 40.0; // strong nonlinearity
    EvolutionConfig cfg;
    cfg.dt = 0.5;
    cfg.t_end = 1.0;
    cfg.dt_min = 0.2; // only one halving allowed
    cfg.energy_drift_tol = 1e-14;
    const Trajectory traj = evolve(e, cfg);
    CHECK(traj.termination.kind == Termination::Kind::dt_underflow);
}

TEST_CASE("perturbation of zero rides the equilibrium exactly") {
    TorusGrid g(1, 16);
    EquilibriumSpec eq;
    eq.grid = g;
    eq.coefficients = {{{0, 0, 0}, {0.5, 0.0}}, {{1, 0, 0}, {0.3, 0.0}}};
    std::vector<Field> z_eq(2, Field(g, Space::physical));
    EvolutionConfig cfg;
    cfg.dt = 5e-3;
    cfg.t_end = 0.2;
    const Trajectory traj = evolve_perturbed(z_eq, {}, eq, cfg);
    REQUIRE(traj.termination.kind == Termination::Kind::completed);
    for (const auto& r : traj.records) {
        REQUIRE(r.modE.has_value());
        CHECK(std::abs(*r.A) < 1e-10);
        CHECK(std::abs(*r.B) < 1e-10);
        CHECK(std::abs(*r.D) < 1e-10);
        CHECK(std::abs(*r.E) < 1e-10);
        CHECK(std::abs(*r.modE) < 1e-10);
    }
}

TEST_CASE("perturbed runs carry coercive modified energy") {
    TorusGrid g(1, 16);
    EquilibriumSpec eq;
    eq.grid = g;
    eq.coefficients = {{{0, 0, 0}, {0.6, 0.0}}, {{1, 0, 0}, {0.0, 0.35}}};
    const double m = eq.mass_level();

    GaussianStream s(77, 0);
    std::vector<Field> z_eq;
    for (std::size_t n = 0; n < 2; ++n) {
        GaussianStream sn = s.derived(n);
        Field z = Field::random_bandlimited(g, sn, 2, 1.0);
        for (auto& c : z.data()) c *= 1e-2;
        z_eq.push_back(ifft(z));
    }
    GaussianStream sx = s.derived(100);
    Field zx = Field::random_bandlimited(g, sx, 2, 1.0);
    for (auto& c : zx.data()) c *= 1e-2;

    EvolutionConfig cfg;
    cfg.dt = 2e-3;
    cfg.t_end = 0.3;
    const Trajectory traj = evolve_perturbed(z_eq, {ifft(zx)}, eq, cfg);
    REQUIRE(traj.termination.kind == Termination::Kind::completed);
    for (const auto& r : traj.records) {
        REQUIRE(r.A.has_value());
        const double bound = std::sqrt(m) * std::sqrt(*r.B) * std::sqrt(*r.E);
        CHECK(std::abs(*r.D) <= bound + 1e-15);
        CHECK(*r.modE >= *r.A + 0.5 * *r.B - 1e-15);
        CHECK(*r.A >= 0.0);
        CHECK(*r.B >= 0.0);
        CHECK(*r.E >= 0.0);
    }
    // t = 0 terms match a direct evaluation
    const auto terms = modified_energy(z_eq, {ifft(zx)}, eq, 0.0);
    CHECK(*traj.records.front().A == doctest::Approx(terms.A).epsilon(1e-12));
    CHECK(*traj.records.front().modE == doctest::Approx(terms.total).epsilon(1e-12));
}

TEST_CASE("morawetz accumulator is the integral of density_L4") {
    TorusGrid g(1, 16);
    EquilibriumSpec eq;
    eq.grid = g;
    eq.coefficients = {{{1, 0, 0}, {0.4, 0.0}}, {{-1, 0, 0}, {0.0, 0.3}}};
    EvolutionConfig cfg;
    cfg.dt = 1e-2;
    cfg.t_end = 0.5;
    const Trajectory traj = evolve(build_equilibrium(eq), cfg);
    const auto acc = morawetz_accumulator(traj);
    REQUIRE(acc.size() == traj.records.size());
    CHECK(acc.front() == 0.0);
    const double m = eq.mass_level();
    const double expected_rate = m * m * g.volume();
    CHECK(acc.back() == doctest::Approx(0.5 * expected_rate).epsilon(1e-9));
}

TEST_CASE("scatter cauchy of identical snapshots vanishes") {
    TorusGrid g(1, 16);
    EvolutionConfig cfg;
    cfg.dt = 1e-2;
    cfg.t_end = 0.1;
    RecordingOptions opts;
    opts.snapshots = true;
    const Trajectory traj = evolve(generic_two_modes(g), cfg, opts);
    CHECK(scatter_cauchy(traj, 0.05, 0.05) == 0.0);
    CHECK(scatter_cauchy(traj, 0.05, 0.1) > 0.0);
    CHECK_THROWS_AS((void)scatter_cauchy(traj, 0.033, 0.1), std::invalid_argument);
}
