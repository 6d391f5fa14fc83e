#include "enls/dynamics.hpp"

#include <cmath>
#include <string>

namespace enls {

void EvolutionConfig::validate() const {
    if (sign != 1.0 && sign != -1.0)
        throw std::invalid_argument("EvolutionConfig: sign must be +1 or -1");
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw std::invalid_argument("EvolutionConfig: dt must be positive and finite");
    if (!(t_end >= 0.0) || !std::isfinite(t_end))
        throw std::invalid_argument("EvolutionConfig: t_end must be >= 0 and finite");
    if (!(dt_min > 0.0) || dt_min > dt)
        throw std::invalid_argument("EvolutionConfig: dt_min must satisfy 0 < dt_min <= dt");
    if (!(h1_ceiling > 0.0))
        throw std::invalid_argument("EvolutionConfig: h1_ceiling must be positive");
    if (record_every < 1)
        throw std::invalid_argument("EvolutionConfig: record_every must be >= 1");
    if (!(energy_drift_tol > 0.0))
        throw std::invalid_argument("EvolutionConfig: energy_drift_tol must be positive");
}

const ModeEnsemble& Trajectory::snapshot_at(double t) const {
    for (std::size_t i = 0; i < snapshot_times.size(); ++i)
        if (std::abs(snapshot_times[i] - t) <= 1e-9 * std::max(1.0, std::abs(t)))
            return snapshots[i];
    throw std::invalid_argument("Trajectory: no snapshot at t = " + std::to_string(t));
}

namespace {

// dealiased density of the current modes (physical, real)
Field filtered_density(const ModeEnsemble& state) {
    Field rho = exact_density(state);
    Field out = ifft(low_pass_two_thirds(fft(rho)));
    for (auto& c : out.data()) c = std::complex<double>(c.real(), 0.0);
    return out;
}

// multiply every mode by exp(-i factor rho(x)) pointwise
void apply_potential_phase(ModeEnsemble& state, const Field& rho, double factor) {
    const std::size_t npts = state.grid.total();
    std::vector<std::complex<double>> phase(npts);
    for (std::size_t i = 0; i < npts; ++i)
        phase[i] = std::polar(1.0, -factor * rho[i].real());
    for (auto& u : state.modes) {
        if (u.space() != Space::physical) u = to_space(u, Space::physical);
        for (std::size_t i = 0; i < npts; ++i) u[i] *= phase[i];
    }
}

// in-place Strang step; returns the post-step density (exact: the trailing
// phase multiply leaves |X| pointwise unchanged)
Field strang_step_inplace(ModeEnsemble& state, double dt, double sign) {
    Field rho = filtered_density(state);
    apply_potential_phase(state, rho, sign * 0.5 * dt);
    for (auto& u : state.modes) u = apply_semigroup(u, dt, 0.0);
    rho = filtered_density(state);
    apply_potential_phase(state, rho, sign * 0.5 * dt);
    return rho;
}

DiagnosticsRecord make_record(double t, const ModeEnsemble& state, const Field& rho,
                              double sign, const RecordingOptions& opts) {
    DiagnosticsRecord r;
    r.t = t;
    r.mass = ensemble_mass(state);
    r.h1_sq = ensemble_sobolev_sq(state, 1.0);
    r.density_L4 = density_l4(rho);
    r.energy = 0.5 * r.h1_sq + sign * 0.25 * r.density_L4;
    if (opts.virial) {
        r.virial = virial(state, opts.virial_center);
        r.virial_rate = virial_rate(state, opts.virial_center);
    }
    return r;
}

using EnrichFn = std::function<void(double, const ModeEnsemble&, DiagnosticsRecord&)>;

Trajectory evolve_impl(ModeEnsemble state, const EvolutionConfig& cfg,
                       const RecordingOptions& opts, const EnrichFn& enrich) {
    cfg.validate();
    state.validate();
    for (auto& u : state.modes) u = to_space(u, Space::physical);

    Trajectory traj;
    traj.grid = state.grid;
    auto record = [&](double t, const Field& rho) {
        DiagnosticsRecord r = make_record(t, state, rho, cfg.sign, opts);
        if (enrich) enrich(t, state, r);
        traj.records.push_back(r);
        if (opts.snapshots) {
            traj.snapshot_times.push_back(t);
            traj.snapshots.push_back(state);
        }
    };

    Field rho0 = exact_density(state);
    record(0.0, rho0);
    const double e0 = traj.records.front().energy;
    const double drift_scale = std::max(1.0, std::abs(e0));
    double e_prev = e0;

    double t = 0.0;
    double dt = cfg.dt;
    long accepted = 0;
    const double t_tail = 1e-12 * std::max(1.0, cfg.t_end);

    while (t < cfg.t_end - t_tail) {
        const double dt_eff = std::min(dt, cfg.t_end - t);
        ModeEnsemble candidate = state;
        Field rho = strang_step_inplace(candidate, dt_eff, cfg.sign);

        const double h1_sq = ensemble_sobolev_sq(candidate, 1.0);
        if (!std::isfinite(h1_sq))
            throw NumericalError("evolve: non-finite H^1 norm at t = " + std::to_string(t));
        const double e_new = 0.5 * h1_sq + cfg.sign * 0.25 * density_l4(rho);

        if (std::sqrt(h1_sq) >= cfg.h1_ceiling) {
            // blow-up trigger wins over the drift trigger on the same step
            state = std::move(candidate);
            t += dt_eff;
            record(t, rho);
            traj.termination = {Termination::Kind::blow_up, t};
            return traj;
        }

        if (std::abs(e_new - e_prev) > cfg.energy_drift_tol * drift_scale) {
            if (0.5 * dt >= cfg.dt_min) {
                dt *= 0.5;
                continue;
            }
            if (traj.records.back().t < t - t_tail) record(t, exact_density(state));
            traj.termination = {Termination::Kind::dt_underflow, t};
            return traj;
        }

        state = std::move(candidate);
        t += dt_eff;
        e_prev = e_new;
        ++accepted;
        if (accepted % cfg.record_every == 0 || t >= cfg.t_end - t_tail) record(t, rho);
    }

    if (traj.records.back().t < t - t_tail) record(t, exact_density(state));
    traj.termination = {Termination::Kind::completed, t};
    return traj;
}

} // namespace

ModeEnsemble strang_step(const ModeEnsemble& state, double dt, double sign) {
    state.validate();
    ModeEnsemble out = state;
    for (auto& u : out.modes) u = to_space(u, Space::physical);
    strang_step_inplace(out, dt, sign);
    return out;
}

MonteCarloEnsemble strang_step(const MonteCarloEnsemble& state, double dt, double sign) {
    // realizations evolve as a weight-1/J mode system: identical common
    // density, identical linear flow
    ModeEnsemble view;
    view.grid = state.grid;
    view.weights.assign(state.count(), 1.0 / static_cast<double>(state.count()));
    view.modes = state.realizations;
    strang_step_inplace(view, dt, sign);
    MonteCarloEnsemble out;
    out.grid = state.grid;
    out.realizations = std::move(view.modes);
    return out;
}

Trajectory evolve(const ModeEnsemble& init, const EvolutionConfig& cfg,
                  const RecordingOptions& opts) {
    return evolve_impl(init, cfg, opts, EnrichFn{});
}

Trajectory evolve_perturbed(const std::vector<Field>& z_eq, const std::vector<Field>& z_extra,
                            const EquilibriumSpec& eq, const EvolutionConfig& cfg,
                            const RecordingOptions& opts) {
    eq.validate();
    if (z_eq.size() != eq.coefficients.size())
        throw std::invalid_argument("evolve_perturbed: z_eq must align with eq.coefficients");

    ModeEnsemble combined;
    combined.grid = eq.grid;
    const std::size_t n_eq = z_eq.size();
    for (std::size_t n = 0; n < n_eq; ++n) {
        Field c = equilibrium_wave(eq, n, 0.0);
        const Field z = to_space(z_eq[n], Space::physical);
        for (std::size_t i = 0; i < c.size(); ++i) c[i] += z[i];
        combined.weights.push_back(1.0);
        combined.modes.push_back(std::move(c));
    }
    for (const auto& z : z_extra) {
        combined.weights.push_back(1.0);
        combined.modes.push_back(to_space(z, Space::physical));
    }

    EnrichFn enrich = [&eq, n_eq](double t, const ModeEnsemble& state, DiagnosticsRecord& r) {
        std::vector<Field> ze;
        ze.reserve(n_eq);
        for (std::size_t n = 0; n < n_eq; ++n) {
            Field z = to_space(state.modes[n], Space::physical);
            const Field y = equilibrium_wave(eq, n, t);
            for (std::size_t i = 0; i < z.size(); ++i) z[i] -= y[i];
            ze.push_back(std::move(z));
        }
        std::vector<Field> zx(state.modes.begin() + static_cast<std::ptrdiff_t>(n_eq),
                              state.modes.end());
        ModifiedEnergyTerms terms = modified_energy(ze, zx, eq, t);
        r.A = terms.A;
        r.B = terms.B;
        r.D = terms.D;
        r.E = terms.E;
        r.modE = terms.total;
    };

    return evolve_impl(std::move(combined), cfg, opts, enrich);
}

VirialCheckResult virial_second_derivative_check(const Trajectory& traj, double sign,
                                                 double energy0, double bound_tol) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < traj.records.size(); ++i)
        if (traj.records[i].virial.has_value()) idx.push_back(i);
    if (idx.size() < 5)
        throw std::invalid_argument(
            "virial_second_derivative_check: need at least 5 records with the virial column");
    const double h = traj.records[idx[1]].t - traj.records[idx[0]].t;
    for (std::size_t j = 1; j < idx.size(); ++j) {
        const double step = traj.records[idx[j]].t - traj.records[idx[j - 1]].t;
        if (std::abs(step - h) > 1e-9 * std::max(1.0, std::abs(h)))
            throw std::invalid_argument(
                "virial_second_derivative_check: record times are not uniformly spaced");
    }

    double scale = 1e-12;
    std::vector<double> fd(idx.size(), 0.0), closed(idx.size(), 0.0);
    for (std::size_t j = 1; j + 1 < idx.size(); ++j) {
        const auto& rm = traj.records[idx[j - 1]];
        const auto& r0 = traj.records[idx[j]];
        const auto& rp = traj.records[idx[j + 1]];
        fd[j] = (*rp.virial - 2.0 * *r0.virial + *rm.virial) / (h * h);
        const double kin = r0.h1_sq - r0.mass;
        closed[j] = 8.0 * kin + sign * 2.0 * traj.grid.dim() * r0.density_L4;
        scale = std::max(scale, std::abs(closed[j]));
    }

    VirialCheckResult res{0.0, -std::numeric_limits<double>::infinity(), 16.0 * energy0, true};
    for (std::size_t j = 1; j + 1 < idx.size(); ++j) {
        res.max_rel_residual = std::max(res.max_rel_residual, std::abs(fd[j] - closed[j]) / scale);
        res.max_second_derivative = std::max(res.max_second_derivative, fd[j]);
        if (fd[j] > res.bound + bound_tol * std::abs(energy0)) res.bound_satisfied = false;
    }
    return res;
}

std::vector<double> morawetz_accumulator(const Trajectory& traj) {
    std::vector<double> acc(traj.records.size(), 0.0);
    for (std::size_t i = 1; i < traj.records.size(); ++i) {
        const auto& a = traj.records[i - 1];
        const auto& b = traj.records[i];
        acc[i] = acc[i - 1] + 0.5 * (a.density_L4 + b.density_L4) * (b.t - a.t);
    }
    return acc;
}

double scatter_cauchy(const Trajectory& traj, double t1, double t2) {
    return scatter_cauchy(traj.snapshot_at(t1), t1, traj.snapshot_at(t2), t2);
}

} // namespace enls
