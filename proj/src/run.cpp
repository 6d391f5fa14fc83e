#include "enls/run.hpp"

#include "enls/operator_flow.hpp"
#include "enls/rng.hpp"
#include "enls/sphere.hpp"
#include "enls/threading.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>

namespace enls {

namespace {

double get_number(const json& j, const char* key, std::optional<double> fallback = {}) {
    if (!j.is_object() || !j.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError(std::string("missing required key '") + key + "'");
    }
    if (!j.at(key).is_number()) throw ConfigError(std::string("key '") + key + "' must be a number");
    return j.at(key).get<double>();
}

long get_integer(const json& j, const char* key, std::optional<long> fallback = {}) {
    if (!j.is_object() || !j.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError(std::string("missing required key '") + key + "'");
    }
    if (!j.at(key).is_number_integer())
        throw ConfigError(std::string("key '") + key + "' must be an integer");
    return j.at(key).get<long>();
}

const json& require_block(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key))
        throw ConfigError(std::string("missing '") + key + "' block");
    return j.at(key);
}

bool get_bool(const json& j, const char* key, bool fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    if (!j.at(key).is_boolean())
        throw ConfigError(std::string("key '") + key + "' must be a boolean");
    return j.at(key).get<bool>();
}

std::string get_string(const json& j, const char* key, std::optional<std::string> fallback = {}) {
    if (!j.is_object() || !j.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError(std::string("missing required key '") + key + "'");
    }
    if (!j.at(key).is_string())
        throw ConfigError(std::string("key '") + key + "' must be a string");
    return j.at(key).get<std::string>();
}

EvolutionConfig parse_evolution(const json& cfg) {
    if (!cfg.contains("evolution")) throw ConfigError("missing 'evolution' block");
    const json& e = cfg.at("evolution");
    EvolutionConfig ev;
    ev.sign = get_number(e, "sign", 1.0);
    ev.dt = get_number(e, "dt");
    ev.t_end = get_number(e, "t_end");
    ev.dt_min = get_number(e, "dt_min", std::min(1e-9, ev.dt));
    ev.h1_ceiling = get_number(e, "h1_ceiling", std::numeric_limits<double>::infinity());
    ev.record_every = static_cast<int>(get_integer(e, "record_every", 1));
    ev.energy_drift_tol = get_number(e, "energy_drift_tol", 1e-6);
    try {
        ev.validate();
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(std::string("evolution: ") + ex.what());
    }
    return ev;
}

std::array<double, 3> parse_center(const json& j, const TorusGrid& grid, const char* key) {
    std::array<double, 3> c{0.0, 0.0, 0.0};
    if (!j.is_object() || !j.contains(key)) return c;
    const json& arr = j.at(key);
    if (!arr.is_array() || arr.size() != static_cast<std::size_t>(grid.dim()))
        throw ConfigError(std::string("'") + key + "' must list one coordinate per grid axis");
    for (std::size_t a = 0; a < arr.size(); ++a) {
        if (!arr[a].is_number()) throw ConfigError(std::string("'") + key + "' entries must be numbers");
        c[a] = arr[a].get<double>();
    }
    return c;
}

EquilibriumSpec parse_equilibrium_initial(const json& initial, const TorusGrid& grid) {
    if (!initial.contains("coefficients"))
        throw ConfigError("initial: equilibrium requires 'coefficients'");
    json eqj{{"grid", grid_to_json(grid)}, {"coefficients", initial.at("coefficients")}};
    return equilibrium_from_json(eqj);
}

struct InitialData {
    ModeEnsemble ensemble;
    std::optional<EquilibriumSpec> equilibrium;
    std::array<double, 3> bump_center{0.0, 0.0, 0.0};
    std::string type;
};

InitialData parse_initial(const json& cfg, const TorusGrid& grid,
                          const std::filesystem::path& config_dir) {
    if (!cfg.contains("initial")) throw ConfigError("missing 'initial' block");
    const json& init = cfg.at("initial");
    InitialData out;
    out.type = get_string(init, "type");
    if (out.type == "equilibrium") {
        out.equilibrium = parse_equilibrium_initial(init, grid);
        out.ensemble = build_equilibrium(*out.equilibrium);
    } else if (out.type == "modes") {
        if (init.contains("file")) {
            const json ej = load_json_file(config_dir / get_string(init, "file"));
            out.ensemble = ensemble_from_json(ej);
        } else {
            json ej{{"grid", grid_to_json(grid)},
                    {"weights", init.contains("weights") ? init.at("weights") : json::array()},
                    {"modes", init.contains("modes") ? init.at("modes") : json::array()}};
            out.ensemble = ensemble_from_json(ej);
        }
        if (out.ensemble.grid != grid)
            throw ConfigError("initial: ensemble grid does not match the run grid");
        if (out.ensemble.rank() == 0) throw ConfigError("initial: ensemble has no modes");
    } else if (out.type == "bump") {
        const double amplitude = get_number(init, "amplitude");
        const double width = get_number(init, "width");
        const double weight = get_number(init, "weight", 1.0);
        out.bump_center = parse_center(init, grid, "center");
        out.ensemble.grid = grid;
        out.ensemble.weights.push_back(weight);
        out.ensemble.modes.push_back(Field::gaussian_bump(grid, out.bump_center, width, amplitude));
    } else {
        throw ConfigError("initial.type must be 'equilibrium', 'modes' or 'bump'");
    }
    return out;
}

RecordingOptions parse_recording(const json& cfg, const InitialData& init, const TorusGrid& grid) {
    RecordingOptions opts;
    if (!cfg.contains("recording")) {
        opts.virial_center = init.bump_center;
        return opts;
    }
    const json& r = cfg.at("recording");
    opts.virial = get_bool(r, "virial", false);
    opts.snapshots = get_bool(r, "snapshots", false);
    opts.virial_center = r.contains("center") ? parse_center(r, grid, "center") : init.bump_center;
    return opts;
}

const char* termination_name(Termination::Kind k) {
    switch (k) {
        case Termination::Kind::completed: return "completed";
        case Termination::Kind::blow_up: return "blow_up";
        default: return "dt_underflow";
    }
}

json termination_json(const Termination& t) {
    return json{{"kind", termination_name(t.kind)}, {"t", t.t_star}};
}

json conservation_summary(const Trajectory& traj) {
    const auto& r0 = traj.records.front();
    double mass_drift = 0.0, energy_drift = 0.0;
    for (const auto& r : traj.records) {
        mass_drift = std::max(mass_drift, std::abs(r.mass - r0.mass));
        energy_drift = std::max(energy_drift, std::abs(r.energy - r0.energy));
    }
    return json{{"mass_drift", mass_drift},
                {"energy_drift", energy_drift},
                {"relative_energy_drift", energy_drift / std::max(1.0, std::abs(r0.energy))}};
}

// least-squares slope of log(y) against log(x)
std::optional<double> log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) return std::nullopt;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::nullopt;
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(x.size());
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) return std::nullopt;
    return (n * sxy - sx * sy) / denom;
}

// ---------------------------------------------------------------- simulate

json run_simulate(const json& cfg, const std::filesystem::path& out_dir, int& exit_code) {
    const TorusGrid grid = grid_from_json(require_block(cfg, "grid"));
    const EvolutionConfig ev = parse_evolution(cfg);
    const InitialData init = parse_initial(cfg, grid, out_dir.parent_path());
    const RecordingOptions opts = parse_recording(cfg, init, grid);

    ModeEnsemble state = init.ensemble;
    const json& method = cfg.contains("method") ? cfg.at("method") : json{{"type", "modes"}};
    const std::string method_type = get_string(method, "type", std::string("modes"));
    if (method_type == "monte-carlo") {
        const long J = get_integer(method, "realizations");
        if (J < 1) throw ConfigError("method.realizations must be >= 1");
        GaussianStream stream(static_cast<std::uint64_t>(get_integer(cfg, "seed", 0)),
                              static_cast<std::uint64_t>(get_integer(cfg, "stream_id", 0)));
        MonteCarloEnsemble mc = sample_gaussian(state, static_cast<std::size_t>(J), stream);
        state.weights.assign(mc.count(), 1.0 / static_cast<double>(mc.count()));
        state.modes = std::move(mc.realizations);
    } else if (method_type != "modes") {
        throw ConfigError("method.type must be 'modes' or 'monte-carlo'");
    }

    const Trajectory traj = evolve(state, ev, opts);
    write_diagnostics_csv(out_dir / "diagnostics.csv", traj.records);

    json summary{{"termination", termination_json(traj.termination)},
                 {"conservation", conservation_summary(traj)},
                 {"records", traj.records.size()},
                 {"method", method_type}};
    exit_code = traj.termination.kind == Termination::Kind::completed ? exit_ok : exit_numerical;
    summary["status"] = exit_code == exit_ok ? "ok" : "numerical_error";
    return summary;
}

// -------------------------------------------------------- equilibrium-check

json run_equilibrium_check(const json& cfg, const std::filesystem::path& out_dir,
                           int& exit_code) {
    const TorusGrid grid = grid_from_json(require_block(cfg, "grid"));
    const EvolutionConfig ev = parse_evolution(cfg);
    const InitialData init = parse_initial(cfg, grid, out_dir.parent_path());
    if (!init.equilibrium)
        throw ConfigError("equilibrium-check requires initial.type == 'equilibrium'");
    const EquilibriumSpec& eq = *init.equilibrium;
    const int halvings = static_cast<int>(get_integer(cfg, "halvings", 2));
    if (halvings < 1 || halvings > 12) throw ConfigError("halvings must be in [1, 12]");

    const double m = eq.mass_level();
    double density_sup = 0.0;
    std::vector<double> dts, phase_errors;
    json per_dt = json::array();
    std::vector<DiagnosticsRecord> reference_records;

    for (int h = 0; h <= halvings; ++h) {
        EvolutionConfig evh = ev;
        evh.dt = ev.dt / std::pow(2.0, h);
        RecordingOptions opts;
        opts.snapshots = true;
        const Trajectory traj = evolve(build_equilibrium(eq), evh, opts);
        if (traj.termination.kind != Termination::Kind::completed)
            throw NumericalError("equilibrium-check: evolution did not complete");
        if (h == 0) reference_records = traj.records;

        for (const auto& snap : traj.snapshots) {
            const Field rho = exact_density(snap);
            for (std::size_t i = 0; i < rho.size(); ++i)
                density_sup = std::max(density_sup, std::abs(rho[i].real() - m));
        }

        const double t_final = traj.records.back().t;
        const auto phases = equilibrium_phases(eq, t_final);
        const ModeEnsemble& final_state = traj.snapshots.back();
        double max_err = 0.0;
        for (std::size_t n = 0; n < eq.coefficients.size(); ++n) {
            const Field hat = fft(to_space(final_state.modes[n], Space::physical));
            const std::complex<double> got = hat[grid.index_of_mode(eq.coefficients[n].k)];
            const std::complex<double> want =
                std::sqrt(grid.volume()) *
                (eq.coefficients[n].a / std::abs(eq.coefficients[n].a)) * phases[n];
            max_err = std::max(max_err, std::abs(got - want) / std::abs(want));
        }
        dts.push_back(evh.dt);
        phase_errors.push_back(max_err);
        per_dt.push_back(json{{"dt", evh.dt}, {"max_phase_error", max_err}});
    }

    write_diagnostics_csv(out_dir / "diagnostics.csv", reference_records);

    const bool exact = *std::max_element(phase_errors.begin(), phase_errors.end()) < 1e-10;
    std::optional<double> slope = exact ? std::nullopt : log_log_slope(dts, phase_errors);
    const bool density_ok = density_sup < 1e-6;
    const bool slope_ok = exact || (slope && std::abs(*slope - 2.0) <= 0.1);

    json summary{{"density_level", m},
                 {"density_sup_drift", density_sup},
                 {"phase_errors", per_dt},
                 {"exact_preservation", exact},
                 {"pass", density_ok && slope_ok}};
    summary["phase_error_slope"] = slope ? json(*slope) : json(nullptr);
    exit_code = (density_ok && slope_ok) ? exit_ok : exit_numerical;
    summary["status"] = exit_code == exit_ok ? "ok" : "numerical_error";
    return summary;
}

// ----------------------------------------------------------------- perturbed

json run_perturbed(const json& cfg, const std::filesystem::path& out_dir, int& exit_code) {
    const TorusGrid grid = grid_from_json(require_block(cfg, "grid"));
    const EvolutionConfig ev = parse_evolution(cfg);
    const InitialData init = parse_initial(cfg, grid, out_dir.parent_path());
    if (!init.equilibrium) throw ConfigError("perturbed requires initial.type == 'equilibrium'");
    const EquilibriumSpec& eq = *init.equilibrium;

    const json& pert = cfg.contains("perturbation") ? cfg.at("perturbation") : json::object();
    std::vector<Field> z_eq, z_extra;
    if (pert.contains("z_eq") || pert.contains("z_extra")) {
        if (pert.contains("z_eq"))
            for (const auto& fj : pert.at("z_eq")) z_eq.push_back(field_from_json(grid, fj));
        if (pert.contains("z_extra"))
            for (const auto& fj : pert.at("z_extra")) z_extra.push_back(field_from_json(grid, fj));
        if (z_eq.size() != eq.coefficients.size())
            throw ConfigError("perturbation.z_eq must align with the equilibrium coefficients");
    } else {
        const double amplitude = get_number(pert, "amplitude", 1e-3);
        const int kmax = static_cast<int>(
            get_integer(pert, "kmax", std::min<long>(2, grid.n() / 3)));
        const long extra = get_integer(pert, "extra", 1);
        GaussianStream stream(static_cast<std::uint64_t>(get_integer(cfg, "seed", 0)),
                              static_cast<std::uint64_t>(get_integer(cfg, "stream_id", 0)));
        for (std::size_t n = 0; n < eq.coefficients.size(); ++n) {
            GaussianStream sn = stream.derived(n);
            Field z = Field::random_bandlimited(grid, sn, kmax, 1.5);
            for (auto& c : z.data()) c *= amplitude;
            z_eq.push_back(ifft(z));
        }
        for (long i = 0; i < extra; ++i) {
            GaussianStream sn = stream.derived(1000 + static_cast<std::uint64_t>(i));
            Field z = Field::random_bandlimited(grid, sn, kmax, 1.5);
            for (auto& c : z.data()) c *= amplitude;
            z_extra.push_back(ifft(z));
        }
    }

    const Trajectory traj = evolve_perturbed(z_eq, z_extra, eq, ev);
    write_diagnostics_csv(out_dir / "diagnostics.csv", traj.records);

    const double m = eq.mass_level();
    bool cross_ok = true, lower_ok = true;
    double worst_cross_margin = std::numeric_limits<double>::infinity();
    double worst_lower_margin = std::numeric_limits<double>::infinity();
    double mod_e0 = *traj.records.front().modE;
    double mod_drift = 0.0;
    for (const auto& r : traj.records) {
        const double bound = std::sqrt(m) * std::sqrt(*r.B) * std::sqrt(*r.E);
        const double scale = std::max({1e-300, std::abs(*r.modE), bound});
        worst_cross_margin = std::min(worst_cross_margin, (bound - std::abs(*r.D)) / scale);
        if (std::abs(*r.D) > bound + 1e-12 * scale) cross_ok = false;
        const double lower = *r.A + 0.5 * *r.B;
        worst_lower_margin = std::min(worst_lower_margin, (*r.modE - lower) / scale);
        if (*r.modE < lower - 1e-12 * scale) lower_ok = false;
        mod_drift = std::max(mod_drift, std::abs(*r.modE - mod_e0));
    }

    json summary{{"termination", termination_json(traj.termination)},
                 {"cross_term_bound_holds", cross_ok},
                 {"cross_term_worst_margin", worst_cross_margin},
                 {"lower_bound_holds", lower_ok},
                 {"lower_bound_worst_margin", worst_lower_margin},
                 {"modified_energy_initial", mod_e0},
                 {"modified_energy_drift", mod_drift},
                 {"conservation", conservation_summary(traj)}};
    const bool ok =
        cross_ok && lower_ok && traj.termination.kind == Termination::Kind::completed;
    exit_code = ok ? exit_ok : exit_numerical;
    summary["status"] = ok ? "ok" : "numerical_error";
    return summary;
}

// ------------------------------------------------------------------- blowup

json run_blowup(const json& cfg, const std::filesystem::path& out_dir, int& exit_code) {
    const TorusGrid grid = grid_from_json(require_block(cfg, "grid"));
    EvolutionConfig ev = parse_evolution(cfg);
    if (ev.sign != -1.0) throw ConfigError("blowup requires evolution.sign == -1 (focusing)");
    const InitialData init = parse_initial(cfg, grid, out_dir.parent_path());

    RecordingOptions opts = parse_recording(cfg, init, grid);
    opts.virial = true;

    const double e0 = energy(init.ensemble, ev.sign);
    const double v0 = virial(init.ensemble, opts.virial_center);
    const double vp0 = virial_rate(init.ensemble, opts.virial_center);

    // first positive root of the majorant V(0) + V'(0) t + 8 E t^2
    double bound_time = std::numeric_limits<double>::quiet_NaN();
    if (e0 < 0.0) {
        const double a = 8.0 * e0, b = vp0, c = v0;
        const double disc = b * b - 4.0 * a * c;
        if (disc >= 0.0) {
            const double r1 = (-b + std::sqrt(disc)) / (2.0 * a);
            const double r2 = (-b - std::sqrt(disc)) / (2.0 * a);
            bound_time = std::numeric_limits<double>::infinity();
            if (r1 > 0.0) bound_time = std::min(bound_time, r1);
            if (r2 > 0.0) bound_time = std::min(bound_time, r2);
        }
    }

    if (!std::isfinite(ev.h1_ceiling))
        ev.h1_ceiling = 10.0 * std::sqrt(ensemble_sobolev_sq(init.ensemble, 1.0));
    if (!(ev.t_end > 0.0) && std::isfinite(bound_time)) ev.t_end = 2.0 * bound_time;

    const Trajectory traj = evolve(init.ensemble, ev, opts);
    write_diagnostics_csv(out_dir / "diagnostics.csv", traj.records);

    const bool blew_up = traj.termination.kind == Termination::Kind::blow_up;
    const bool before_bound = blew_up && std::isfinite(bound_time) &&
                              traj.termination.t_star <= bound_time * (1.0 + 1e-9);
    json summary{{"energy", e0},
                 {"virial_initial", v0},
                 {"virial_rate_initial", vp0},
                 {"h1_ceiling", ev.h1_ceiling},
                 {"termination", termination_json(traj.termination)},
                 {"blow_up_before_bound", before_bound}};
    summary["virial_bound_time"] =
        std::isfinite(bound_time) ? json(bound_time) : json(nullptr);
    exit_code = before_bound ? exit_ok : exit_numerical;
    summary["status"] = before_bound ? "ok" : "numerical_error";
    return summary;
}

// ------------------------------------------------------------- sphere-lemma

json run_sphere_lemma(const json& cfg, const std::filesystem::path& out_dir, int& exit_code) {
    const int nmax = static_cast<int>(get_integer(cfg, "nmax", 16));
    if (nmax < 0 || nmax > 32) throw ConfigError("nmax must be in [0, 32]");
    const int sample_points = static_cast<int>(get_integer(cfg, "sample_points", 500));
    const json& quad = cfg.contains("quadrature") ? cfg.at("quadrature") : json::object();
    const int n_theta = static_cast<int>(get_integer(quad, "n_theta", nmax + 1));
    const int n_phi = static_cast<int>(get_integer(quad, "n_phi", 2 * nmax + 2));

    const SphereSample scan = fibonacci_sphere_sample(sample_points);
    json degrees = json::array();
    double worst_spread = 0.0, worst_mean_err = 0.0;
    for (int n = 0; n <= nmax; ++n) {
        const double expected =
            static_cast<double>(harmonic_dimension(n, 2)) / (4.0 * pi);
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0, sum = 0.0;
        for (const auto& p : scan.points) {
            const double v = kernel_sum(n, p);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            sum += v;
        }
        const double mean = sum / static_cast<double>(scan.points.size());
        const double spread = (hi - lo) / expected;
        const double mean_err = std::abs(mean - expected) / expected;
        worst_spread = std::max(worst_spread, spread);
        worst_mean_err = std::max(worst_mean_err, mean_err);
        degrees.push_back(json{{"degree", n},
                               {"dimension", harmonic_dimension(n, 2)},
                               {"eigenvalue", laplace_eigenvalue(n, 2)},
                               {"kernel_mean", mean},
                               {"kernel_spread_rel", spread},
                               {"kernel_mean_rel_error", mean_err}});
    }

    // Gram matrix of every harmonic up to nmax under the product quadrature
    const SphereSample quad_sample = gauss_legendre_sphere_sample(n_theta, n_phi);
    std::vector<std::vector<double>> values; // one row per harmonic
    for (int n = 0; n <= nmax; ++n) {
        const std::size_t count = 2 * static_cast<std::size_t>(n) + 1;
        std::vector<std::vector<double>> rows(count,
                                              std::vector<double>(quad_sample.points.size()));
        for (std::size_t p = 0; p < quad_sample.points.size(); ++p) {
            const auto y = real_harmonics(n, quad_sample.points[p]);
            for (std::size_t m = 0; m < count; ++m) rows[m][p] = y[m];
        }
        for (auto& r : rows) values.push_back(std::move(r));
    }
    double gram_residual = 0.0;
    for (std::size_t a = 0; a < values.size(); ++a)
        for (std::size_t b = a; b < values.size(); ++b) {
            double g = 0.0;
            for (std::size_t p = 0; p < quad_sample.points.size(); ++p)
                g += quad_sample.weights[p] * values[a][p] * values[b][p];
            gram_residual = std::max(gram_residual, std::abs(g - (a == b ? 1.0 : 0.0)));
        }

    write_diagnostics_csv(out_dir / "diagnostics.csv", {});
    const bool ok = worst_spread < 1e-9 && worst_mean_err < 1e-9 && gram_residual < 1e-8;
    json summary{{"nmax", nmax},
                 {"degrees", degrees},
                 {"kernel_worst_spread_rel", worst_spread},
                 {"kernel_worst_mean_rel_error", worst_mean_err},
                 {"gram_residual", gram_residual},
                 {"pass", ok}};
    exit_code = ok ? exit_ok : exit_numerical;
    summary["status"] = ok ? "ok" : "numerical_error";
    return summary;
}

// --------------------------------------------------------- operator-compare

json run_operator_compare(const json& cfg, const std::filesystem::path& out_dir,
                          int& exit_code) {
    const TorusGrid grid = grid_from_json(require_block(cfg, "grid"));
    const EvolutionConfig ev = parse_evolution(cfg);
    const InitialData init = parse_initial(cfg, grid, out_dir.parent_path());
    const int k_cut = static_cast<int>(get_integer(cfg, "k_cut", default_k_cut(grid)));
    const double tolerance = get_number(cfg, "tolerance", 1e-5);

    RecordingOptions opts;
    opts.snapshots = true;
    const Trajectory ensemble_traj = evolve(init.ensemble, ev, opts);
    if (ensemble_traj.termination.kind != Termination::Kind::completed)
        throw NumericalError("operator-compare: ensemble evolution did not complete");
    const OperatorTrajectory op_traj =
        evolve_operator(covariance_from_modes(init.ensemble, k_cut), ev);

    json table = json::array();
    double max_frob = 0.0;
    for (std::size_t i = 0; i < op_traj.times.size(); ++i) {
        const double t = op_traj.times[i];
        const ModeEnsemble& snap = ensemble_traj.snapshot_at(t);
        const CovarianceMatrix from_modes = covariance_from_modes(snap, k_cut);
        const double frob = covariance_distance(from_modes, op_traj.states[i]);
        const double bures = bures_wasserstein(from_modes, op_traj.states[i]);
        max_frob = std::max(max_frob, frob);
        table.push_back(json{{"t", t}, {"frobenius", frob}, {"bures", bures}});
    }

    write_diagnostics_csv(out_dir / "diagnostics.csv", ensemble_traj.records);
    const bool ok = max_frob <= tolerance;
    json summary{{"k_cut", k_cut},
                 {"tolerance", tolerance},
                 {"max_frobenius", max_frob},
                 {"table", table},
                 {"pass", ok}};
    exit_code = ok ? exit_ok : exit_numerical;
    summary["status"] = ok ? "ok" : "numerical_error";
    return summary;
}

// -------------------------------------------------------- scattering-probe

json run_scattering_probe(const json& cfg, const std::filesystem::path& out_dir,
                          int& exit_code) {
    const TorusGrid grid = grid_from_json(require_block(cfg, "grid"));
    const EvolutionConfig ev = parse_evolution(cfg);
    const InitialData init = parse_initial(cfg, grid, out_dir.parent_path());
    const std::string mode =
        get_string(cfg, "probe", init.type == "equilibrium" ? std::string("morawetz")
                                                            : std::string("cauchy"));

    if (mode == "morawetz") {
        if (!init.equilibrium)
            throw ConfigError("scattering-probe: morawetz probe requires an equilibrium initial");
        const Trajectory traj = evolve(init.ensemble, ev);
        write_diagnostics_csv(out_dir / "diagnostics.csv", traj.records);
        const auto acc = morawetz_accumulator(traj);
        std::vector<double> times;
        for (const auto& r : traj.records) times.push_back(r.t);
        // least-squares slope of the accumulator against time
        double st = 0, sa = 0, stt = 0, sta = 0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            st += times[i];
            sa += acc[i];
            stt += times[i] * times[i];
            sta += times[i] * acc[i];
        }
        const double n = static_cast<double>(times.size());
        const double rate = (n * sta - st * sa) / (n * stt - st * st);
        const double m = init.equilibrium->mass_level();
        const double expected = m * m * grid.volume();
        const double rel_err = std::abs(rate - expected) / expected;
        const bool ok = rel_err < 0.01 && traj.termination.kind == Termination::Kind::completed;
        json summary{{"probe", "morawetz"},
                     {"rate", rate},
                     {"expected_rate", expected},
                     {"rate_rel_error", rel_err},
                     {"termination", termination_json(traj.termination)},
                     {"pass", ok}};
        exit_code = ok ? exit_ok : exit_numerical;
        summary["status"] = ok ? "ok" : "numerical_error";
        return summary;
    }
    if (mode != "cauchy") throw ConfigError("probe must be 'cauchy' or 'morawetz'");

    RecordingOptions opts;
    opts.snapshots = true;
    Trajectory traj = evolve(init.ensemble, ev, opts);
    if (traj.termination.kind != Termination::Kind::completed)
        throw NumericalError("scattering-probe: evolution did not complete");

    json pairs = json::array();
    std::vector<double> cauchy_values;
    const double t_tol = 1e-9;
    for (std::size_t i = 0; i < traj.snapshot_times.size(); ++i) {
        const double t = traj.snapshot_times[i];
        if (t <= 0.0) continue;
        bool found = false;
        for (double t2 : traj.snapshot_times)
            if (std::abs(t2 - 2.0 * t) <= t_tol * std::max(1.0, 2.0 * t)) found = true;
        if (!found) continue;
        const double c = scatter_cauchy(traj, t, 2.0 * t);
        for (auto& rec : traj.records)
            if (std::abs(rec.t - t) <= t_tol * std::max(1.0, t)) rec.scatter_cauchy = c;
        pairs.push_back(json{{"t", t}, {"t2", 2.0 * t}, {"cauchy", c}});
        cauchy_values.push_back(c);
    }
    bool decreasing = cauchy_values.size() >= 2;
    for (std::size_t i = 1; i < cauchy_values.size(); ++i)
        if (cauchy_values[i] >= cauchy_values[i - 1]) decreasing = false;

    write_diagnostics_csv(out_dir / "diagnostics.csv", traj.records);
    json summary{{"probe", "cauchy"},
                 {"pairs", pairs},
                 {"decreasing", decreasing},
                 {"termination", termination_json(traj.termination)},
                 {"pass", decreasing}};
    exit_code = decreasing ? exit_ok : exit_numerical;
    summary["status"] = decreasing ? "ok" : "numerical_error";
    return summary;
}

} // namespace

RunResult run(const json& config, const std::filesystem::path& out_dir) {
    RunResult result;
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        result.exit_code = exit_io;
        result.summary = json{{"status", "io_error"}, {"error", ec.message()}};
        return result;
    }

    const auto started = std::chrono::steady_clock::now();
    std::string experiment = "unknown";
    try {
        experiment = get_string(config, "experiment");
        if (config.contains("threads"))
            set_thread_count(static_cast<int>(get_integer(config, "threads", 1)));
        if (experiment == "simulate")
            result.summary = run_simulate(config, out_dir, result.exit_code);
        else if (experiment == "equilibrium-check")
            result.summary = run_equilibrium_check(config, out_dir, result.exit_code);
        else if (experiment == "perturbed")
            result.summary = run_perturbed(config, out_dir, result.exit_code);
        else if (experiment == "blowup")
            result.summary = run_blowup(config, out_dir, result.exit_code);
        else if (experiment == "sphere-lemma")
            result.summary = run_sphere_lemma(config, out_dir, result.exit_code);
        else if (experiment == "operator-compare")
            result.summary = run_operator_compare(config, out_dir, result.exit_code);
        else if (experiment == "scattering-probe")
            result.summary = run_scattering_probe(config, out_dir, result.exit_code);
        else
            throw ConfigError("unknown experiment '" + experiment + "'");
    } catch (const ConfigError& e) {
        result.exit_code = exit_config;
        result.summary = json{{"status", "config_error"}, {"error", e.what()}};
    } catch (const std::invalid_argument& e) {
        result.exit_code = exit_config;
        result.summary = json{{"status", "config_error"}, {"error", e.what()}};
    } catch (const json::exception& e) {
        result.exit_code = exit_config;
        result.summary = json{{"status", "config_error"}, {"error", e.what()}};
    } catch (const NumericalError& e) {
        result.exit_code = exit_numerical;
        result.summary = json{{"status", "numerical_error"}, {"error", e.what()}};
    } catch (const IoError& e) {
        result.exit_code = exit_io;
        result.summary = json{{"status", "io_error"}, {"error", e.what()}};
    }

    result.summary["experiment"] = experiment;
    result.summary["elapsed_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (config.is_object() && config.contains("seed")) result.summary["seed"] = config.at("seed");
    try {
        write_json_file(out_dir / "summary.json", result.summary);
    } catch (const IoError&) {
        result.exit_code = exit_io;
    }
    return result;
}

json compare(const std::filesystem::path& run_a, const std::filesystem::path& run_b) {
    const auto rows_a = read_diagnostics_csv(run_a / "diagnostics.csv");
    const auto rows_b = read_diagnostics_csv(run_b / "diagnostics.csv");
    json report{{"rows_a", rows_a.size()}, {"rows_b", rows_b.size()}};
    if (rows_a.size() != rows_b.size()) {
        report["comparable"] = false;
        return report;
    }
    auto diff_opt = [](const std::optional<double>& x, const std::optional<double>& y) {
        if (!x && !y) return 0.0;
        if (!x || !y) return std::numeric_limits<double>::infinity();
        return std::abs(*x - *y);
    };
    json drift = json::object();
    double t_d = 0, mass_d = 0, energy_d = 0, h1_d = 0, rho4_d = 0;
    double vir_d = 0, rate_d = 0, a_d = 0, b_d = 0, dd = 0, e_d = 0, mod_d = 0, sc_d = 0;
    for (std::size_t i = 0; i < rows_a.size(); ++i) {
        const auto& a = rows_a[i];
        const auto& b = rows_b[i];
        t_d = std::max(t_d, std::abs(a.t - b.t));
        mass_d = std::max(mass_d, std::abs(a.mass - b.mass));
        energy_d = std::max(energy_d, std::abs(a.energy - b.energy));
        h1_d = std::max(h1_d, std::abs(a.h1_sq - b.h1_sq));
        rho4_d = std::max(rho4_d, std::abs(a.density_L4 - b.density_L4));
        vir_d = std::max(vir_d, diff_opt(a.virial, b.virial));
        rate_d = std::max(rate_d, diff_opt(a.virial_rate, b.virial_rate));
        a_d = std::max(a_d, diff_opt(a.A, b.A));
        b_d = std::max(b_d, diff_opt(a.B, b.B));
        dd = std::max(dd, diff_opt(a.D, b.D));
        e_d = std::max(e_d, diff_opt(a.E, b.E));
        mod_d = std::max(mod_d, diff_opt(a.modE, b.modE));
        sc_d = std::max(sc_d, diff_opt(a.scatter_cauchy, b.scatter_cauchy));
    }
    drift["t"] = t_d;
    drift["mass"] = mass_d;
    drift["energy"] = energy_d;
    drift["h1_sq"] = h1_d;
    drift["density_L4"] = rho4_d;
    drift["virial"] = vir_d;
    drift["virial_rate"] = rate_d;
    drift["A"] = a_d;
    drift["B"] = b_d;
    drift["D"] = dd;
    drift["E"] = e_d;
    drift["modE"] = mod_d;
    drift["scatter_cauchy"] = sc_d;
    report["comparable"] = true;
    report["max_abs_drift"] = drift;
    double overall = 0.0;
    for (const auto& [k, v] : drift.items()) overall = std::max(overall, v.get<double>());
    report["identical"] = overall == 0.0;
    return report;
}

} // namespace enls
