#include "enls/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

namespace enls {

double density_l4(const Field& rho) {
    const Field p = to_space(rho, Space::physical);
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) acc += p[i].real() * p[i].real();
    return acc * p.grid().cell_volume();
}

double energy(const ModeEnsemble& e, double sign) {
    return 0.5 * ensemble_sobolev_sq(e, 1.0) + sign * 0.25 * density_l4(exact_density(e));
}

double energy(const MonteCarloEnsemble& mc, double sign) {
    return 0.5 * empirical_sobolev_sq(mc, 1.0) + sign * 0.25 * density_l4(empirical_density(mc));
}

double kinetic_energy(const ModeEnsemble& e) {
    return ensemble_sobolev_sq(e, 1.0) - ensemble_mass(e);
}

double virial_cutoff_profile(double r) {
    if (r <= 1.0) return r * r;
    if (r >= 2.0) return 0.0;
    const double d = r - 2.0;
    return std::exp(1.0 - 1.0 / (d * d));
}

double virial_cutoff(double R, double r) { return R * R * virial_cutoff_profile(r / R); }

namespace {
double wrap_displacement(double x, double c, double L) {
    double d = std::fmod(x - c, L);
    if (d < -0.5 * L) d += L;
    if (d >= 0.5 * L) d -= L;
    return d;
}
}

double virial(const ModeEnsemble& e, const std::array<double, 3>& center) {
    const Field rho = exact_density(e);
    const TorusGrid& g = e.grid;
    const double R = 0.25 * g.length();
    double acc = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        auto x = g.coords(i);
        double r2 = 0.0;
        for (int a = 0; a < g.dim(); ++a) {
            double d = wrap_displacement(x[a], center[a], g.length());
            r2 += d * d;
        }
        acc += virial_cutoff(R, std::sqrt(r2)) * rho[i].real();
    }
    return acc * g.cell_volume();
}

double virial_rate(const ModeEnsemble& e, const std::array<double, 3>& center) {
    const TorusGrid& g = e.grid;
    double acc = 0.0;
    for (std::size_t n = 0; n < e.rank(); ++n) {
        const Field u = to_space(e.modes[n], Space::physical);
        double mode_acc = 0.0;
        for (int a = 0; a < g.dim(); ++a) {
            const Field du = gradient_component(u, a);
            for (std::size_t i = 0; i < u.size(); ++i) {
                auto x = g.coords(i);
                double d = wrap_displacement(x[a], center[a], g.length());
                mode_acc += d * std::imag(std::conj(u[i]) * du[i]);
            }
        }
        acc += e.weights[n] * mode_acc;
    }
    return 4.0 * acc * g.cell_volume();
}

ModifiedEnergyTerms modified_energy(const std::vector<Field>& z_eq,
                                    const std::vector<Field>& z_extra,
                                    const EquilibriumSpec& eq, double t) {
    if (z_eq.size() != eq.coefficients.size())
        throw std::invalid_argument(
            "modified_energy: z_eq must align with the equilibrium coefficients");
    const TorusGrid& g = eq.grid;
    const double m = eq.mass_level();

    ModifiedEnergyTerms out{0.0, 0.0, 0.0, 0.0, 0.0};

    // A = 1/2 sum_alpha sum_k (m + |k|^2) |hat z_alpha(k)|^2
    auto add_A = [&](const Field& z) {
        Field s = to_space(z, Space::spectral);
        for (std::size_t i = 0; i < s.size(); ++i)
            out.A += 0.5 * (m + g.k_sq(i)) * std::norm(s[i]);
    };
    for (const auto& z : z_eq) add_A(z);
    for (const auto& z : z_extra) add_A(z);

    // rho_Z = E|Z|^2 and the cross density Re E(conj(Z) Y); Y only loads the
    // equilibrium's own noise coordinates
    std::vector<double> rho_z(g.total(), 0.0);
    std::vector<double> cross(g.total(), 0.0);
    for (std::size_t n = 0; n < z_eq.size(); ++n) {
        const Field z = to_space(z_eq[n], Space::physical);
        const Field y = equilibrium_wave(eq, n, t);
        for (std::size_t i = 0; i < g.total(); ++i) {
            rho_z[i] += std::norm(z[i]);
            cross[i] += std::real(std::conj(z[i]) * y[i]);
        }
    }
    for (const auto& zf : z_extra) {
        const Field z = to_space(zf, Space::physical);
        for (std::size_t i = 0; i < g.total(); ++i) rho_z[i] += std::norm(z[i]);
    }

    double b = 0.0, d = 0.0, e_ = 0.0;
    for (std::size_t i = 0; i < g.total(); ++i) {
        b += rho_z[i] * rho_z[i];
        d += rho_z[i] * cross[i];
        e_ += rho_z[i];
    }
    const double cv = g.cell_volume();
    out.B = 0.25 * b * cv;
    out.D = d * cv;
    out.E = 0.5 * e_ * cv;
    out.total = out.A + out.B + out.D + 2.0 * m * out.E;
    return out;
}

ModeEnsemble scattering_profile(const ModeEnsemble& state, double t) {
    ModeEnsemble p = state;
    for (auto& u : p.modes) u = apply_semigroup(u, -t, 0.0);
    return p;
}

double scatter_cauchy(const ModeEnsemble& state1, double t1, const ModeEnsemble& state2,
                      double t2) {
    ModeEnsemble p1 = scattering_profile(state1, t1);
    ModeEnsemble p2 = scattering_profile(state2, t2);
    return std::sqrt(ensemble_distance_sq(p1, p2, 1.0));
}

} // namespace enls
