#include "enls/equilibrium.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace enls {

double EquilibriumSpec::mass_level() const {
    double m = 0.0;
    for (const auto& c : coefficients) m += std::norm(c.a);
    return m;
}

double EquilibriumSpec::second_moment() const {
    double m2 = 0.0;
    for (const auto& c : coefficients) {
        double ksq = 0.0;
        for (int a = 0; a < grid.dim(); ++a) {
            double kp = grid.k_scale() * c.k[a];
            ksq += kp * kp;
        }
        m2 += ksq * std::norm(c.a);
    }
    return m2;
}

void EquilibriumSpec::validate() const {
    std::set<std::array<int, 3>> seen;
    for (const auto& c : coefficients) {
        if (!grid.mode_on_grid(c.k))
            throw std::invalid_argument("EquilibriumSpec: coefficient mode outside the alias-free lattice");
        if (!seen.insert(c.k).second)
            throw std::invalid_argument("EquilibriumSpec: duplicate coefficient mode");
        if (std::norm(c.a) == 0.0 || !std::isfinite(std::abs(c.a)))
            throw std::invalid_argument("EquilibriumSpec: coefficients must be nonzero and finite");
    }
}

ModeEnsemble build_equilibrium(const EquilibriumSpec& eq) {
    eq.validate();
    ModeEnsemble e;
    e.grid = eq.grid;
    for (const auto& c : eq.coefficients) {
        e.weights.push_back(std::norm(c.a));
        e.modes.push_back(Field::plane_wave(eq.grid, c.k, c.a / std::abs(c.a)));
    }
    return e;
}

std::vector<std::complex<double>> equilibrium_phases(const EquilibriumSpec& eq, double t) {
    const double m = eq.mass_level();
    std::vector<std::complex<double>> phases;
    phases.reserve(eq.coefficients.size());
    for (const auto& c : eq.coefficients) {
        double ksq = 0.0;
        for (int a = 0; a < eq.grid.dim(); ++a) {
            double kp = eq.grid.k_scale() * c.k[a];
            ksq += kp * kp;
        }
        phases.push_back(std::polar(1.0, -t * (ksq + m)));
    }
    return phases;
}

Field equilibrium_wave(const EquilibriumSpec& eq, std::size_t index, double t) {
    if (index >= eq.coefficients.size())
        throw std::invalid_argument("equilibrium_wave: coefficient index out of range");
    const auto& c = eq.coefficients[index];
    return Field::plane_wave(eq.grid, c.k, c.a * equilibrium_phases(eq, t)[index]);
}

} // namespace enls
