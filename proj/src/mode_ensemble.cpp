#include "enls/mode_ensemble.hpp"

#include <cmath>
#include <stdexcept>

namespace enls {

void ModeEnsemble::validate() const {
    if (weights.size() != modes.size())
        throw std::invalid_argument("ModeEnsemble: weight/mode counts differ");
    for (double w : weights)
        if (!(w >= 0.0) || !std::isfinite(w))
            throw std::invalid_argument("ModeEnsemble: weights must be finite and >= 0");
    for (const auto& u : modes)
        if (u.grid() != grid)
            throw std::invalid_argument("ModeEnsemble: mode grid mismatch");
}

Field exact_density(const ModeEnsemble& e) {
    Field rho(e.grid, Space::physical);
    for (std::size_t n = 0; n < e.rank(); ++n) {
        Field u = to_space(e.modes[n], Space::physical);
        const double w = e.weights[n];
        for (std::size_t i = 0; i < rho.size(); ++i)
            rho[i] += w * std::norm(u[i]);
    }
    return rho;
}

double ensemble_mass(const ModeEnsemble& e) {
    double acc = 0.0;
    for (std::size_t n = 0; n < e.rank(); ++n) acc += e.weights[n] * l2_norm_sq(e.modes[n]);
    return acc;
}

double ensemble_sobolev_sq(const ModeEnsemble& e, double s) {
    double acc = 0.0;
    for (std::size_t n = 0; n < e.rank(); ++n)
        acc += e.weights[n] * sobolev_norm_sq(e.modes[n], s);
    return acc;
}

double ensemble_distance_sq(const ModeEnsemble& a, const ModeEnsemble& b, double s) {
    if (a.rank() != b.rank())
        throw std::invalid_argument("ensemble_distance_sq: ensembles have different ranks");
    double acc = 0.0;
    for (std::size_t n = 0; n < a.rank(); ++n) {
        if (a.weights[n] != b.weights[n])
            throw std::invalid_argument("ensemble_distance_sq: noise coordinates not shared");
        Field d = to_space(a.modes[n], Space::spectral);
        Field bn = to_space(b.modes[n], Space::spectral);
        for (std::size_t i = 0; i < d.size(); ++i) d[i] -= bn[i];
        acc += a.weights[n] * sobolev_norm_sq(d, s);
    }
    return acc;
}

} // namespace enls
