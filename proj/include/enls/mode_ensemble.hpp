#pragma once
// Finite-rank Gaussian ensemble X = sum_n sqrt(w_n) g_n u_n with i.i.d.
// standard complex Gaussians g_n. The weight/mode lists are an exact
// representation of the law: the mean density E|X|^2 is sum_n w_n |u_n|^2
// pointwise and every ensemble average reduces to a weighted sum over modes,
// with no sampling error. All realizations obey one common linear equation,
// so the dynamics acts mode by mode.

#include "enls/field.hpp"
#include "enls/grid.hpp"

#include <vector>

namespace enls {

struct ModeEnsemble {
    TorusGrid grid;
    std::vector<double> weights; // w_n >= 0
    std::vector<Field> modes;    // aligned with weights

    std::size_t rank() const { return weights.size(); }
    void validate() const; // throws std::invalid_argument on shape/weight violations
};

// E|X|^2 pointwise: sum_n w_n |u_n(x)|^2 (physical space, real values)
Field exact_density(const ModeEnsemble& e);
// E ||X||_{L^2}^2 = sum_n w_n ||u_n||^2
double ensemble_mass(const ModeEnsemble& e);
// E ||X||_{H^s}^2 = sum_n w_n ||u_n||_{H^s}^2
double ensemble_sobolev_sq(const ModeEnsemble& e, double s);
// E ||X - Y||_{H^s}^2 for two ensembles built on the same noise coordinates
double ensemble_distance_sq(const ModeEnsemble& a, const ModeEnsemble& b, double s);

} // namespace enls
