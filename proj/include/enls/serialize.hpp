#pragma once
// JSON schemas (lossless at double precision) and the diagnostics CSV format.
//
//   grid        {"dim": d, "points": n, "length": L}
//   field       {"space": "physical"|"spectral", "data": [re, im, ...]}
//               flat row-major grid order, interleaved re/im
//   ensemble    {"grid": g, "weights": [...], "modes": [field, ...]}
//   covariance  {"grid": g, "k_cut": c, "entries": [re, im, ...]}
//               row-major over the lexicographic |k_i| <= k_cut basis
//   equilibrium {"grid": g, "coefficients": [{"k": [...], "re": r, "im": i}]}
//
// diagnostics.csv carries the fixed header
//   t,mass,energy,h1_sq,density_L4,virial,virial_rate,A,B,D,E,modE,scatter_cauchy
// with shortest round-trip decimal numbers and empty cells for absent values.

#include "enls/covariance.hpp"
#include "enls/diagnostics.hpp"
#include "enls/equilibrium.hpp"
#include "enls/mode_ensemble.hpp"

#include "json.hpp" // vendored single-header nlohmann::json

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace enls {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using json = nlohmann::json;

json grid_to_json(const TorusGrid& g);
TorusGrid grid_from_json(const json& j);

json field_to_json(const Field& f);
Field field_from_json(const TorusGrid& g, const json& j);

json ensemble_to_json(const ModeEnsemble& e);
ModeEnsemble ensemble_from_json(const json& j);

json covariance_to_json(const CovarianceMatrix& c);
CovarianceMatrix covariance_from_json(const json& j);

json equilibrium_to_json(const EquilibriumSpec& eq);
EquilibriumSpec equilibrium_from_json(const json& j);

// shortest decimal string that round-trips to the same double
std::string format_double(double v);

extern const char* const diagnostics_csv_header;
void write_diagnostics_csv(const std::filesystem::path& path,
                           const std::vector<DiagnosticsRecord>& records);
std::vector<DiagnosticsRecord> read_diagnostics_csv(const std::filesystem::path& path);

json load_json_file(const std::filesystem::path& path);       // IoError / ConfigError
void write_json_file(const std::filesystem::path& path, const json& j);

} // namespace enls
