#include "enls/serialize.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

namespace enls {

namespace {
double require_number(const json& j, const char* where) {
    if (!j.is_number()) throw ConfigError(std::string(where) + ": expected a number");
    return j.get<double>();
}

const json& require_key(const json& j, const char* key, const char* where) {
    if (!j.is_object() || !j.contains(key))
        throw ConfigError(std::string(where) + ": missing key '" + key + "'");
    return j.at(key);
}

std::vector<std::complex<double>> complex_from_interleaved(const json& j, std::size_t expect,
                                                           const char* where) {
    if (!j.is_array() || j.size() != 2 * expect)
        throw ConfigError(std::string(where) + ": expected " + std::to_string(2 * expect) +
                          " interleaved re/im entries");
    std::vector<std::complex<double>> out(expect);
    for (std::size_t i = 0; i < expect; ++i)
        out[i] = {require_number(j[2 * i], where), require_number(j[2 * i + 1], where)};
    return out;
}

json complex_to_interleaved(const std::vector<std::complex<double>>& v) {
    json arr = json::array();
    for (const auto& c : v) {
        arr.push_back(c.real());
        arr.push_back(c.imag());
    }
    return arr;
}
}

json grid_to_json(const TorusGrid& g) {
    return json{{"dim", g.dim()}, {"points", g.n()}, {"length", g.length()}};
}

TorusGrid grid_from_json(const json& j) {
    const int dim = static_cast<int>(require_number(require_key(j, "dim", "grid"), "grid.dim"));
    const int n = static_cast<int>(require_number(require_key(j, "points", "grid"), "grid.points"));
    const double L =
        j.contains("length") ? require_number(j.at("length"), "grid.length") : 2.0 * pi;
    try {
        return TorusGrid(dim, n, L);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }
}

json field_to_json(const Field& f) {
    return json{{"space", f.space() == Space::spectral ? "spectral" : "physical"},
                {"data", complex_to_interleaved(f.data())}};
}

Field field_from_json(const TorusGrid& g, const json& j) {
    const std::string space_s =
        require_key(j, "space", "field").is_string() ? j.at("space").get<std::string>() : "";
    Space space;
    if (space_s == "spectral")
        space = Space::spectral;
    else if (space_s == "physical")
        space = Space::physical;
    else
        throw ConfigError("field.space: expected \"physical\" or \"spectral\"");
    auto data = complex_from_interleaved(require_key(j, "data", "field"), g.total(), "field.data");
    return Field::from_values(g, space, std::move(data));
}

json ensemble_to_json(const ModeEnsemble& e) {
    json modes = json::array();
    for (const auto& u : e.modes) modes.push_back(field_to_json(u));
    return json{{"grid", grid_to_json(e.grid)}, {"weights", e.weights}, {"modes", modes}};
}

ModeEnsemble ensemble_from_json(const json& j) {
    ModeEnsemble e;
    e.grid = grid_from_json(require_key(j, "grid", "ensemble"));
    const json& w = require_key(j, "weights", "ensemble");
    const json& m = require_key(j, "modes", "ensemble");
    if (!w.is_array() || !m.is_array() || w.size() != m.size())
        throw ConfigError("ensemble: weights and modes must be arrays of equal length");
    for (std::size_t i = 0; i < w.size(); ++i) {
        e.weights.push_back(require_number(w[i], "ensemble.weights"));
        e.modes.push_back(field_from_json(e.grid, m[i]));
    }
    try {
        e.validate();
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(std::string("ensemble: ") + ex.what());
    }
    return e;
}

json covariance_to_json(const CovarianceMatrix& c) {
    std::vector<std::complex<double>> entries;
    entries.reserve(c.dim() * c.dim());
    for (Eigen::Index r = 0; r < c.m.rows(); ++r)
        for (Eigen::Index col = 0; col < c.m.cols(); ++col) entries.push_back(c.m(r, col));
    return json{{"grid", grid_to_json(c.grid)},
                {"k_cut", c.k_cut},
                {"entries", complex_to_interleaved(entries)}};
}

CovarianceMatrix covariance_from_json(const json& j) {
    CovarianceMatrix c;
    c.grid = grid_from_json(require_key(j, "grid", "covariance"));
    c.k_cut =
        static_cast<int>(require_number(require_key(j, "k_cut", "covariance"), "covariance.k_cut"));
    try {
        c.basis = covariance_basis(c.grid, c.k_cut);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("covariance: ") + e.what());
    }
    const std::size_t B = c.basis.size();
    auto entries =
        complex_from_interleaved(require_key(j, "entries", "covariance"), B * B, "covariance.entries");
    c.m.resize(static_cast<Eigen::Index>(B), static_cast<Eigen::Index>(B));
    for (std::size_t r = 0; r < B; ++r)
        for (std::size_t col = 0; col < B; ++col)
            c.m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) = entries[r * B + col];
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("covariance: ") + e.what());
    }
    return c;
}

json equilibrium_to_json(const EquilibriumSpec& eq) {
    json coeffs = json::array();
    for (const auto& c : eq.coefficients) {
        json k = json::array();
        for (int a = 0; a < eq.grid.dim(); ++a) k.push_back(c.k[a]);
        coeffs.push_back(json{{"k", k}, {"re", c.a.real()}, {"im", c.a.imag()}});
    }
    return json{{"grid", grid_to_json(eq.grid)}, {"coefficients", coeffs}};
}

EquilibriumSpec equilibrium_from_json(const json& j) {
    EquilibriumSpec eq;
    eq.grid = grid_from_json(require_key(j, "grid", "equilibrium"));
    const json& coeffs = require_key(j, "coefficients", "equilibrium");
    if (!coeffs.is_array()) throw ConfigError("equilibrium.coefficients: expected an array");
    for (const auto& cj : coeffs) {
        EquilibriumCoefficient c;
        const json& k = require_key(cj, "k", "equilibrium coefficient");
        if (!k.is_array() || k.size() != static_cast<std::size_t>(eq.grid.dim()))
            throw ConfigError("equilibrium coefficient: k must list one integer per grid axis");
        for (std::size_t a = 0; a < k.size(); ++a) {
            if (!k[a].is_number_integer())
                throw ConfigError("equilibrium coefficient: k entries must be integers");
            c.k[a] = k[a].get<int>();
        }
        c.a = {require_number(require_key(cj, "re", "equilibrium coefficient"), "re"),
               require_number(require_key(cj, "im", "equilibrium coefficient"), "im")};
        eq.coefficients.push_back(c);
    }
    try {
        eq.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("equilibrium: ") + e.what());
    }
    return eq;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

const char* const diagnostics_csv_header =
    "t,mass,energy,h1_sq,density_L4,virial,virial_rate,A,B,D,E,modE,scatter_cauchy";

void write_diagnostics_csv(const std::filesystem::path& path,
                           const std::vector<DiagnosticsRecord>& records) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << diagnostics_csv_header << '\n';
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    for (const auto& r : records) {
        out << format_double(r.t) << ',' << format_double(r.mass) << ',' << format_double(r.energy)
            << ',' << format_double(r.h1_sq) << ',' << format_double(r.density_L4) << ','
            << opt(r.virial) << ',' << opt(r.virial_rate) << ',' << opt(r.A) << ',' << opt(r.B)
            << ',' << opt(r.D) << ',' << opt(r.E) << ',' << opt(r.modE) << ','
            << opt(r.scatter_cauchy) << '\n';
    }
    if (!out) throw IoError("write failure on " + path.string());
}

std::vector<DiagnosticsRecord> read_diagnostics_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty diagnostics file " + path.string());
    if (line != diagnostics_csv_header)
        throw ConfigError("unexpected diagnostics header in " + path.string());
    std::vector<DiagnosticsRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::optional<double>> cells;
        std::size_t start = 0;
        while (start <= line.size()) {
            std::size_t end = line.find(',', start);
            if (end == std::string::npos) end = line.size();
            if (end == start)
                cells.emplace_back(std::nullopt);
            else {
                double v = 0.0;
                auto res = std::from_chars(line.data() + start, line.data() + end, v);
                if (res.ec != std::errc())
                    throw ConfigError("bad number in diagnostics row of " + path.string());
                cells.emplace_back(v);
            }
            if (end == line.size()) break;
            start = end + 1;
        }
        if (cells.size() != 13)
            throw ConfigError("wrong column count in diagnostics row of " + path.string());
        DiagnosticsRecord r;
        auto need = [&](std::size_t i, const char* name) {
            if (!cells[i]) throw ConfigError(std::string("missing required column ") + name);
            return *cells[i];
        };
        r.t = need(0, "t");
        r.mass = need(1, "mass");
        r.energy = need(2, "energy");
        r.h1_sq = need(3, "h1_sq");
        r.density_L4 = need(4, "density_L4");
        r.virial = cells[5];
        r.virial_rate = cells[6];
        r.A = cells[7];
        r.B = cells[8];
        r.D = cells[9];
        r.E = cells[10];
        r.modE = cells[11];
        r.scatter_cauchy = cells[12];
        out.push_back(r);
    }
    return out;
}

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("JSON parse error in " + path.string() + ": " + e.what());
    }
    return j;
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failure on " + path.string());
}

} // namespace enls
