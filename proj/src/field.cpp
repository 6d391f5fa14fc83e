#include "enls/field.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace enls {

namespace {

// FFTW plan cache per (dim, n, direction). Plans are created once with
// FFTW_ESTIMATE (a deterministic heuristic planner, so deployments of the same
// build give bit-identical transforms) and executed via the new-array
// interface. Plan creation is the only non-thread-safe FFTW entry point.
class PlanCache {
public:
    static fftw_plan get(const TorusGrid& g, int sign) {
        static PlanCache cache;
        std::scoped_lock lk(cache.mu_);
        auto key = std::make_tuple(g.dim(), g.n(), sign);
        auto it = cache.plans_.find(key);
        if (it != cache.plans_.end()) return it->second;
        std::vector<std::complex<double>> buf(g.total());
        auto* p = reinterpret_cast<fftw_complex*>(buf.data());
        int n[3] = {g.n(), g.n(), g.n()};
        fftw_plan plan =
            fftw_plan_dft(g.dim(), n, p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!plan) throw std::runtime_error("FFTW plan creation failed");
        cache.plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mu_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

void execute(const TorusGrid& g, int sign, std::vector<std::complex<double>>& data) {
    fftw_plan plan = PlanCache::get(g, sign);
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, p, p);
}

} // namespace

Field Field::from_values(const TorusGrid& grid, Space space,
                         std::vector<std::complex<double>> values) {
    if (values.size() != grid.total())
        throw std::invalid_argument("Field: value count does not match grid");
    Field f(grid, space);
    f.data_ = std::move(values);
    return f;
}

Field Field::plane_wave(const TorusGrid& grid, const std::array<int, 3>& k,
                        std::complex<double> amplitude) {
    if (!grid.mode_on_grid(k))
        throw std::invalid_argument("plane_wave: mode outside the alias-free lattice");
    Field f(grid, Space::physical);
    for (std::size_t i = 0; i < grid.total(); ++i) {
        auto x = grid.coords(i);
        double phase = 0.0;
        for (int a = 0; a < grid.dim(); ++a) phase += grid.k_scale() * k[a] * x[a];
        f[i] = amplitude * std::polar(1.0, phase);
    }
    return f;
}

Field Field::gaussian_bump(const TorusGrid& grid, const std::array<double, 3>& center,
                           double width, double amplitude) {
    if (!(width > 0.0)) throw std::invalid_argument("gaussian_bump: width must be positive");
    Field f(grid, Space::physical);
    const double L = grid.length();
    for (std::size_t i = 0; i < grid.total(); ++i) {
        auto x = grid.coords(i);
        double v = amplitude;
        for (int a = 0; a < grid.dim(); ++a) {
            double s = 0.0;
            for (int w = -2; w <= 2; ++w) {
                double d = x[a] - center[a] - w * L;
                s += std::exp(-d * d / (2.0 * width * width));
            }
            v *= s;
        }
        f[i] = v;
    }
    return ifft(zero_nyquist(fft(f)));
}

Field Field::random_bandlimited(const TorusGrid& grid, GaussianStream& stream, int kmax,
                                double decay) {
    if (kmax < 0 || kmax > grid.nyquist() - 1)
        throw std::invalid_argument("random_bandlimited: kmax outside the alias-free lattice");
    Field f(grid, Space::spectral);
    // fixed draw order: ascending flat index over the band-limited lattice
    for (std::size_t i = 0; i < grid.total(); ++i) {
        auto k = grid.modes_at(i);
        bool in_band = true;
        for (int a = 0; a < grid.dim(); ++a)
            if (std::abs(k[a]) > kmax) in_band = false;
        if (!in_band) continue;
        double ksq = 0.0;
        for (int a = 0; a < grid.dim(); ++a) ksq += double(k[a]) * k[a];
        f[i] = stream.gaussian() / std::pow(1.0 + ksq, decay);
    }
    return f;
}

Field fft(const Field& f) {
    if (f.space() != Space::physical) throw std::invalid_argument("fft: field not physical");
    Field out = f;
    execute(f.grid(), FFTW_FORWARD, out.data());
    const double scale = std::sqrt(f.grid().volume()) / static_cast<double>(f.grid().total());
    for (auto& c : out.data()) c *= scale;
    return Field::from_values(f.grid(), Space::spectral, std::move(out.data()));
}

Field ifft(const Field& f) {
    if (f.space() != Space::spectral) throw std::invalid_argument("ifft: field not spectral");
    Field out = f;
    execute(f.grid(), FFTW_BACKWARD, out.data());
    const double scale = 1.0 / std::sqrt(f.grid().volume());
    for (auto& c : out.data()) c *= scale;
    return Field::from_values(f.grid(), Space::physical, std::move(out.data()));
}

Field to_space(const Field& f, Space s) {
    if (f.space() == s) return f;
    return s == Space::spectral ? fft(f) : ifft(f);
}

double l2_norm_sq(const Field& f) {
    double acc = 0.0;
    for (const auto& c : f.data()) acc += std::norm(c);
    return f.space() == Space::physical ? acc * f.grid().cell_volume() : acc;
}

std::complex<double> inner(const Field& a, const Field& b) {
    if (a.grid() != b.grid() || a.space() != b.space())
        throw std::invalid_argument("inner: fields on different grids or spaces");
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return a.space() == Space::physical ? acc * a.grid().cell_volume() : acc;
}

double sobolev_norm_sq(const Field& f, double s) {
    Field g = to_space(f, Space::spectral);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        acc += std::pow(1.0 + g.grid().k_sq(i), s) * std::norm(g[i]);
    return acc;
}

Field apply_semigroup(const Field& f, double t, double mass_shift) {
    Space in = f.space();
    Field g = to_space(f, Space::spectral);
    for (std::size_t i = 0; i < g.size(); ++i)
        g[i] *= std::polar(1.0, -t * (g.grid().k_sq(i) + mass_shift));
    return to_space(g, in);
}

Field gradient_component(const Field& f, int axis) {
    if (axis < 0 || axis >= f.grid().dim())
        throw std::invalid_argument("gradient_component: axis out of range");
    Space in = f.space();
    Field g = to_space(f, Space::spectral);
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto k = g.grid().modes_at(i);
        g[i] *= std::complex<double>(0.0, g.grid().k_scale() * k[axis]);
    }
    return to_space(g, in);
}

Field zero_nyquist(Field f) {
    if (f.space() != Space::spectral) throw std::invalid_argument("zero_nyquist: field not spectral");
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f.grid().is_nyquist(i)) f[i] = 0.0;
    return f;
}

bool nyquist_clean(const Field& f, double tol) {
    Field g = to_space(f, Space::spectral);
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.grid().is_nyquist(i) && std::abs(g[i]) > tol) return false;
    return true;
}

Field low_pass_two_thirds(Field f) {
    if (f.space() != Space::spectral)
        throw std::invalid_argument("low_pass_two_thirds: field not spectral");
    const int kcut = f.grid().n() / 3;
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto k = f.grid().modes_at(i);
        for (int a = 0; a < f.grid().dim(); ++a)
            if (std::abs(k[a]) > kcut) {
                f[i] = 0.0;
                break;
            }
    }
    return f;
}

} // namespace enls
