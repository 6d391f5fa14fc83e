#include "enls/sphere.hpp"

#include "enls/dynamics.hpp" // NumericalError
#include "enls/grid.hpp"     // pi

#include <cmath>
#include <stdexcept>

namespace enls {

namespace {
std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / i;
    return r;
}

constexpr int max_degree = 32;

void check_degree(int degree, int sphere_dim) {
    if (degree < 0) throw std::invalid_argument("sphere: degree must be >= 0");
    if (sphere_dim < 1 || sphere_dim > 8)
        throw std::invalid_argument("sphere: sphere dimension must be in [1, 8]");
}
}

std::uint64_t harmonic_dimension(int degree, int sphere_dim) {
    check_degree(degree, sphere_dim);
    return binomial(degree + sphere_dim, sphere_dim) -
           binomial(degree + sphere_dim - 2, sphere_dim);
}

double laplace_eigenvalue(int degree, int sphere_dim) {
    check_degree(degree, sphere_dim);
    return static_cast<double>(degree) * (degree + sphere_dim - 1);
}

SphereSample fibonacci_sphere_sample(int npoints) {
    if (npoints < 1) throw std::invalid_argument("fibonacci_sphere_sample: npoints must be >= 1");
    SphereSample s;
    const double golden_angle = pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < npoints; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / npoints;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden_angle * i;
        s.points.push_back({r * std::cos(phi), r * std::sin(phi), z});
        s.weights.push_back(4.0 * pi / npoints);
    }
    return s;
}

SphereSample gauss_legendre_sphere_sample(int n_theta, int n_phi) {
    if (n_theta < 1 || n_phi < 1)
        throw std::invalid_argument("gauss_legendre_sphere_sample: node counts must be >= 1");
    // Gauss-Legendre nodes on [-1,1] by Newton iteration on P_n
    std::vector<double> x(n_theta), w(n_theta);
    for (int i = 0; i < n_theta; ++i) {
        double xi = std::cos(pi * (i + 0.75) / (n_theta + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = xi;
            for (int l = 2; l <= n_theta; ++l) {
                double p2 = ((2.0 * l - 1.0) * xi * p1 - (l - 1.0) * p0) / l;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n_theta * (xi * p1 - p0) / (xi * xi - 1.0);
            const double dx = p1 / dp;
            xi -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = xi;
        for (int l = 2; l <= n_theta; ++l) {
            double p2 = ((2.0 * l - 1.0) * xi * p1 - (l - 1.0) * p0) / l;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n_theta * (xi * p1 - p0) / (xi * xi - 1.0);
        x[i] = xi;
        w[i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
    }
    SphereSample s;
    for (int i = 0; i < n_theta; ++i) {
        const double st = std::sqrt(std::max(0.0, 1.0 - x[i] * x[i]));
        for (int j = 0; j < n_phi; ++j) {
            const double phi = 2.0 * pi * j / n_phi;
            s.points.push_back({st * std::cos(phi), st * std::sin(phi), x[i]});
            s.weights.push_back(w[i] * 2.0 * pi / n_phi);
        }
    }
    return s;
}

namespace {
// fully normalized associated Legendre values q_n^m(cos theta) for one degree:
// q_n^m = sqrt((2n+1)/(4 pi) (n-m)!/(n+m)!) P_n^m, so the complex harmonics
// q_n^m e^{im phi} are orthonormal on S^2
std::vector<double> normalized_legendre_row(int n, double ct, double st) {
    std::vector<double> diag(n + 1); // q_m^m
    diag[0] = std::sqrt(1.0 / (4.0 * pi));
    for (int m = 1; m <= n; ++m)
        diag[m] = -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * st * diag[m - 1];
    std::vector<double> q(n + 1);
    for (int m = 0; m <= n; ++m) {
        if (m == n) {
            q[m] = diag[m];
            continue;
        }
        double qmm = diag[m];
        double qm1 = std::sqrt(2.0 * m + 3.0) * ct * qmm; // q_{m+1}^m
        if (m + 1 == n) {
            q[m] = qm1;
            continue;
        }
        double prev2 = qmm, prev1 = qm1;
        double cur = 0.0;
        for (int l = m + 2; l <= n; ++l) {
            const double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
            const double b =
                std::sqrt((double(l - 1) * (l - 1) - double(m) * m) / (4.0 * double(l - 1) * (l - 1) - 1.0));
            cur = a * (ct * prev1 - b * prev2);
            prev2 = prev1;
            prev1 = cur;
        }
        q[m] = cur;
    }
    return q;
}
}

std::vector<double> real_harmonics(int degree, const std::array<double, 3>& p) {
    if (degree > max_degree)
        throw std::invalid_argument("real_harmonics: degree exceeds supported maximum 32");
    check_degree(degree, 2);
    const double ct = p[2];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    const double phi = std::atan2(p[1], p[0]);
    const auto q = normalized_legendre_row(degree, ct, st);
    std::vector<double> y;
    y.reserve(2 * degree + 1);
    y.push_back(q[0]);
    const double s2 = std::sqrt(2.0);
    for (int m = 1; m <= degree; ++m) {
        y.push_back(s2 * q[m] * std::cos(m * phi));
        y.push_back(s2 * q[m] * std::sin(m * phi));
    }
    return y;
}

double kernel_sum(int degree, const std::array<double, 3>& p) {
    const auto y = real_harmonics(degree, p);
    double acc = 0.0;
    for (double v : y) acc += v * v;
    return acc;
}

SphereDensity sphere_equilibrium_density(const std::vector<std::complex<double>>& a,
                                         const SphereSample& sample) {
    SphereDensity out;
    out.values.assign(sample.points.size(), 0.0);
    for (std::size_t i = 0; i < sample.points.size(); ++i)
        for (std::size_t n = 0; n < a.size(); ++n)
            out.values[i] += std::norm(a[n]) * kernel_sum(static_cast<int>(n), sample.points[i]);
    double level = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n)
        level += std::norm(a[n]) *
                 static_cast<double>(harmonic_dimension(static_cast<int>(n), 2)) / (4.0 * pi);
    out.level = level;
    for (double v : out.values)
        if (std::abs(v - level) > 1e-9 * std::max(1.0, level))
            throw NumericalError("sphere_equilibrium_density: density is not constant");
    return out;
}

} // namespace enls
