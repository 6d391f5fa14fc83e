#include "enls/rng.hpp"

#include "enls/grid.hpp"

#include <cmath>

namespace enls {

namespace {
std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// hash the pieces of a key into a well-mixed initial state
std::uint64_t mix_key(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a;
    std::uint64_t h = splitmix64(s);
    s ^= b + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    return splitmix64(s);
}
}

GaussianStream::GaussianStream(std::uint64_t seed, std::uint64_t stream_id)
    : state_(mix_key(mix_key(seed, 0x5851F42D4C957F2DULL), stream_id)) {}

GaussianStream GaussianStream::derived(std::uint64_t index) const {
    return GaussianStream(mix_key(state_, index));
}

std::uint64_t GaussianStream::next_raw() { return splitmix64(state_); }

double GaussianStream::uniform() {
    return static_cast<double>(next_raw() >> 11) * 0x1.0p-53;
}

std::complex<double> GaussianStream::gaussian() {
    // polar Box-Muller; u1 shifted into (0,1] so the log is finite
    double u1 = (static_cast<double>(next_raw() >> 11) + 1.0) * 0x1.0p-53;
    double u2 = uniform();
    double r = std::sqrt(-std::log(u1));
    return std::polar(r, 2.0 * pi * u2);
}

double GaussianStream::real_gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    std::complex<double> g = gaussian();
    double s = std::sqrt(2.0);
    have_spare_ = true;
    spare_ = s * g.imag();
    return s * g.real();
}

} // namespace enls
