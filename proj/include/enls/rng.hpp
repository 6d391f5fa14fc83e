#pragma once
// Deterministic, splittable random streams. A stream is keyed by
// (seed, stream_id) and realizations derive child streams by index, so draws
// are reproducible bit-for-bit regardless of how work is partitioned across
// threads. The generator is SplitMix64; complex standard Gaussians
// (E g = 0, E|g|^2 = 1) come from Box-Muller in polar form.

#include <complex>
#include <cstdint>

namespace enls {

class GaussianStream {
public:
    GaussianStream(std::uint64_t seed, std::uint64_t stream_id);

    // child stream for one realization (or any sub-entity) of this stream
    GaussianStream derived(std::uint64_t index) const;

    // uniform on [0,1) with 53 random bits
    double uniform();
    // standard complex Gaussian: (xi1 + i xi2)/sqrt(2), xi_i ~ N(0,1)
    std::complex<double> gaussian();
    // standard real Gaussian
    double real_gaussian();

private:
    explicit GaussianStream(std::uint64_t state) : state_(state) {}
    std::uint64_t next_raw();
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace enls
