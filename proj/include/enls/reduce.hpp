#pragma once
// Fixed-order pairwise (tree) summation. Empirical means over realizations use
// this so results do not depend on accumulation order or thread count, and the
// rounding error grows like O(log J) instead of O(J).

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace enls {

namespace detail {
template <typename T, typename Get>
T pairwise_sum_impl(std::size_t lo, std::size_t hi, const Get& get, const T& zero) {
    if (hi - lo <= 8) {
        T acc = zero;
        for (std::size_t i = lo; i < hi; ++i) acc += get(i);
        return acc;
    }
    std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum_impl<T>(lo, mid, get, zero) + pairwise_sum_impl<T>(mid, hi, get, zero);
}
}

// sum of get(i) for i in [0, count) in a fixed pairwise order, starting each
// leaf from a caller-supplied zero (for matrix/vector accumulators)
template <typename T, typename Get>
T pairwise_sum_from(std::size_t count, const Get& get, const T& zero) {
    if (count == 0) return zero;
    return detail::pairwise_sum_impl<T>(0, count, get, zero);
}

// sum of get(i) for i in [0, count) in a fixed pairwise order
template <typename T, typename Get>
T pairwise_sum(std::size_t count, const Get& get) {
    return pairwise_sum_from<T>(count, get, T{});
}

inline double pairwise_sum(const std::vector<double>& v) {
    return pairwise_sum<double>(v.size(), [&](std::size_t i) { return v[i]; });
}

inline std::complex<double> pairwise_sum(const std::vector<std::complex<double>>& v) {
    return pairwise_sum<std::complex<double>>(v.size(), [&](std::size_t i) { return v[i]; });
}

} // namespace enls
