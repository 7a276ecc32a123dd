#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "ckdv/grid.hpp"

namespace ckdv::testing {

inline RVec sample(const GridSpec& g, const std::function<double(double)>& f) {
    RVec out(g.n);
    for (int j = 0; j < g.n; ++j) out[j] = f(g.x(j));
    return out;
}

inline SpectralField field(const GridSpec& g, const std::function<double(double)>& f) {
    return forward(sample(g, f), g);
}

inline RVec random_real(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    RVec out(n);
    for (int j = 0; j < n; ++j) out[j] = nd(rng);
    return out;
}

/// Random real field with modes |k| <= kmax.
inline SpectralField random_band_limited(const GridSpec& g, int kmax, std::uint64_t seed) {
    SpectralField f = forward(random_real(g.n, seed), g);
    for (int j = 0; j < g.n; ++j)
        if (std::abs(g.mode(j)) > kmax) f.coeffs[j] = 0.0;
    return f;
}

inline double max_abs_diff(const RVec& a, const RVec& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace ckdv::testing
