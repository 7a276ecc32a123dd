#pragma once

#include <cmath>

namespace ckdv {

/// Smooth bump: 1 on |t| <= 1, 0 on |t| >= 2, built from g(x) = exp(-1/x).
inline double psi_cutoff(double t) {
    const double a = std::abs(t);
    if (a <= 1.0) return 1.0;
    if (a >= 2.0) return 0.0;
    const double g_in = std::exp(-1.0 / (2.0 - a));
    const double g_out = std::exp(-1.0 / (a - 1.0));
    return g_in / (g_in + g_out);
}

/// psi_T(t) = psi(t / T).
inline double psi_cutoff(double t, double T) { return psi_cutoff(t / T); }

}  // namespace ckdv
