#pragma once

#include <functional>
#include <vector>

namespace ckdv {

struct QuadOptions {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    int max_panels = 4000;
    /// Each input interval is first cut into this many equal panels.
    int initial_panels = 1;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    long evaluations = 0;
    bool converged = true;
};

/// Adaptive 7/15-point Gauss-Kronrod on [a, b]. The panel with the largest
/// error estimate is bisected until the summed estimate meets the tolerance.
QuadResult integrate(const std::function<double(double)>& f, double a, double b, const QuadOptions& opt = {});

/// As above, with the interval split at every breakpoint inside (a, b).
QuadResult integrate(const std::function<double(double)>& f, double a, double b, std::vector<double> breakpoints,
                     const QuadOptions& opt = {});

}  // namespace ckdv
