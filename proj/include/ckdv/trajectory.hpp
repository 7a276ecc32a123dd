#pragma once

#include <vector>

#include "ckdv/systems.hpp"

namespace ckdv {

/// States ordered by strictly increasing time on one shared grid. Backward
/// runs are stored reversed so the ordering invariant holds.
struct Trajectory {
    std::vector<State> states;
    SystemSpec spec;

    const GridSpec& grid() const { return states.front().u.grid; }
    std::vector<double> times() const;
};

/// Interpolated state at time t (Lagrange, up to `order` nearest samples).
State interpolate_state(const Trajectory& traj, double t, int order = 6);

}  // namespace ckdv
