#include "ckdv/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "ckdv/error.hpp"

namespace ckdv {

std::vector<double> Trajectory::times() const {
    std::vector<double> t;
    t.reserve(states.size());
    for (const auto& s : states) t.push_back(s.t);
    return t;
}

State interpolate_state(const Trajectory& traj, double t, int order) {
    const auto& st = traj.states;
    if (st.empty()) throw InvalidArgument("empty trajectory");
    const double t0 = st.front().t, t1 = st.back().t;
    const double slack = 1e-12 * std::max(1.0, std::abs(t1 - t0));
    if (t < t0 - slack || t > t1 + slack)
        throw InvalidArgument("time " + std::to_string(t) + " outside trajectory range");
    const int m = static_cast<int>(st.size());
    if (m == 1) return st.front();

    // Exact hit avoids interpolation round-off.
    auto it = std::lower_bound(st.begin(), st.end(), t,
                               [](const State& s, double v) { return s.t < v; });
    for (auto cand : {it, it == st.begin() ? it : it - 1})
        if (cand != st.end() && std::abs(cand->t - t) <= slack) return *cand;

    const int k = std::min(order, m);
    int centre = static_cast<int>(it - st.begin());
    int lo = std::clamp(centre - k / 2, 0, m - k);
    State out{SpectralField(st[0].u.grid), SpectralField(st[0].u.grid), t};
    for (int i = lo; i < lo + k; ++i) {
        double w = 1.0;
        for (int j = lo; j < lo + k; ++j)
            if (j != i) w *= (t - st[j].t) / (st[i].t - st[j].t);
        out.u.coeffs += w * st[i].u.coeffs;
        out.v.coeffs += w * st[i].v.coeffs;
    }
    return out;
}

}  // namespace ckdv
