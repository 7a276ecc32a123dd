#include "ckdv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ckdv/cutoff.hpp"
#include "ckdv/diagnostics.hpp"
#include "ckdv/error.hpp"

namespace ckdv {

namespace {

double max_mode(const State& s) {
    return std::max(s.u.coeffs.cwiseAbs().maxCoeff(), s.v.coeffs.cwiseAbs().maxCoeff());
}

// exp(-i c tau xi^3)
CVec group_factor(const RVec& cube, double c, double tau) {
    CVec e(cube.size());
    for (Eigen::Index j = 0; j < cube.size(); ++j) e[j] = std::polar(1.0, -c * tau * cube[j]);
    return e;
}

RVec cubes(const GridSpec& g) {
    RVec c = wavenumbers(g);
    return c.array().cube().matrix();
}

}  // namespace

State linear_propagate(const State& state, const SystemSpec& spec, double dt) {
    const auto [cu, cv] = require_diagonal(spec);
    const RVec c3 = cubes(state.u.grid);
    State out = state;
    out.u.coeffs = out.u.coeffs.cwiseProduct(group_factor(c3, cu, dt));
    out.v.coeffs = out.v.coeffs.cwiseProduct(group_factor(c3, cv, dt));
    out.t = state.t + dt;
    return out;
}

Stepper::Stepper(const SystemSpec& spec, const GridSpec& grid, StepperConfig config)
    : rhs_(canonical_form(spec), grid), config_(config) {
    const auto [cu, cv] = require_diagonal(spec);
    c_u_ = cu;
    c_v_ = cv;
    if (config_.dt == 0.0 || !std::isfinite(config_.dt)) throw InvalidArgument("time step must be nonzero");
    if (!(config_.cfl_guard > 1.0)) throw InvalidArgument("cfl_guard must exceed 1");
    cube_ = cubes(grid);
}

void Stepper::set_reference(const State& s) { reference_ = max_mode(s); }

void Stepper::check(const State& s, double last_valid_t) const {
    const bool finite = s.u.coeffs.allFinite() && s.v.coeffs.allFinite();
    if (!finite) throw BlowupDetected("non-finite mode after step", last_valid_t);
    if (reference_ > 0.0 && max_mode(s) > config_.cfl_guard * reference_)
        throw BlowupDetected("mode growth beyond guard (" + std::to_string(config_.cfl_guard) + "x initial)",
                             last_valid_t);
}

void Stepper::rk4(State& s, double dt) {
    if (dt != cached_dt_) {
        Eu_ = group_factor(cube_, c_u_, 0.5 * dt);
        Ev_ = group_factor(cube_, c_v_, 0.5 * dt);
        cached_dt_ = dt;
    }
    const GridSpec& g = rhs_.grid();
    CVec& u = s.u.coeffs;
    CVec& v = s.v.coeffs;
    dealias_inplace(u, g);
    dealias_inplace(v, g);
    const double t = s.t, h2 = 0.5 * dt;

    rhs_(u, v, k1u_, k1v_, t);
    tu_ = Eu_.cwiseProduct(u + h2 * k1u_);
    tv_ = Ev_.cwiseProduct(v + h2 * k1v_);
    rhs_(tu_, tv_, k2u_, k2v_, t);
    tu_ = Eu_.cwiseProduct(u) + h2 * k2u_;
    tv_ = Ev_.cwiseProduct(v) + h2 * k2v_;
    rhs_(tu_, tv_, k3u_, k3v_, t);
    // E^2 w + dt E k3
    tu_ = Eu_.cwiseProduct(Eu_.cwiseProduct(u) + dt * k3u_);
    tv_ = Ev_.cwiseProduct(Ev_.cwiseProduct(v) + dt * k3v_);
    rhs_(tu_, tv_, k4u_, k4v_, t);
    // E^2 (w + dt/6 k1) + dt/3 E (k2 + k3) + dt/6 k4
    const double d6 = dt / 6.0, d3 = dt / 3.0;
    u = Eu_.cwiseProduct(Eu_.cwiseProduct(u + d6 * k1u_) + d3 * (k2u_ + k3u_)) + d6 * k4u_;
    v = Ev_.cwiseProduct(Ev_.cwiseProduct(v + d6 * k1v_) + d3 * (k2v_ + k3v_)) + d6 * k4v_;
    s.t = t + dt;
}

void Stepper::step(State& s) { advance(s, 1, config_.dt); }

void Stepper::advance(State& s, int count, double dt) {
    if (reference_ == 0.0) set_reference(s);
    for (int i = 0; i < count; ++i) {
        const double t_prev = s.t;
        rk4(s, dt);
        check(s, t_prev);
    }
}

State step(const State& state, const SystemSpec& spec, const StepperConfig& config) {
    Stepper st(spec, state.u.grid, config);
    State s = state;
    st.step(s);
    return s;
}

Trajectory simulate(const State& initial, const SystemSpec& spec, double T, const StepperConfig& config,
                    double sample_interval, const std::vector<Observer>& observers) {
    if (!std::isfinite(T)) throw InvalidArgument("simulation horizon must be finite");
    if (!(initial.u.grid == initial.v.grid)) throw InvalidArgument("u and v live on different grids");
    require_diagonal(spec);
    Trajectory traj;
    traj.spec = spec;
    State s = initial;
    dealias_inplace(s.u.coeffs, s.u.grid);
    dealias_inplace(s.v.coeffs, s.v.grid);
    auto emit = [&](const State& st) {
        traj.states.push_back(st);
        for (const auto& ob : observers) ob(st);
    };
    emit(s);
    if (T == 0.0) return traj;

    const double adt = std::abs(config.dt);
    const long nsteps = std::max(1L, static_cast<long>(std::ceil(std::abs(T) / adt - 1e-9)));
    const double dt = T / static_cast<double>(nsteps);
    long stride = nsteps;
    if (sample_interval > 0.0)
        stride = std::clamp(static_cast<long>(std::llround(sample_interval / std::abs(dt))), 1L, nsteps);

    StepperConfig cfg = config;
    cfg.dt = dt;
    Stepper stepper(spec, s.u.grid, cfg);
    stepper.set_reference(s);
    const double t0 = s.t;
    long done = 0;
    while (done < nsteps) {
        const long chunk = std::min(stride, nsteps - done);
        stepper.advance(s, static_cast<int>(chunk), dt);
        done += chunk;
        s.t = t0 + dt * static_cast<double>(done);  // avoid accumulated drift in t
        emit(s);
    }
    if (T < 0.0) std::reverse(traj.states.begin(), traj.states.end());
    return traj;
}

namespace {

// Cumulative integrals I_m = int_0^{t_m} g for m = 0..M-1 on a uniform grid,
// composite Simpson with a 3/8 panel at the end for odd m.
template <class Vec>
std::vector<Vec> cumulative_simpson(const std::vector<Vec>& g, double h) {
    const int M = static_cast<int>(g.size());
    std::vector<Vec> I(M, Vec::Zero(g[0].size()));
    if (M < 3) throw InvalidArgument("Picard time grid needs at least 3 points");
    Vec even = Vec::Zero(g[0].size());  // Simpson over [0, t_{2j}]
    for (int m = 1; m < M; ++m) {
        if (m % 2 == 0) {
            even += (h / 3.0) * (g[m - 2] + 4.0 * g[m - 1] + g[m]);
            I[m] = even;
        } else if (m == 1) {
            I[m] = h * ((5.0 / 12.0) * g[0] + (8.0 / 12.0) * g[1] - (1.0 / 12.0) * g[2]);
        } else {
            // Simpson on [0, t_{m-3}] plus 3/8 rule on the last three intervals.
            I[m] = I[m - 3] + (3.0 * h / 8.0) * (g[m - 3] + 3.0 * g[m - 2] + 3.0 * g[m - 1] + g[m]);
        }
    }
    return I;
}

}  // namespace

PicardResult picard_iterate(const State& initial, const SystemSpec& spec, double T, const PicardOptions& opt) {
    if (!(T > 0.0)) throw InvalidArgument("Picard horizon must be positive");
    if (opt.time_resolution < 3) throw InvalidArgument("Picard time grid needs at least 3 points");
    if (opt.n_iters < 1) throw InvalidArgument("Picard needs at least one iteration");
    const auto [cu, cv] = require_diagonal(spec);
    const GridSpec& g = initial.u.grid;
    const int M = opt.time_resolution;
    const double h = T / (M - 1);
    const RVec c3 = cubes(g);
    RhsEvaluator rhs(canonical_form(spec), g);

    std::vector<double> t(M), free_w(M), duh_w(M);
    for (int m = 0; m < M; ++m) {
        t[m] = initial.t + h * m;
        const double tau = h * m;
        free_w[m] = opt.use_cutoff ? psi_cutoff(tau) : 1.0;
        duh_w[m] = opt.use_cutoff ? psi_cutoff(tau, T) : 1.0;
    }
    CVec u0 = initial.u.coeffs, v0 = initial.v.coeffs;
    dealias_inplace(u0, g);
    dealias_inplace(v0, g);

    auto make_traj = [&](const std::vector<CVec>& U, const std::vector<CVec>& V) {
        Trajectory tr;
        tr.spec = spec;
        for (int m = 0; m < M; ++m) tr.states.push_back(State{SpectralField(U[m], g), SpectralField(V[m], g), t[m]});
        return tr;
    };
    auto hs_norm = [&](const CVec& a, const CVec& b) {
        return std::sqrt(sobolev_norm_sq(SpectralField(a, g), opt.sobolev_s) +
                         sobolev_norm_sq(SpectralField(b, g), opt.sobolev_s));
    };

    std::vector<CVec> U(M), V(M);
    for (int m = 0; m < M; ++m) {
        U[m] = free_w[m] * group_factor(c3, cu, t[m] - initial.t).cwiseProduct(u0);
        V[m] = free_w[m] * group_factor(c3, cv, t[m] - initial.t).cwiseProduct(v0);
    }
    double scale = 0.0;
    for (int m = 0; m < M; ++m) scale = std::max(scale, hs_norm(U[m], V[m]));

    PicardResult res;
    if (opt.keep_iterates) res.iterates.push_back(make_traj(U, V));
    std::vector<CVec> gu(M), gv(M), nu(M), nv(M);
    const double floor_rel = 1e-11;
    for (int k = 0; k < opt.n_iters; ++k) {
        try {
            for (int m = 0; m < M; ++m) {
                const double tau = t[m] - initial.t;
                rhs(U[m], V[m], nu[m], nv[m], t[m]);
                // Interaction picture: g(t') = U(-t') N(w(t')).
                gu[m] = group_factor(c3, cu, -tau).cwiseProduct(nu[m]);
                gv[m] = group_factor(c3, cv, -tau).cwiseProduct(nv[m]);
            }
        } catch (const BlowupDetected&) {
            res.diverged = true;
            break;
        }
        const auto Iu = cumulative_simpson(gu, h);
        const auto Iv = cumulative_simpson(gv, h);
        double d = 0.0;
        for (int m = 0; m < M; ++m) {
            const double tau = t[m] - initial.t;
            const CVec eu = group_factor(c3, cu, tau), ev = group_factor(c3, cv, tau);
            CVec nu_m = eu.cwiseProduct(free_w[m] * u0 + duh_w[m] * Iu[m]);
            CVec nv_m = ev.cwiseProduct(free_w[m] * v0 + duh_w[m] * Iv[m]);
            d = std::max(d, hs_norm(nu_m - U[m], nv_m - V[m]));
            U[m] = std::move(nu_m);
            V[m] = std::move(nv_m);
        }
        if (!std::isfinite(d)) {
            res.diverged = true;
            break;
        }
        res.differences.push_back(d);
        if (opt.keep_iterates) res.iterates.push_back(make_traj(U, V));
        if (d > 1e12 * std::max(scale, 1e-300)) {
            res.diverged = true;
            break;
        }
        if (d <= floor_rel * std::max(scale, 1e-300)) {
            res.converged = true;
            break;
        }
    }
    const double floor_abs = floor_rel * std::max(scale, 1e-300) * 10.0;
    for (std::size_t k = 0; k + 1 < res.differences.size(); ++k)
        if (res.differences[k] > floor_abs && res.differences[k + 1] > floor_abs)
            res.contraction_ratio = std::max(res.contraction_ratio, res.differences[k + 1] / res.differences[k]);
    if (res.diverged && res.contraction_ratio < 1.0) res.contraction_ratio = std::max(1.0, res.contraction_ratio);
    if (!opt.keep_iterates) res.iterates.push_back(make_traj(U, V));
    return res;
}

}  // namespace ckdv
