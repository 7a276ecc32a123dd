#pragma once

#include <functional>
#include <vector>

#include "ckdv/systems.hpp"
#include "ckdv/trajectory.hpp"

namespace ckdv {

struct StepperConfig {
    /// Signed time step; negative values integrate backward in time.
    double dt = 1e-4;
    /// Abort when any mode exceeds cfl_guard times the initial largest mode.
    double cfl_guard = 1e8;
};

/// Apply exp(c dt d^3/dx^3) to each component, i.e. the group U_c(dt).
State linear_propagate(const State& state, const SystemSpec& spec, double dt);

/// Integrating-factor RK4 stepper for diagonal-dispersion systems.
class Stepper {
public:
    Stepper(const SystemSpec& spec, const GridSpec& grid, StepperConfig config);

    /// Advance in place by one step of config.dt.
    void step(State& s);
    /// Advance by `count` steps of size dt (may differ from config.dt).
    void advance(State& s, int count, double dt);

    /// Largest mode modulus of the state the guard compares against.
    void set_reference(const State& s);

private:
    void rk4(State& s, double dt);
    void check(const State& s, double last_valid_t) const;

    RhsEvaluator rhs_;
    StepperConfig config_;
    double c_u_, c_v_;
    RVec cube_;  // xi^3
    double reference_ = 0.0;
    double cached_dt_ = 0.0;
    CVec Eu_, Ev_;  // half-step integrating factors for cached_dt_
    CVec k1u_, k1v_, k2u_, k2v_, k3u_, k3v_, k4u_, k4v_, tu_, tv_;
};

/// One IF-RK4 step.
State step(const State& state, const SystemSpec& spec, const StepperConfig& config);

using Observer = std::function<void(const State&)>;

/// Evolve from initial.t to initial.t + T, sampling every `sample_interval`
/// (rounded to a whole number of steps) plus the end point. The step is
/// |config.dt| adjusted down so that T is hit exactly; its sign follows T.
/// Observers see samples in integration order; the returned trajectory is
/// sorted by increasing time.
Trajectory simulate(const State& initial, const SystemSpec& spec, double T, const StepperConfig& config,
                    double sample_interval, const std::vector<Observer>& observers = {});

struct PicardOptions {
    int n_iters = 20;
    /// Number of points of the uniform time grid on [0, T] (>= 3).
    int time_resolution = 201;
    /// Sobolev index of the sup-in-time difference norm.
    double sobolev_s = 1.0;
    /// Multiply the free and Duhamel terms by psi(t) and psi_T(t).
    bool use_cutoff = false;
    bool keep_iterates = true;
};

struct PicardResult {
    /// Iterates on the time grid; iterate 0 is the free evolution. Only the
    /// last iterate is kept unless keep_iterates is set.
    std::vector<Trajectory> iterates;
    /// d_k = sup_t ||iter_{k+1} - iter_k||_{H^s} (both components).
    std::vector<double> differences;
    /// max d_{k+1}/d_k over differences above the round-off floor.
    double contraction_ratio = 0.0;
    bool converged = false;
    bool diverged = false;
};

/// Successive approximation of the Duhamel fixed point
///   w(t) = U(t) w0 + int_0^t U(t - t') N(w(t')) dt'
/// with the time integral done by cumulative composite Simpson.
PicardResult picard_iterate(const State& initial, const SystemSpec& spec, double T, const PicardOptions& opt);

}  // namespace ckdv
