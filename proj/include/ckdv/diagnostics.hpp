#pragma once

#include <optional>
#include <vector>

#include "ckdv/systems.hpp"
#include "ckdv/trajectory.hpp"

namespace ckdv {

/// sum (1 + xi^2)^s |c_k|^2 dxi, the discrete \int (1 + xi^2)^s |f^(xi)|^2 dxi.
double sobolev_norm_sq(const SpectralField& f, double s);
double sobolev_norm(const SpectralField& f, double s);

/// Samples of f on the `factor`-times finer grid of the same period.
RVec upsample(const SpectralField& f, int factor);

struct HsInvariants {
    double V, F;
};
/// V = \int ((1+a)/2 u_x^2 + b v_x^2 - (1+a) u^3 - b u v^2),  F = \int (u^2 + 2b/3 v^2).
HsInvariants hs_invariants(const State& s, double a, double b);

struct GgInvariants {
    double phi1, phi2, phi3, phi4;
};
/// Mass of u and v, phi3 = \int (b2 u^2 + b1 v^2), and the energy phi4.
GgInvariants gg_invariants(const State& s, const GearGrimshaw& p);

/// One row of the diagnostics CSV. Entries that do not apply to the system
/// being run are NaN; `valid` reflects only the applicable entries.
struct DiagnosticRecord {
    double t = 0.0;
    double V, F, phi1, phi2, phi3, phi4;
    double sobolev_u = 0.0, sobolev_v = 0.0;
    bool valid = true;
};

DiagnosticRecord make_record(const State& s, const SystemSpec& spec, double sobolev_s);

/// max_t |q(t) - q(0)| / |q(0)| for a selected column.
enum class Quantity { V, F, Phi1, Phi2, Phi3, Phi4 };
double relative_drift(const std::vector<DiagnosticRecord>& recs, Quantity q);

/// The five components of
///   max_t ||u||_r + ||u_x||_{L^4_T L^inf_x} + ||D^r u_x||_{L^inf_x L^2_T}
///   + (1+T)^{-1/2} ||u||_{L^2_x L^inf_T} + ||u_x||_{L^inf_x L^2_T}
/// over the samples with |t| <= T. `unweighted_l2linf` is component 4
/// without the (1+T)^{-1/2} factor.
struct MixedNorms {
    double max_sobolev = 0.0;
    double l4t_linfx_ux = 0.0;
    double linfx_l2t_dr_ux = 0.0;
    double weighted_l2x_linft = 0.0;
    double linfx_l2t_ux = 0.0;
    double unweighted_l2linf = 0.0;
    double total() const {
        return max_sobolev + l4t_linfx_ux + linfx_l2t_dr_ux + weighted_l2x_linft + linfx_l2t_ux;
    }
};

/// component 0 selects u, 1 selects v.
MixedNorms mixed_norms(const Trajectory& traj, double r, double T, int component = 0);

}  // namespace ckdv
