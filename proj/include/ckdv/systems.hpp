#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>
#include <utility>
#include <variant>

#include "ckdv/grid.hpp"

namespace ckdv {

using Mat2 = Eigen::Matrix2d;

// Coefficient records hold the equations exactly as they are usually written;
// the canonical evolution form is produced by canonical_form().

/// u_t - a(u_xxx + 6 u u_x) = 2b v v_x,  v_t + v_xxx + 3 u v_x = 0.
struct HirotaSatsuma {
    double a = 0.0, b = 0.0;
};

/// Hirota-Satsuma first equation; second equation v_t + v_xxx + c u v_x + d v v_x = 0.
struct Feng {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
};

/// u_t + u_xxx + a3 v_xxx + u u_x + a1 v v_x + a2 (uv)_x = 0,
/// b1 v_t + v_xxx + b2 a3 u_xxx + v v_x + b2 a2 u u_x + b2 a1 (uv)_x + r v_x = 0.
struct GearGrimshaw {
    double a1 = 0.0, a2 = 0.0, a3 = 0.0, b1 = 1.0, b2 = 1.0, r = 0.0;
};

/// U_t + A U_xxx + B U_x + C(U) U_x = 0 with B = diag(0, r) and
/// C(U) = [[b2 u + b1 v, b1 u + b3 v], [b5 u + b4 v, b4 u + b6 v]].
struct GeneralCoupled {
    Mat2 A = Mat2::Identity();
    std::array<double, 6> b{};  // b[0] is b1, ..., b[5] is b6
    double r = 0.0;
};

/// U_xxx + A0 (u u_x, v v_x)^t + A1 (u v_x, v u_x)^t + A2 U_t = 0, det A2 != 0.
struct Sakovich {
    Mat2 A0 = Mat2::Zero(), A1 = Mat2::Zero(), A2 = Mat2::Identity();
};

/// Canonical quadratic form shared by every system:
///   d/dt w_i = sum_j D(i,j) w_j''' + sum_{j,k} C[i](j,k) w_j (w_k)_x + sum_j R(i,j) (w_j)_x.
struct Bilinear {
    Mat2 D = Mat2::Zero();
    std::array<Mat2, 2> C{Mat2::Zero(), Mat2::Zero()};
    Mat2 R = Mat2::Zero();
};

using SystemSpec = std::variant<HirotaSatsuma, Feng, GearGrimshaw, GeneralCoupled, Sakovich, Bilinear>;

/// Throws InvalidArgument when a constructor-level invariant fails
/// (GG needs b1, b2 > 0; Sakovich needs det A2 != 0; all entries finite).
void validate(const SystemSpec& spec);

std::string system_name(const SystemSpec& spec);

Bilinear canonical_form(const SystemSpec& spec);

/// Per-component coefficients c with linear flow exp(c t d^3/dx^3), i.e. the
/// group U_c. `diagonal` is false when the third-order terms couple u and v.
struct Dispersion {
    bool diagonal = false;
    double c_u = 0.0, c_v = 0.0;
};

Dispersion dispersion_coeffs(const SystemSpec& spec);
/// Same as dispersion_coeffs but throws NotDiagonal.
std::pair<double, double> require_diagonal(const SystemSpec& spec);

/// Reported (not enforced) conditions on Feng coefficients.
struct FengFlags {
    bool a_plus_one_nonzero;
    bool bc_positive;
};
FengFlags feng_flags(const Feng& f);

struct State {
    SpectralField u, v;
    double t = 0.0;
};

State make_state(const RVec& u, const RVec& v, const GridSpec& g, double t = 0.0);

/// Non-dispersive part of d/dt (u, v), products computed pseudo-spectrally and
/// dealiased. Throws BlowupDetected on non-finite values.
std::pair<SpectralField, SpectralField> nonlinear_rhs(const SystemSpec& spec, const State& state);

/// Hirota-Satsuma initial state (w0(-x), 0) whose u-component, read as
/// w(-x, a t), follows w_t + w_xxx + 6 w w_x = 0.
State hs_as_kdv(const SpectralField& w0, double a);

/// Spatial reflection x -> -x (conjugation of coefficients).
SpectralField reflect(const SpectralField& f);

/// Reusable evaluator of the canonical right-hand side. Holds scratch buffers,
/// so one instance must not be shared between threads.
class RhsEvaluator {
public:
    RhsEvaluator(const Bilinear& form, const GridSpec& grid);
    /// Writes the nonlinear part of d/dt into du, dv (spectral, dealiased).
    void operator()(const CVec& u, const CVec& v, CVec& du, CVec& dv, double t = 0.0);
    const GridSpec& grid() const { return grid_; }

private:
    Bilinear form_;
    GridSpec grid_;
    RVec xi_, sign_;
    CVec buf_;
    RVec w0_, w1_, d0_, d1_, p0_, p1_;
    bool has_first_order_;
};

}  // namespace ckdv
