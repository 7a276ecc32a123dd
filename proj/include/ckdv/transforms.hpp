#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include "ckdv/systems.hpp"
#include "ckdv/trajectory.hpp"

namespace ckdv {

template <class Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;

/// Eigen-decomposition A = T diag(alpha_plus, alpha_minus) T^{-1}.
template <class Scalar>
struct DiagonalizationT {
    Scalar alpha_plus{}, alpha_minus{}, lambda{};
    std::optional<Matrix2<Scalar>> T, T_inv;
    bool eigenvalues_real = false;
    bool eigenvalues_distinct = false;
    bool nonzero = false;
    bool opposite = false;
};
using Diagonalization = DiagonalizationT<double>;

inline constexpr double kEigenTieTolerance = 1e-12;

/// Closed-form 2x2 eigen-decomposition with alpha_plus >= alpha_minus.
/// When a12 != 0 the eigenvector matrix is T = [[1, 1], [(a+ - a11)/a12, (a- - a11)/a12]].
/// Complex or defective spectra leave T empty and set the flags accordingly.
template <class Scalar>
DiagonalizationT<Scalar> diagonalize(const Matrix2<Scalar>& A) {
    using std::abs;
    using std::sqrt;
    DiagonalizationT<Scalar> d;
    const Scalar a11 = A(0, 0), a12 = A(0, 1), a21 = A(1, 0), a22 = A(1, 1);
    const Scalar half_tr = (a11 + a22) / Scalar(2);
    const Scalar disc = (a11 - a22) * (a11 - a22) + Scalar(4) * a12 * a21;
    const Scalar scale = std::max<Scalar>(Scalar(1), A.cwiseAbs().maxCoeff());
    if (disc < Scalar(0)) {
        d.alpha_plus = d.alpha_minus = half_tr;
        return d;
    }
    const Scalar root = sqrt(disc);
    d.eigenvalues_real = true;
    d.alpha_plus = half_tr + root / Scalar(2);
    d.alpha_minus = half_tr - root / Scalar(2);
    d.lambda = d.alpha_plus - d.alpha_minus;
    const Scalar tol = Scalar(kEigenTieTolerance) * scale;
    d.eigenvalues_distinct = d.lambda > tol;
    d.nonzero = abs(d.alpha_plus) > tol && abs(d.alpha_minus) > tol;
    d.opposite = abs(d.alpha_plus + d.alpha_minus) < Scalar(kEigenTieTolerance);

    Matrix2<Scalar> T;
    if (a12 != Scalar(0)) {
        if (!d.eigenvalues_distinct) return d;  // a12 != 0 with a double root is a Jordan block
        T << Scalar(1), Scalar(1), (d.alpha_plus - a11) / a12, (d.alpha_minus - a11) / a12;
    } else if (a21 != Scalar(0)) {
        if (!d.eigenvalues_distinct) return d;
        // Lower triangular: eigenvalues a11 and a22.
        const Matrix2<Scalar> cols = [&] {
            Matrix2<Scalar> c;
            c << a11 - a22, Scalar(0), a21, Scalar(1);
            return c;
        }();
        if (a11 >= a22) T = cols;
        else T << cols(0, 1), cols(0, 0), cols(1, 1), cols(1, 0);
    } else if (a11 >= a22) {
        T.setIdentity();
    } else {
        T << Scalar(0), Scalar(1), Scalar(1), Scalar(0);
    }
    d.T = T;
    d.T_inv = T.inverse();
    return d;
}

/// Dispersion matrix A of the Gear-Grimshaw system written as U_t + A U_xxx + ... = 0.
Mat2 gg_dispersion_matrix(double b1, double b2, double a3);

struct LambdaAlpha {
    double lambda, alpha_plus, alpha_minus;
};
/// lambda = sqrt((1 - 1/b1)^2 + 4 b2 a3^2 / b1), alpha_pm = (1 + 1/b1 +- lambda) / 2.
LambdaAlpha gg_lambda_alpha(double b1, double b2, double a3);

/// Linear change of unknowns W = M Z applied to the canonical quadratic form.
template <class Scalar>
std::array<Matrix2<Scalar>, 2> conjugate_quadratic(const std::array<Matrix2<Scalar>, 2>& C,
                                                   const Matrix2<Scalar>& M) {
    const Matrix2<Scalar> Minv = M.inverse();
    std::array<Matrix2<Scalar>, 2> out;
    for (int i = 0; i < 2; ++i) {
        out[i].setZero();
        for (int l = 0; l < 2; ++l) out[i] += Minv(i, l) * (M.transpose() * C[l] * M);
    }
    return out;
}

Bilinear conjugate(const Bilinear& form, const Mat2& M);

/// Reduction of a Sakovich system by U = P V with P^{-1} A2^{-1} P diagonal.
struct SakovichReduction {
    Bilinear reduced;
    Mat2 P;
};
SakovichReduction sakovich_reduce(const Sakovich& spec);

/// Constants a..f of the diagonalised quadratic term
///   C1(V) V_x = kappa [[a v1 + b v2, b v1 + c v2], [d v1 + e v2, e v1 + f v2]] V_x,
/// kappa = a12 / (alpha_plus - alpha_minus), together with B1 = T^{-1} B T.
struct OffDiagCoeffs {
    double kappa;
    std::array<double, 6> coeffs;  // a, b, c, d, e, f
    Mat2 T, T_inv, B1;
};
OffDiagCoeffs gg_offdiag_coeffs(const GeneralCoupled& spec);

/// U = T V followed by the per-component rescaling v_i(x) = w_i(x / c_i),
/// c_i = alpha_i^{1/3} (real cube root; negative means reflection).
struct ChangeOfVariables {
    Mat2 T, T_inv;
    double c_plus, c_minus;
};
ChangeOfVariables make_change_of_variables(const Diagonalization& d);

struct FieldPair {
    SpectralField first, second;
    /// False when the inputs did not decay below 1e-12 (relative) near the
    /// box edge, in which case the rescaled values are unreliable.
    bool decay_ok = true;
};

/// (u, v) -> (w1, w2) with w_i(x) = sum_j T_inv(i,j) U_j(c_i x).
FieldPair forward_change(const ChangeOfVariables& cv, const SpectralField& u, const SpectralField& v);
/// (w1, w2) -> (u, v) with U_j(x) = sum_i T(j,i) w_i(x / c_i).
FieldPair inverse_change(const ChangeOfVariables& cv, const SpectralField& w1, const SpectralField& w2);

ChangeOfVariables gg_change_of_variables(const GearGrimshaw& p);
/// First row of T^{-1}: ((1 - alpha_minus)/lambda, a3/lambda).
std::pair<double, double> gg_forward_coefficients(const GearGrimshaw& p);

/// Relative size of the field near the box edge (outer 5% on each side).
double boundary_level(const SpectralField& f);

/// Samples of x -> scale * f(c x) on the grid of f, values with |c x| >= L/2 set to zero.
SpectralField rescale(const SpectralField& f, double c, double scale = 1.0);

/// u_lambda(x, t) = lambda^2 u(lambda x, lambda^3 t) at the requested times.
/// With no times given, the source sample times divided by lambda^3 are used.
Trajectory scaling_map(const Trajectory& traj, double lambda, std::vector<double> times = {});

}  // namespace ckdv
