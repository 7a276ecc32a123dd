#include "ckdv/transforms.hpp"

#include <cmath>

#include "ckdv/error.hpp"

namespace ckdv {

Mat2 gg_dispersion_matrix(double b1, double b2, double a3) {
    if (!(b1 > 0.0) || !(b2 > 0.0)) throw InvalidArgument("Gear-Grimshaw requires b1, b2 > 0");
    Mat2 A;
    A << 1.0, a3, b2 * a3 / b1, 1.0 / b1;
    return A;
}

LambdaAlpha gg_lambda_alpha(double b1, double b2, double a3) {
    if (!(b1 > 0.0) || !(b2 > 0.0)) throw InvalidArgument("Gear-Grimshaw requires b1, b2 > 0");
    const double p = 1.0 - 1.0 / b1;
    const double lambda = std::sqrt(p * p + 4.0 * b2 * a3 * a3 / b1);
    const double s = 1.0 + 1.0 / b1;
    return {lambda, 0.5 * (s + lambda), 0.5 * (s - lambda)};
}

Bilinear conjugate(const Bilinear& form, const Mat2& M) {
    if (M.determinant() == 0.0) throw SingularTransform("conjugation by a singular matrix");
    const Mat2 Minv = M.inverse();
    Bilinear out;
    out.D = Minv * form.D * M;
    out.C = conjugate_quadratic<double>(form.C, M);
    out.R = Minv * form.R * M;
    return out;
}

namespace {

// Round-off from the similarity transform leaves ~1e-16 off-diagonal entries;
// those must be exactly zero for the solver's diagonal check.
void clean_offdiagonal(Mat2& D) {
    const double tol = 1e-12 * std::max(1.0, D.cwiseAbs().maxCoeff());
    if (std::abs(D(0, 1)) < tol) D(0, 1) = 0.0;
    if (std::abs(D(1, 0)) < tol) D(1, 0) = 0.0;
}

}  // namespace

SakovichReduction sakovich_reduce(const Sakovich& spec) {
    if (spec.A2.determinant() == 0.0) throw SingularTransform("Sakovich reduction needs det(A2) != 0");
    const Mat2 inv = spec.A2.inverse();
    const Diagonalization d = diagonalize<double>(inv);
    if (!d.eigenvalues_real) throw NotDiagonal("A2^{-1} has complex eigenvalues");
    if (!d.T) throw NotDiagonal("A2^{-1} is not diagonalizable");
    SakovichReduction r;
    // Keep the original variables when A2^{-1} is already diagonal.
    r.P = (inv(0, 1) == 0.0 && inv(1, 0) == 0.0) ? Mat2::Identity() : *d.T;
    r.reduced = conjugate(canonical_form(spec), r.P);
    clean_offdiagonal(r.reduced.D);
    return r;
}

OffDiagCoeffs gg_offdiag_coeffs(const GeneralCoupled& spec) {
    const Mat2& A = spec.A;
    if (A(0, 1) == 0.0) throw NotApplicable("gg_offdiag_coeffs requires a12 != 0");
    const Diagonalization d = diagonalize<double>(A);
    if (!d.eigenvalues_real || !d.eigenvalues_distinct || !d.T)
        throw NotApplicable("gg_offdiag_coeffs requires real distinct eigenvalues");
    const auto& b = spec.b;
    std::array<Mat2, 2> S;
    S[0] << b[1], b[0], b[0], b[2];
    S[1] << b[4], b[3], b[3], b[5];
    const auto G = conjugate_quadratic<double>(S, *d.T);
    OffDiagCoeffs out;
    out.kappa = A(0, 1) / (d.alpha_plus - d.alpha_minus);
    out.coeffs = {G[0](0, 0) / out.kappa, G[0](0, 1) / out.kappa, G[0](1, 1) / out.kappa,
                  G[1](0, 0) / out.kappa, G[1](0, 1) / out.kappa, G[1](1, 1) / out.kappa};
    out.T = *d.T;
    out.T_inv = *d.T_inv;
    Mat2 B = Mat2::Zero();
    B(1, 1) = spec.r;
    out.B1 = out.T_inv * B * out.T;
    return out;
}

ChangeOfVariables make_change_of_variables(const Diagonalization& d) {
    if (!d.eigenvalues_real) throw SingularTransform("complex eigenvalues");
    if (!d.nonzero) throw SingularTransform("zero eigenvalue: the x / alpha^{1/3} rescaling is undefined");
    if (!d.T) throw SingularTransform("dispersion matrix is not diagonalizable");
    return {*d.T, *d.T_inv, std::cbrt(d.alpha_plus), std::cbrt(d.alpha_minus)};
}

double boundary_level(const SpectralField& f) {
    const RVec x = inverse(f);
    const double peak = x.cwiseAbs().maxCoeff();
    if (peak == 0.0) return 0.0;
    const int edge = std::max(1, f.grid.n / 20);
    double m = 0.0;
    for (int j = 0; j < edge; ++j) m = std::max({m, std::abs(x[j]), std::abs(x[f.grid.n - 1 - j])});
    return m / peak;
}

SpectralField rescale(const SpectralField& f, double c, double scale) {
    const GridSpec& g = f.grid;
    RVec out(g.n);
    for (int j = 0; j < g.n; ++j) {
        const double y = c * g.x(j);
        out[j] = (y >= -0.5 * g.period && y < 0.5 * g.period) ? scale * evaluate_at(f, y) : 0.0;
    }
    return forward(out, g);
}

namespace {

constexpr double kDecayTolerance = 1e-12;

FieldPair mix(const Mat2& M, const SpectralField& a, const SpectralField& b, double c0, double c1) {
    // Row i of M mixes the inputs, then the result is rescaled by c_i.
    FieldPair out;
    out.decay_ok = boundary_level(a) < kDecayTolerance && boundary_level(b) < kDecayTolerance;
    const SpectralField a0 = rescale(a, c0), b0 = rescale(b, c0);
    const SpectralField a1 = rescale(a, c1), b1 = rescale(b, c1);
    out.first = M(0, 0) * a0 + M(0, 1) * b0;
    out.second = M(1, 0) * a1 + M(1, 1) * b1;
    return out;
}

}  // namespace

FieldPair forward_change(const ChangeOfVariables& cv, const SpectralField& u, const SpectralField& v) {
    return mix(cv.T_inv, u, v, cv.c_plus, cv.c_minus);
}

FieldPair inverse_change(const ChangeOfVariables& cv, const SpectralField& w1, const SpectralField& w2) {
    FieldPair out;
    out.decay_ok = boundary_level(w1) < kDecayTolerance && boundary_level(w2) < kDecayTolerance;
    const SpectralField r1 = rescale(w1, 1.0 / cv.c_plus), r2 = rescale(w2, 1.0 / cv.c_minus);
    out.first = cv.T(0, 0) * r1 + cv.T(0, 1) * r2;
    out.second = cv.T(1, 0) * r1 + cv.T(1, 1) * r2;
    return out;
}

ChangeOfVariables gg_change_of_variables(const GearGrimshaw& p) {
    return make_change_of_variables(diagonalize<double>(gg_dispersion_matrix(p.b1, p.b2, p.a3)));
}

std::pair<double, double> gg_forward_coefficients(const GearGrimshaw& p) {
    const ChangeOfVariables cv = gg_change_of_variables(p);
    return {cv.T_inv(0, 0), cv.T_inv(0, 1)};
}

Trajectory scaling_map(const Trajectory& traj, double lambda, std::vector<double> times) {
    if (!(lambda > 0.0)) throw InvalidArgument("scaling factor must be positive");
    if (traj.states.empty()) throw InvalidArgument("empty trajectory");
    const double l3 = lambda * lambda * lambda;
    if (times.empty())
        for (const auto& s : traj.states) times.push_back(s.t / l3);
    Trajectory out;
    out.spec = traj.spec;
    for (double t : times) {
        const State src = interpolate_state(traj, l3 * t);
        State s{rescale(src.u, lambda, lambda * lambda), rescale(src.v, lambda, lambda * lambda), t};
        out.states.push_back(std::move(s));
    }
    return out;
}

}  // namespace ckdv
