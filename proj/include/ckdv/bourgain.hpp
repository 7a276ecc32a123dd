#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ckdv/grid.hpp"
#include "ckdv/quadrature.hpp"

namespace ckdv {

/// <x> = 1 + |x|.
template <typename Scalar>
Scalar bracket(Scalar x) {
    using std::abs;
    return Scalar(1) + abs(x);
}

/// Parameters of an X^a_{s,b} norm; b_prime is carried for the estimates
/// that pair an X_{s,b} norm with an X_{s,b'} norm.
struct NormParams {
    double a = 1.0;
    double s = 0.0;
    double b = 0.0;
    double b_prime = 0.0;
};

/// Space-time Fourier coefficients on a periodic (x, t) box, normalised as
/// (2 pi)^{-1} \int\int e^{-i(x xi + t tau)} F(x, t) dx dt. Rows index xi,
/// columns index tau, both in FFT order. Fields may be complex-valued.
struct SpaceTimeField {
    Eigen::MatrixXcd coeffs;
    double period_x = 0.0;
    double period_t = 0.0;

    int nx() const { return static_cast<int>(coeffs.rows()); }
    int nt() const { return static_cast<int>(coeffs.cols()); }
    double dxi() const;
    double dtau() const;
    double xi(int i) const;
    double tau(int m) const;
};

/// Time sampling t_m = -L/2 + m L/n used to build space-time fields.
struct TimeGrid {
    int n = 256;
    double period = 8.0;

    double dt() const { return period / n; }
    double t(int m) const { return -0.5 * period + m * dt(); }
};

/// samples(j, m) = F(x_j, t_m) on the two uniform grids.
SpaceTimeField space_time_transform(const Eigen::MatrixXcd& samples, double period_x, double period_t);

/// rows(k, m) holds the x-Fourier coefficient (grid normalisation) of F at
/// time t_m; only the time transform is applied.
SpaceTimeField time_transform(const Eigen::MatrixXcd& rows, double period_x, double period_t);

/// sqrt( sum <tau + a xi^3>^{2b} <xi>^{2s} |F^|^2 dxi dtau ). Throws
/// InvalidArgument for a = 0.
double xsb_norm(const SpaceTimeField& F, const NormParams& p);

/// Same weight without the a != 0 restriction (a = 0 gives the plain
/// H^b_t H^s_x norm).
double weighted_norm(const SpaceTimeField& F, double a, double s, double b);

/// psi(t/T) U_a(t) u0 on the time grid, as a space-time field.
SpaceTimeField cutoff_free_evolution(const SpectralField& u0, double a, const TimeGrid& tg, double T = 1.0);

/// Complex Gaussian coefficients with a random exponential envelope; used as
/// generic test fields for the embedding inequalities.
SpaceTimeField random_space_time_field(int nx, int nt, double period_x, double period_t, std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// Embedding of X^a into X^{a0} + X^{a1}

/// (1 + |tau + a x|) / ((1 + |tau + a0 x|) + (1 + |tau + a1 x|)).
template <typename Scalar>
Scalar pointwise_ratio(Scalar x, Scalar tau, Scalar a, Scalar a0, Scalar a1) {
    return bracket<Scalar>(tau + a * x) / (bracket<Scalar>(tau + a0 * x) + bracket<Scalar>(tau + a1 * x));
}

/// <(a - a0)/(a1 - a0)>, the pointwise bound for pointwise_ratio.
template <typename Scalar>
Scalar pointwise_bound(Scalar a, Scalar a0, Scalar a1) {
    return bracket<Scalar>((a - a0) / (a1 - a0));
}

/// f(w) = 1/(|w - 1| + |w + 1|), evaluated piecewise so the plateau value is
/// exactly 1/2.
template <typename Scalar>
Scalar f_w(Scalar w) {
    if (w >= Scalar(1)) return Scalar(1) / (Scalar(2) * w);
    if (w <= Scalar(-1)) return Scalar(-1) / (Scalar(2) * w);
    return Scalar(1) / Scalar(2);
}

struct LatticeScan {
    double max_ratio = 0.0;
    double bound = 0.0;
    long points = 0;
    long violations = 0;
    bool pass = false;
};

/// Evaluates pointwise_ratio on an n_x by n_tau lattice covering
/// [-x_max, x_max] x [-tau_max, tau_max] and compares with pointwise_bound
/// without tolerance.
LatticeScan pointwise_scan(double a, double a0, double a1, int n_x = 1000, int n_tau = 1000, double x_max = 100.0,
                           double tau_max = 100.0);

struct FwScan {
    double max_value = 0.0;
    double plateau_min = 0.0;
    long points = 0;
};

/// f_w on n points of [-w_max, w_max]; plateau_min is the minimum over
/// |w| <= 1 (equal to max_value when the plateau is flat).
FwScan f_w_scan(double w_max, int n);

/// Constant of the integral embedding: <theta>^b 2^b for b > 1/2 and
/// <theta>^b for 0 <= b <= 1/2, theta = (a - a0)/(a1 - a0).
double embedding_constant(double a, double a0, double a1, double b);

struct EmbeddingCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double constant = 0.0;
    bool pass = false;
};

/// lhs = ||F||_{X^a_{s,b}}, rhs = ||F||_{X^{a0}_{s,b}} + ||F||_{X^{a1}_{s,b}};
/// pass iff lhs <= constant * rhs.
EmbeddingCheck embedding_check(const SpaceTimeField& F, double a, double a0, double a1, double s, double b);

struct IntersectionRatio {
    double ratio = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    bool pass = false;
};

/// ratio = ||F||_{X^{c0}} + ||F||_{X^{c1}} over ||F||_{X^{a0}} + ||F||_{X^{a1}}
/// for pairs first = (a0, a1), second = (c0, c1). The bounds follow from two
/// applications of the embedding per norm.
IntersectionRatio intersection_ratio(const SpaceTimeField& F, std::array<double, 2> first,
                                     std::array<double, 2> second, double s, double b);

// ---------------------------------------------------------------------------
// Non-equivalence of X^{a0} and X^{a1}

struct NonequivalenceRow {
    double R = 0.0;
    double norm_a0 = 0.0;
    double norm_a1 = 0.0;
};

struct NonequivalenceReport {
    /// 1: |v^|^2 = <xi>^{-2s-2b} <tau + a1 xi^3>^{-4b};
    /// 2: |v^|^2 = <xi>^{-d} <tau + a1 xi^3>^{-4b}.
    int construction = 1;
    double d = 0.0;
    std::vector<NonequivalenceRow> rows;
    double growth_exponent = 0.0;
    double a1_last_change = 0.0;
    bool a0_increasing = false;
};

/// Truncated norms over |xi|, |tau| <= R of the field built to lie in
/// X^{a1}_{s,b} but not in X^{a0}_{s,b}. Requires b > 1/2, a0, a1 != 0 and
/// either s > 1/2 - b or -3/2 <= s <= 0.
NonequivalenceReport nonequivalence_demo(double a0, double a1, double s, double b,
                                         const std::vector<double>& radii = {8, 16, 32, 64},
                                         const QuadOptions& quad = {1e-10, 0.0, 20000, 4});

// ---------------------------------------------------------------------------
// Linear estimates for the cutoff group and the Duhamel term

struct FreeEvolutionRatio {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
};

/// lhs = ||psi(t) U_a(t) u0||_{X^a_{s,b}}, rhs = ||u0||_s.
FreeEvolutionRatio free_evolution_ratio(const SpectralField& u0, double a, double s, double b, const TimeGrid& tg);

struct ConstancyReport {
    std::vector<double> ratios;
    double mean = 0.0;
    double cv = 0.0;
};

ConstancyReport free_evolution_constancy(const std::vector<SpectralField>& data, double a, double s, double b,
                                         const TimeGrid& tg);

/// Rows of psi_T(t) \int_0^t U_a(t - t') F(t') dt' for forcing rows F (same
/// layout as time_transform input).
Eigen::MatrixXcd duhamel_rows(const Eigen::MatrixXcd& forcing, const GridSpec& grid, double a, double T,
                              const TimeGrid& tg);

struct DuhamelRow {
    double T = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
};

struct DuhamelReport {
    std::vector<DuhamelRow> rows;
    double exponent = 0.0;
    double target = 0.0;
};

/// For each T the forcing is psi_T(t) e^{i sigma t/T} U_a(t) phi; reports
/// lhs = ||psi_T \int_0^t U_a(t-t') F||_{X^a_{s,b}}, rhs = ||F||_{X^a_{s,b'}}
/// and the least-squares slope of log(lhs/rhs) against log T. Requires
/// -1/2 < b' <= 0 <= b <= b' + 1 and 0 < T <= 1.
DuhamelReport duhamel_exponent(const SpectralField& phi, double a, double s, double b, double b_prime,
                               const std::vector<double>& Ts, double sigma, const TimeGrid& tg);

// ---------------------------------------------------------------------------
// Bilinear estimates

enum class PairKind { SameSign, Mixed };

/// Gap allowed between b' + 1 and b. SameSign: 1/4 for s >= 0,
/// min{-s - 1/2, s + 5/6} below -1/2; Mixed: 1/2 for s >= 0,
/// min{-s - 1/2, s/3 + 1/4} below -1/2. On [-1/2, 0) the value at the fixed
/// s' = -5/8 is used. Requires s > -3/4.
double epsilon_s(double s, PairKind kind);

/// -1/2 < b' < 0, 1/2 < b <= b' + 1 and b' + 1 - b <= epsilon_s(s, kind).
bool bilinear_admissible(double s, double b, double b_prime, PairKind kind);

struct BilinearOptions {
    /// Frequencies sit on the midpoint lattice (k + 1/2) dxi, so no input
    /// mode is exactly at xi = 0.
    double dxi = 0.5;
    /// Input amplitudes are <xi>^{-s-envelope} times CN(0, 1).
    double envelope = 1.0;
    int trials = 4;
    std::uint64_t seed = 1;
    /// Half-width of the tau window around each resonance centre.
    double window = 80.0;
    double dtau = 0.05;
};

struct BilinearResult {
    double max_ratio = 0.0;
    std::vector<double> ratios;
    double q10 = 0.0;
    double median = 0.0;
    double q90 = 0.0;
    bool admissible = false;
};

/// ||(uv)_x||_{X^{a_out}_{s,b'}} / (||u||_{X^{a_left}_{s,b}} ||v||_{X^{a_right}_{s,b}})
/// for u = psi(t) U_{a_left}(t) u0, v = psi(t) U_{a_right}(t) v0 with random
/// u0, v0 supported in |xi| <= band. Trials with a zero input are skipped.
BilinearResult bilinear_ratio(double s, double b, double b_prime, double a_left, double a_right, double a_out,
                              int band, const BilinearOptions& opt = {});

/// One trial with caller-supplied input amplitudes on the midpoint lattice
/// (size 2 band / dxi). Returns 0 when either input vanishes.
double bilinear_ratio_for(const Eigen::VectorXcd& u0, const Eigen::VectorXcd& v0, double s, double b,
                          double b_prime, double a_left, double a_right, double a_out, const BilinearOptions& opt);

/// \int <sigma>^{2b} |psi^(sigma)|^2 d sigma, so that
/// ||psi(t) U_a(t) u0||_{X^a_{s,b}}^2 = C_b sum <xi>^{2s} |u0^|^2 dxi.
double cutoff_weight(double b);

// ---------------------------------------------------------------------------
// Cutoff data psi(t) u0(x)

struct MembershipNorms {
    double x_plus = 0.0;
    double x_minus = 0.0;
};

/// ||psi(t) u0(x)|| in X^{1}_{s,b} and X^{-1}_{s,b}.
MembershipNorms cutoff_data_norms(const SpectralField& u0, double s, double b, const TimeGrid& tg = {});

/// Larger of the two norms above.
double cutoff_data_membership(const SpectralField& u0, double s, double b, const TimeGrid& tg = {});

struct MembershipRung {
    int nx = 0;
    double x_plus = 0.0;
    double x_minus = 0.0;
};

struct MembershipReport {
    std::vector<MembershipRung> rungs;
    double last_change = 0.0;
    bool stable = false;
};

/// Doubles n_x (fixed period) and n_t at each rung with coefficients
/// u0_hat(xi_k); stable iff both norms change by < tol between the last two
/// rungs.
MembershipReport membership_ladder(const std::function<double(double)>& u0_hat, double period, int n0, int rungs,
                                   double s, double b, TimeGrid tg = {}, double tol = 1e-2);

}  // namespace ckdv
