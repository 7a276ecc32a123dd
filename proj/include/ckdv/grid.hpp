#pragma once

#include <Eigen/Dense>
#include <complex>

namespace ckdv {

using cplx = std::complex<double>;
using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;

/// Periodic grid on [-L/2, L/2) with n points.
///
/// Storage is FFT order: index j holds mode k = j for j <= n/2 and k = j - n
/// otherwise, so k runs over {-n/2+1, ..., n/2}.
struct GridSpec {
    int n = 0;
    double period = 0.0;
    double dealias_fraction = 2.0 / 3.0;

    double dx() const { return period / n; }
    double dxi() const;
    double x(int j) const { return -0.5 * period + j * dx(); }
    int mode(int idx) const { return idx <= n / 2 ? idx : idx - n; }
    double wavenumber(int idx) const { return dxi() * mode(idx); }
    /// Largest |k| kept by dealias().
    int dealias_cutoff() const;

    bool operator==(const GridSpec&) const = default;
};

GridSpec make_grid(int n, double period, double dealias_fraction = 2.0 / 3.0);

/// Fourier coefficients of a real field, normalised so that
/// coeffs[k] approximates (2 pi)^{-1/2} \int e^{-i xi_k x} f(x) dx.
struct SpectralField {
    CVec coeffs;
    GridSpec grid;

    SpectralField() = default;
    explicit SpectralField(const GridSpec& g) : coeffs(CVec::Zero(g.n)), grid(g) {}
    SpectralField(CVec c, const GridSpec& g) : coeffs(std::move(c)), grid(g) {}

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(double s);
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

/// Sample coordinates x_j.
RVec grid_points(const GridSpec& g);
/// Wavenumbers xi in storage order.
RVec wavenumbers(const GridSpec& g);

SpectralField forward(const RVec& samples, const GridSpec& g);
RVec inverse(const SpectralField& f);

/// Multiplier (i xi)^order. The Nyquist mode is zeroed for odd orders so the
/// result stays real.
SpectralField spectral_derivative(const SpectralField& f, int order);
/// Multiplier |xi|^s, s >= 0, with |0|^s = 0 for s > 0.
SpectralField fractional_derivative(const SpectralField& f, double s);

/// Zero every mode with |k| > dealias_fraction * n/2.
SpectralField dealias(const SpectralField& f);
void dealias_inplace(CVec& coeffs, const GridSpec& g);

/// Pseudo-spectral product f*g, dealiased.
SpectralField product(const SpectralField& f, const SpectralField& g);

/// Sum |c_k|^2 dxi; equals the trapezoid value of \int f^2 dx.
double l2_norm_sq(const SpectralField& f);

/// Max relative deviation from coeffs(-k) = conj(coeffs(k)).
double hermitian_defect(const SpectralField& f);

/// Exact trigonometric interpolant at an arbitrary point y (periodic).
double evaluate_at(const SpectralField& f, double y);

}  // namespace ckdv
