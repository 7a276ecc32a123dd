#include "ckdv/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ckdv/error.hpp"
#include "fft.hpp"

namespace ckdv {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;

// (-1)^k for the mode stored at idx; accounts for the grid starting at -L/2.
inline double shift_sign(const GridSpec& g, int idx) {
    return (g.mode(idx) & 1) ? -1.0 : 1.0;
}

void require_same_grid(const SpectralField& a, const SpectralField& b) {
    if (!(a.grid == b.grid)) throw InvalidArgument("spectral fields live on different grids");
}

}  // namespace

double GridSpec::dxi() const { return 2.0 * std::numbers::pi / period; }

int GridSpec::dealias_cutoff() const {
    // Small epsilon so that fraction 1 keeps the Nyquist mode.
    return static_cast<int>(std::floor(dealias_fraction * (n / 2) + 1e-9));
}

GridSpec make_grid(int n, double period, double dealias_fraction) {
    if (n < 16 || (n & (n - 1)) != 0)
        throw InvalidArgument("grid size " + std::to_string(n) + " is not a power of two >= 16");
    if (!(period > 0.0) || !std::isfinite(period))
        throw InvalidArgument("grid period must be positive");
    if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0))
        throw InvalidArgument("dealias fraction must lie in (0, 1]");
    return GridSpec{n, period, dealias_fraction};
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    require_same_grid(*this, o);
    coeffs += o.coeffs;
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    require_same_grid(*this, o);
    coeffs -= o.coeffs;
    return *this;
}

SpectralField& SpectralField::operator*=(double s) {
    coeffs *= s;
    return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

RVec grid_points(const GridSpec& g) {
    RVec x(g.n);
    for (int j = 0; j < g.n; ++j) x[j] = g.x(j);
    return x;
}

RVec wavenumbers(const GridSpec& g) {
    RVec xi(g.n);
    for (int j = 0; j < g.n; ++j) xi[j] = g.wavenumber(j);
    return xi;
}

SpectralField forward(const RVec& samples, const GridSpec& g) {
    if (samples.size() != g.n)
        throw InvalidArgument("sample count " + std::to_string(samples.size()) +
                              " does not match grid size " + std::to_string(g.n));
    CVec in = samples.cast<cplx>();
    CVec out;
    detail::dft(out, in);
    const double scale = g.dx() / kSqrt2Pi;
    for (int j = 0; j < g.n; ++j) out[j] *= scale * shift_sign(g, j);
    // Enforce exact Hermitian symmetry; round-off in the FFT breaks it at the
    // 1e-16 level and downstream realness checks are strict.
    for (int j = 1; j < g.n / 2; ++j) {
        const cplx avg = 0.5 * (out[j] + std::conj(out[g.n - j]));
        out[j] = avg;
        out[g.n - j] = std::conj(avg);
    }
    out[0] = out[0].real();
    out[g.n / 2] = out[g.n / 2].real();
    return SpectralField(std::move(out), g);
}

RVec inverse(const SpectralField& f) {
    const GridSpec& g = f.grid;
    CVec in(g.n);
    for (int j = 0; j < g.n; ++j) in[j] = f.coeffs[j] * shift_sign(g, j);
    CVec out;
    detail::idft(out, in);
    const double scale = kSqrt2Pi / g.period;
    return (out.real() * scale).eval();
}

SpectralField spectral_derivative(const SpectralField& f, int order) {
    if (order < 0) throw InvalidArgument("derivative order must be nonnegative");
    SpectralField out = f;
    if (order == 0) return out;
    const GridSpec& g = f.grid;
    for (int j = 0; j < g.n; ++j) {
        const double xi = g.wavenumber(j);
        // Powers of i handled by case so no spurious real parts appear.
        cplx m;
        switch (order % 4) {
            case 0: m = cplx(std::pow(xi, order), 0.0); break;
            case 1: m = cplx(0.0, std::pow(xi, order)); break;
            case 2: m = cplx(-std::pow(xi, order), 0.0); break;
            case 3: m = cplx(0.0, -std::pow(xi, order)); break;
        }
        out.coeffs[j] *= m;
    }
    if (order % 2 == 1) out.coeffs[g.n / 2] = 0.0;
    return out;
}

SpectralField fractional_derivative(const SpectralField& f, double s) {
    if (!(s >= 0.0)) throw InvalidArgument("fractional order must be >= 0");
    SpectralField out = f;
    if (s == 0.0) return out;
    for (int j = 0; j < f.grid.n; ++j) {
        const double xi = std::abs(f.grid.wavenumber(j));
        out.coeffs[j] *= (xi == 0.0) ? 0.0 : std::pow(xi, s);
    }
    return out;
}

void dealias_inplace(CVec& coeffs, const GridSpec& g) {
    const int kc = g.dealias_cutoff();
    for (int j = 0; j < g.n; ++j)
        if (std::abs(g.mode(j)) > kc) coeffs[j] = 0.0;
}

SpectralField dealias(const SpectralField& f) {
    SpectralField out = f;
    dealias_inplace(out.coeffs, f.grid);
    return out;
}

SpectralField product(const SpectralField& f, const SpectralField& g) {
    require_same_grid(f, g);
    const RVec p = inverse(f).cwiseProduct(inverse(g));
    return dealias(forward(p, f.grid));
}

double l2_norm_sq(const SpectralField& f) { return f.coeffs.squaredNorm() * f.grid.dxi(); }

double hermitian_defect(const SpectralField& f) {
    const int n = f.grid.n;
    const double scale = std::max(f.coeffs.cwiseAbs().maxCoeff(), 1e-300);
    double worst = std::abs(f.coeffs[0].imag()) + std::abs(f.coeffs[n / 2].imag());
    for (int j = 1; j < n / 2; ++j)
        worst = std::max(worst, std::abs(f.coeffs[j] - std::conj(f.coeffs[n - j])));
    return worst / scale;
}

double evaluate_at(const SpectralField& f, double y) {
    const GridSpec& g = f.grid;
    const double xi1 = g.dxi();
    double acc = f.coeffs[0].real();
    // Pair +k and -k modes; the Nyquist mode contributes its cosine part only.
    for (int k = 1; k < g.n / 2; ++k) {
        const cplx e = std::polar(1.0, xi1 * k * y);
        acc += 2.0 * (f.coeffs[k] * e).real();
    }
    acc += f.coeffs[g.n / 2].real() * std::cos(xi1 * (g.n / 2) * y);
    return acc * kSqrt2Pi / g.period;
}

}  // namespace ckdv
