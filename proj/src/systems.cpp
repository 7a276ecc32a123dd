#include "ckdv/systems.hpp"

#include <cmath>

#include "ckdv/error.hpp"
#include "fft.hpp"

namespace ckdv {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

bool finite(const Mat2& m) { return m.allFinite(); }

}  // namespace

void validate(const SystemSpec& spec) {
    std::visit(overloaded{
                   [](const HirotaSatsuma& s) {
                       if (!std::isfinite(s.a) || !std::isfinite(s.b))
                           throw InvalidArgument("HirotaSatsuma coefficients must be finite");
                   },
                   [](const Feng& s) {
                       if (!std::isfinite(s.a + s.b + s.c + s.d))
                           throw InvalidArgument("Feng coefficients must be finite");
                   },
                   [](const GearGrimshaw& s) {
                       if (!std::isfinite(s.a1 + s.a2 + s.a3 + s.b1 + s.b2 + s.r))
                           throw InvalidArgument("GearGrimshaw coefficients must be finite");
                       if (!(s.b1 > 0.0) || !(s.b2 > 0.0))
                           throw InvalidArgument("GearGrimshaw requires b1 > 0 and b2 > 0");
                   },
                   [](const GeneralCoupled& s) {
                       double sum = s.r;
                       for (double x : s.b) sum += x;
                       if (!finite(s.A) || !std::isfinite(sum))
                           throw InvalidArgument("GeneralCoupled coefficients must be finite");
                   },
                   [](const Sakovich& s) {
                       if (!finite(s.A0) || !finite(s.A1) || !finite(s.A2))
                           throw InvalidArgument("Sakovich coefficients must be finite");
                       if (s.A2.determinant() == 0.0)
                           throw InvalidArgument("Sakovich requires det(A2) != 0");
                   },
                   [](const Bilinear& s) {
                       if (!finite(s.D) || !finite(s.C[0]) || !finite(s.C[1]) || !finite(s.R))
                           throw InvalidArgument("Bilinear coefficients must be finite");
                   },
               },
               spec);
}

std::string system_name(const SystemSpec& spec) {
    return std::visit(overloaded{
                          [](const HirotaSatsuma&) { return std::string("hirota_satsuma"); },
                          [](const Feng&) { return std::string("feng"); },
                          [](const GearGrimshaw&) { return std::string("gear_grimshaw"); },
                          [](const GeneralCoupled&) { return std::string("general_coupled"); },
                          [](const Sakovich&) { return std::string("sakovich"); },
                          [](const Bilinear&) { return std::string("bilinear"); },
                      },
                      spec);
}

Bilinear canonical_form(const SystemSpec& spec) {
    validate(spec);
    Bilinear f;
    std::visit(overloaded{
                   [&](const HirotaSatsuma& s) {
                       f.D << s.a, 0.0, 0.0, -1.0;
                       f.C[0](0, 0) = 6.0 * s.a;
                       f.C[0](1, 1) = 2.0 * s.b;
                       f.C[1](0, 1) = -3.0;
                   },
                   [&](const Feng& s) {
                       f.D << s.a, 0.0, 0.0, -1.0;
                       f.C[0](0, 0) = 6.0 * s.a;
                       f.C[0](1, 1) = 2.0 * s.b;
                       f.C[1](0, 1) = -s.c;
                       f.C[1](1, 1) = -s.d;
                   },
                   [&](const GearGrimshaw& s) {
                       const double ib = 1.0 / s.b1;
                       f.D << -1.0, -s.a3, -s.b2 * s.a3 * ib, -ib;
                       f.C[0] << -1.0, -s.a2, -s.a2, -s.a1;
                       f.C[1] << -s.b2 * s.a2 * ib, -s.b2 * s.a1 * ib, -s.b2 * s.a1 * ib, -ib;
                       f.R(1, 1) = -s.r * ib;
                   },
                   [&](const GeneralCoupled& s) {
                       const auto& b = s.b;
                       f.D = -s.A;
                       f.C[0] << -b[1], -b[0], -b[0], -b[2];
                       f.C[1] << -b[4], -b[3], -b[3], -b[5];
                       f.R(1, 1) = -s.r;
                   },
                   [&](const Sakovich& s) {
                       const Mat2 inv = s.A2.inverse();
                       f.D = -inv;
                       const Mat2 M0 = -inv * s.A0;
                       const Mat2 M1 = -inv * s.A1;
                       for (int i = 0; i < 2; ++i) {
                           f.C[i](0, 0) = M0(i, 0);
                           f.C[i](1, 1) = M0(i, 1);
                           f.C[i](0, 1) = M1(i, 0);
                           f.C[i](1, 0) = M1(i, 1);
                       }
                   },
                   [&](const Bilinear& s) { f = s; },
               },
               spec);
    return f;
}

Dispersion dispersion_coeffs(const SystemSpec& spec) {
    const Bilinear f = canonical_form(spec);
    Dispersion d;
    d.diagonal = f.D(0, 1) == 0.0 && f.D(1, 0) == 0.0;
    if (d.diagonal) {
        d.c_u = f.D(0, 0);
        d.c_v = f.D(1, 1);
    }
    return d;
}

std::pair<double, double> require_diagonal(const SystemSpec& spec) {
    const Dispersion d = dispersion_coeffs(spec);
    if (!d.diagonal)
        throw NotDiagonal(system_name(spec) +
                          ": third-order terms couple u and v; diagonalize first");
    return {d.c_u, d.c_v};
}

FengFlags feng_flags(const Feng& f) { return {f.a + 1.0 != 0.0, f.b * f.c > 0.0}; }

State make_state(const RVec& u, const RVec& v, const GridSpec& g, double t) {
    return State{forward(u, g), forward(v, g), t};
}

RhsEvaluator::RhsEvaluator(const Bilinear& form, const GridSpec& grid)
    : form_(form), grid_(grid), xi_(wavenumbers(grid)), sign_(grid.n) {
    for (int j = 0; j < grid.n; ++j) sign_[j] = (grid.mode(j) & 1) ? -1.0 : 1.0;
    has_first_order_ = !form.R.isZero(0.0);
    buf_.resize(grid.n);
}

void RhsEvaluator::operator()(const CVec& u, const CVec& v, CVec& du, CVec& dv, double t) {
    const int n = grid_.n;
    const int h = n / 2;
    const cplx I(0.0, 1.0);
    const double to_phys = kSqrt2Pi / grid_.period;

    // Each component gets its own real transform so that an identically zero
    // field stays exactly zero.
    auto to_physical = [&](const CVec& c, int order, RVec& out) {
        buf_.resize(h + 1);
        for (int j = 0; j <= h; ++j) buf_[j] = (order ? I * xi_[j] : cplx(1.0)) * c[j] * sign_[j] * to_phys;
        if (order) buf_[h] = 0.0;
        else buf_[h] = buf_[h].real();
        detail::irdft(out, buf_, n);
    };
    to_physical(u, 0, w0_);
    to_physical(v, 0, w1_);
    to_physical(u, 1, d0_);
    to_physical(v, 1, d1_);

    const auto& C0 = form_.C[0];
    const auto& C1 = form_.C[1];
    const auto& R = form_.R;
    p0_.resize(n);
    p1_.resize(n);
    bool ok = true;
    for (int j = 0; j < n; ++j) {
        const double q00 = w0_[j] * d0_[j], q01 = w0_[j] * d1_[j], q10 = w1_[j] * d0_[j], q11 = w1_[j] * d1_[j];
        double p0 = C0(0, 0) * q00 + C0(0, 1) * q01 + C0(1, 0) * q10 + C0(1, 1) * q11;
        double p1 = C1(0, 0) * q00 + C1(0, 1) * q01 + C1(1, 0) * q10 + C1(1, 1) * q11;
        if (has_first_order_) {
            p0 += R(0, 0) * d0_[j] + R(0, 1) * d1_[j];
            p1 += R(1, 0) * d0_[j] + R(1, 1) * d1_[j];
        }
        ok = ok && std::isfinite(p0) && std::isfinite(p1);
        p0_[j] = p0;
        p1_[j] = p1;
    }
    if (!ok) throw BlowupDetected("non-finite value in nonlinear product", t);

    const double to_spec = grid_.dx() / kSqrt2Pi;
    const int kc = grid_.dealias_cutoff();
    auto to_spectral = [&](const RVec& p, CVec& out) {
        detail::rdft(buf_, p);
        out.setZero(n);
        for (int j = 0; j <= std::min(kc, h); ++j) {
            out[j] = buf_[j] * sign_[j] * to_spec;
            if (j > 0 && j < h) out[n - j] = std::conj(out[j]);
        }
        if (kc >= h) out[h] = out[h].real();
    };
    to_spectral(p0_, du);
    to_spectral(p1_, dv);
}

std::pair<SpectralField, SpectralField> nonlinear_rhs(const SystemSpec& spec, const State& state) {
    if (!(state.u.grid == state.v.grid)) throw InvalidArgument("u and v live on different grids");
    RhsEvaluator eval(canonical_form(spec), state.u.grid);
    SpectralField du(state.u.grid), dv(state.u.grid);
    eval(state.u.coeffs, state.v.coeffs, du.coeffs, dv.coeffs, state.t);
    return {std::move(du), std::move(dv)};
}

SpectralField reflect(const SpectralField& f) {
    return SpectralField(f.coeffs.conjugate(), f.grid);
}

State hs_as_kdv(const SpectralField& w0, double a) {
    if (a == 0.0) throw InvalidArgument("hs_as_kdv requires a != 0");
    return State{reflect(w0), SpectralField(w0.grid), 0.0};
}

}  // namespace ckdv
