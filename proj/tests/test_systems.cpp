#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "ckdv/error.hpp"
#include "ckdv/systems.hpp"
#include "test_util.hpp"

using namespace ckdv;
using ckdv::testing::field;
using ckdv::testing::sample;

namespace {

constexpr double pi = std::numbers::pi;

double coeff_diff(const SpectralField& a, const SpectralField& b) {
    return (a.coeffs - b.coeffs).cwiseAbs().maxCoeff();
}

State random_state(const GridSpec& g, std::uint64_t seed) {
    return State{ckdv::testing::random_band_limited(g, g.dealias_cutoff(), seed),
                 ckdv::testing::random_band_limited(g, g.dealias_cutoff(), seed + 100), 0.0};
}

}  // namespace

TEST_CASE("dispersion coefficients") {
    const Dispersion hs = dispersion_coeffs(HirotaSatsuma{-0.5, 1.0});
    CHECK(hs.diagonal);
    CHECK(hs.c_u == -0.5);
    CHECK(hs.c_v == -1.0);

    GeneralCoupled gc;
    gc.A << -1.0, 0.0, 0.0, 1.0;
    const Dispersion d = dispersion_coeffs(gc);
    CHECK(d.diagonal);
    CHECK(d.c_u == 1.0);
    CHECK(d.c_v == -1.0);

    gc.A(0, 1) = 2.0;
    CHECK_FALSE(dispersion_coeffs(gc).diagonal);
    CHECK_THROWS_AS(require_diagonal(gc), NotDiagonal);

    CHECK(dispersion_coeffs(HirotaSatsuma{0.0, 1.0}).c_u == 0.0);
    const Dispersion gg = dispersion_coeffs(GearGrimshaw{0.3, 0.2, 0.0, 2.0, 1.0, 0.0});
    CHECK(gg.diagonal);
    CHECK(gg.c_u == -1.0);
    CHECK(gg.c_v == -0.5);
    CHECK_FALSE(dispersion_coeffs(GearGrimshaw{0, 0, 1.0, 1, 1, 0}).diagonal);
}

TEST_CASE("construction invariants") {
    CHECK_THROWS_AS(validate(GearGrimshaw{0, 0, 0, 0.0, 1.0, 0}), InvalidArgument);
    CHECK_THROWS_AS(validate(GearGrimshaw{0, 0, 0, 1.0, -1.0, 0}), InvalidArgument);
    Sakovich sk;
    sk.A2 << 1, 2, 2, 4;
    CHECK_THROWS_AS(validate(sk), InvalidArgument);
    CHECK_NOTHROW(validate(Feng{-1.0, 0.0, 0.0, 0.0}));
    CHECK_FALSE(feng_flags(Feng{-1.0, 1.0, 1.0, 0.0}).a_plus_one_nonzero);
    CHECK_FALSE(feng_flags(Feng{0.5, 1.0, -1.0, 0.0}).bc_positive);
}

TEST_CASE("zero state has zero right-hand side") {
    const GridSpec g = make_grid(32, 2 * pi);
    const State z{SpectralField(g), SpectralField(g), 0.0};
    for (const SystemSpec& spec : std::vector<SystemSpec>{HirotaSatsuma{1, 1}, GearGrimshaw{1, 2, 0, 1, 1, 0.5}}) {
        const auto [du, dv] = nonlinear_rhs(spec, z);
        CHECK(du.coeffs.cwiseAbs().maxCoeff() == 0.0);
        CHECK(dv.coeffs.cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("Hirota-Satsuma rhs with u = 0, v = sin x") {
    const GridSpec g = make_grid(32, 2 * pi);
    const double b = 1.7;
    const State s{SpectralField(g), field(g, [](double x) { return std::sin(x); }), 0.0};
    const auto [du, dv] = nonlinear_rhs(HirotaSatsuma{-0.5, b}, s);
    CHECK(ckdv::testing::max_abs_diff(inverse(du), sample(g, [&](double x) { return b * std::sin(2 * x); })) < 1e-13);
    CHECK(dv.coeffs.cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("Gear-Grimshaw rhs collapses when u = v") {
    const GridSpec g = make_grid(64, 2 * pi);
    const SpectralField u = ckdv::testing::random_band_limited(g, 10, 21);
    const GearGrimshaw p{0.4, -0.3, 0.0, 2.5, 1.5, 0.0};
    const auto [du, dv] = nonlinear_rhs(p, State{u, u, 0.0});
    const SpectralField uux = product(u, spectral_derivative(u, 1));
    const double k1 = -(1.0 + p.a1 + 2.0 * p.a2);
    const double k2 = -(1.0 + p.b2 * p.a2 + 2.0 * p.b2 * p.a1) / p.b1;
    CHECK(coeff_diff(du, k1 * uux) < 1e-13);
    CHECK(coeff_diff(dv, k2 * uux) < 1e-13);
}

TEST_CASE("Hirota-Satsuma with v = 0 is the KdV nonlinearity") {
    const GridSpec g = make_grid(128, 20.0);
    const SpectralField u = ckdv::testing::random_band_limited(g, g.dealias_cutoff(), 5);
    const double a = -0.7;
    const auto [du, dv] = nonlinear_rhs(HirotaSatsuma{a, 2.0}, State{u, SpectralField(g), 0.0});
    CHECK(coeff_diff(du, 6.0 * a * product(u, spectral_derivative(u, 1))) < 1e-12);
    CHECK(dv.coeffs.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Feng with c = 3, d = 0 equals Hirota-Satsuma") {
    const GridSpec g = make_grid(128, 20.0);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const State s = random_state(g, seed);
        const auto [hu, hv] = nonlinear_rhs(HirotaSatsuma{0.3, -1.1}, s);
        const auto [fu, fv] = nonlinear_rhs(Feng{0.3, -1.1, 3.0, 0.0}, s);
        CHECK(coeff_diff(hu, fu) == 0.0);
        CHECK(coeff_diff(hv, fv) == 0.0);
    }
}

TEST_CASE("GeneralCoupled reproduces Gear-Grimshaw with b1 = 1") {
    const GridSpec g = make_grid(128, 20.0);
    const GearGrimshaw gg{0.4, -0.8, 0.0, 1.0, 1.3, 0.6};
    GeneralCoupled gc;
    gc.A << 1.0, 0.0, 0.0, 1.0;  // U_t + A U_xxx: dispersion (-1, -1) in d/dt form
    gc.b = {gg.a2, 1.0, gg.a1, gg.b2 * gg.a1, gg.b2 * gg.a2, 1.0};
    gc.r = gg.r;
    const Dispersion dg = dispersion_coeffs(gc);
    CHECK(dg.c_u == -1.0);
    CHECK(dg.c_v == -1.0);
    const State s = random_state(g, 8);
    const auto [a1, a2] = nonlinear_rhs(gg, s);
    const auto [b1, b2] = nonlinear_rhs(gc, s);
    CHECK(coeff_diff(a1, b1) < 1e-13);
    CHECK(coeff_diff(a2, b2) < 1e-13);
}

TEST_CASE("right-hand side of a real state is real") {
    const GridSpec g = make_grid(64, 12.0);
    const State s = random_state(g, 77);
    Sakovich sk;
    sk.A0 << 1, 2, -1, 0.5;
    sk.A1 << 0.3, -0.2, 1, 1;
    sk.A2 << 2, 0.5, 0.1, 1;
    for (const SystemSpec& spec : std::vector<SystemSpec>{HirotaSatsuma{1, 1}, GearGrimshaw{1, 2, 0.5, 1, 1, 0.5}, sk}) {
        const auto [du, dv] = nonlinear_rhs(spec, s);
        CHECK(hermitian_defect(du) < 1e-12);
        CHECK(hermitian_defect(dv) < 1e-12);
    }
}

TEST_CASE("Sakovich canonical form follows the matrix form") {
    Sakovich sk;
    sk.A0 << 1, 2, 3, 4;
    sk.A1 << 5, 6, 7, 8;
    sk.A2 = Mat2::Identity();
    const Bilinear f = canonical_form(sk);
    CHECK(f.D == -Mat2::Identity());
    // row 0: -(1 u u_x + 2 v v_x + 5 u v_x + 6 v u_x)
    CHECK(f.C[0](0, 0) == -1);
    CHECK(f.C[0](1, 1) == -2);
    CHECK(f.C[0](0, 1) == -5);
    CHECK(f.C[0](1, 0) == -6);
    CHECK(f.C[1](0, 0) == -3);
    CHECK(f.C[1](1, 1) == -4);
    CHECK(f.C[1](0, 1) == -7);
    CHECK(f.C[1](1, 0) == -8);
}

TEST_CASE("non-finite products raise BlowupDetected") {
    const GridSpec g = make_grid(32, 2 * pi);
    State s{SpectralField(g), SpectralField(g), 0.5};
    s.u.coeffs[1] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(nonlinear_rhs(HirotaSatsuma{1, 1}, s), BlowupDetected);
}

TEST_CASE("hs_as_kdv reflects the data") {
    const GridSpec g = make_grid(64, 2 * pi);
    const SpectralField even = field(g, [](double x) { return std::exp(-x * x); });
    CHECK(coeff_diff(hs_as_kdv(even, -0.5).u, even) < 1e-15);
    const State s = hs_as_kdv(field(g, [](double x) { return std::sin(x); }), 2.0);
    CHECK(ckdv::testing::max_abs_diff(inverse(s.u), sample(g, [](double x) { return -std::sin(x); })) < 1e-14);
    CHECK(s.v.coeffs.cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(hs_as_kdv(even, 0.0), InvalidArgument);
}
