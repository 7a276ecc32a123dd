#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ckdv/error.hpp"
#include "ckdv/grid.hpp"
#include "test_util.hpp"

using namespace ckdv;
using ckdv::testing::field;
using ckdv::testing::sample;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("make_grid wavenumber table") {
    CHECK(make_grid(16, 2 * pi).wavenumber(1) == 1.0);
    CHECK(make_grid(16, 4 * pi).wavenumber(1) == 0.5);
    const GridSpec g = make_grid(16, 2 * pi);
    CHECK(g.mode(8) == 8);
    CHECK(g.mode(9) == -7);
    CHECK(g.mode(15) == -1);
    CHECK_THROWS_AS(make_grid(100, 1.0), InvalidArgument);
    CHECK_THROWS_AS(make_grid(8, 1.0), InvalidArgument);
    CHECK_THROWS_AS(make_grid(64, 0.0), InvalidArgument);
    CHECK_THROWS_AS(make_grid(64, -1.0), InvalidArgument);
}

TEST_CASE("forward of constant and single modes") {
    const GridSpec g = make_grid(32, 2 * pi);
    const SpectralField one = field(g, [](double) { return 1.0; });
    CHECK(std::abs(one.coeffs[0]) > 0.0);
    for (int j = 1; j < g.n; ++j) CHECK(std::abs(one.coeffs[j]) < 1e-14);
    // \int_{-pi}^{pi} 1 dx / sqrt(2 pi) = sqrt(2 pi)
    CHECK(one.coeffs[0].real() == doctest::Approx(std::sqrt(2 * pi)).epsilon(1e-14));

    const SpectralField c = field(g, [](double x) { return std::cos(x); });
    for (int j = 0; j < g.n; ++j) {
        if (std::abs(g.mode(j)) == 1) CHECK(std::abs(c.coeffs[j]) > 1.0);
        else CHECK(std::abs(c.coeffs[j]) < 1e-14);
    }
}

TEST_CASE("round trip and Parseval on random fields") {
    const GridSpec g = make_grid(256, 17.0);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const RVec x = ckdv::testing::random_real(g.n, seed);
        const SpectralField f = forward(x, g);
        CHECK(ckdv::testing::max_abs_diff(inverse(f), x) < 1e-12 * x.cwiseAbs().maxCoeff());
        CHECK(hermitian_defect(f) == 0.0);
        const double trap = x.squaredNorm() * g.dx();
        CHECK(std::abs(l2_norm_sq(f) - trap) < 1e-12 * trap);
    }
    CHECK_THROWS_AS(forward(RVec::Zero(10), g), InvalidArgument);
}

TEST_CASE("integer and fractional derivatives") {
    const GridSpec g = make_grid(64, 2 * pi);
    const SpectralField c = field(g, [](double x) { return std::cos(x); });
    const RVec dc = inverse(spectral_derivative(c, 1));
    CHECK(ckdv::testing::max_abs_diff(dc, sample(g, [](double x) { return -std::sin(x); })) < 1e-12);

    const SpectralField s2 = field(g, [](double x) { return std::sin(2 * x); });
    const RVec d3 = inverse(spectral_derivative(s2, 3));
    // Round-off in the empty modes is amplified by up to k_max^3 = 32^3.
    CHECK(ckdv::testing::max_abs_diff(d3, sample(g, [](double x) { return -8 * std::cos(2 * x); })) < 1e-10);

    const SpectralField one = field(g, [](double) { return 1.0; });
    CHECK(fractional_derivative(one, 0.5).coeffs.cwiseAbs().maxCoeff() == 0.0);

    // |k|^s on a single mode.
    const SpectralField c3 = field(g, [](double x) { return std::cos(3 * x); });
    const RVec h = inverse(fractional_derivative(c3, 0.5));
    CHECK(ckdv::testing::max_abs_diff(h, std::sqrt(3.0) * inverse(c3)) < 1e-12);

    // Odd derivatives kill the Nyquist mode.
    SpectralField nyq(g);
    nyq.coeffs[g.n / 2] = 1.0;
    CHECK(std::abs(spectral_derivative(nyq, 1).coeffs[g.n / 2]) == 0.0);
    CHECK(std::abs(spectral_derivative(nyq, 2).coeffs[g.n / 2]) > 0.0);
}

TEST_CASE("derivative is linear") {
    const GridSpec g = make_grid(128, 10.0);
    const SpectralField f = ckdv::testing::random_band_limited(g, 40, 3);
    const SpectralField h = ckdv::testing::random_band_limited(g, 40, 4);
    const double a = 0.7, b = -2.3;
    for (int order : {1, 2, 3}) {
        const SpectralField lhs = spectral_derivative(a * f + b * h, order);
        const SpectralField rhs = a * spectral_derivative(f, order) + b * spectral_derivative(h, order);
        CHECK((lhs.coeffs - rhs.coeffs).cwiseAbs().maxCoeff() <= 1e-12 * lhs.coeffs.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("dealias counts and idempotence") {
    const GridSpec g = make_grid(16, 2 * pi);
    CHECK(g.dealias_cutoff() == 5);
    const SpectralField white = forward(ckdv::testing::random_real(16, 9), g);
    const SpectralField d = dealias(white);
    int zeroed = 0;
    for (int j = 0; j < g.n; ++j) zeroed += (d.coeffs[j] == cplx(0.0) && white.coeffs[j] != cplx(0.0));
    CHECK(zeroed == 5);  // k = 6, 7, 8, -6, -7
    CHECK(dealias(d).coeffs == d.coeffs);
}

TEST_CASE("dealiased product equals projected exact product") {
    const GridSpec g = make_grid(64, 2 * pi);
    const int kc = g.dealias_cutoff();
    const SpectralField f = ckdv::testing::random_band_limited(g, kc, 11);
    const SpectralField h = ckdv::testing::random_band_limited(g, kc, 12);
    const SpectralField p = product(f, h);

    // Oracle: evaluate both factors exactly on a 4x finer grid and project.
    const GridSpec fine = make_grid(4 * g.n, g.period);
    RVec prod(fine.n);
    for (int j = 0; j < fine.n; ++j) prod[j] = evaluate_at(f, fine.x(j)) * evaluate_at(h, fine.x(j));
    const SpectralField P = forward(prod, fine);
    for (int j = 0; j < g.n; ++j) {
        const int k = g.mode(j);
        const cplx expect = std::abs(k) <= kc ? P.coeffs[k >= 0 ? k : fine.n + k] : cplx(0.0);
        CHECK(std::abs(p.coeffs[j] - expect) < 1e-12);
    }
}

TEST_CASE("evaluate_at reproduces samples") {
    const GridSpec g = make_grid(64, 7.0);
    const SpectralField f = ckdv::testing::random_band_limited(g, 20, 5);
    const RVec x = inverse(f);
    for (int j = 0; j < g.n; j += 7) CHECK(evaluate_at(f, g.x(j)) == doctest::Approx(x[j]).epsilon(1e-12));
}
