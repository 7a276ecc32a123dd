#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ckdv/diagnostics.hpp"
#include "ckdv/error.hpp"
#include "ckdv/solver.hpp"
#include "test_util.hpp"

using namespace ckdv;
using ckdv::testing::field;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("sobolev_norm") {
    const GridSpec g = make_grid(512, 64 * pi);
    CHECK(sobolev_norm(SpectralField(g), 1.0) == 0.0);
    const SpectralField f = field(g, [](double x) { return std::exp(-x * x / 2.0); });
    CHECK(sobolev_norm_sq(f, 0.0) == doctest::Approx(l2_norm_sq(f)).epsilon(1e-15));
    // f^ = exp(-xi^2/2): \int (1+xi^2) e^{-xi^2} = 3 sqrt(pi)/2, \int e^{-xi^2}/(1+xi^2) = pi e erfc(1)
    CHECK(std::abs(sobolev_norm_sq(f, 1.0) - 1.5 * std::sqrt(pi)) < 1e-6 * 1.5 * std::sqrt(pi));
    const double m1 = pi * std::exp(1.0) * std::erfc(1.0);
    CHECK(std::abs(sobolev_norm_sq(f, -1.0) - m1) < 1e-6 * m1);
    double prev = 0.0;
    for (double s = -2.0; s <= 2.0; s += 0.25) {
        const double v = sobolev_norm(f, s);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("Hirota-Satsuma invariants on trigonometric data") {
    const GridSpec g = make_grid(32, 2 * pi);
    const State zero{SpectralField(g), SpectralField(g), 0.0};
    const HsInvariants z = hs_invariants(zero, -0.5, 1.0);
    CHECK(z.V == 0.0);
    CHECK(z.F == 0.0);
    const State s{SpectralField(g), field(g, [](double x) { return std::sin(x); }), 0.0};
    const HsInvariants r = hs_invariants(s, -0.5, 1.0);
    CHECK(r.F == doctest::Approx(2.0 * pi / 3.0).epsilon(1e-14));
    // V = b \int v_x^2 = pi when u = 0.
    CHECK(r.V == doctest::Approx(pi).epsilon(1e-14));

    // Cubic term: u = cos x, v = 0, a = 0: V = pi/2 - \int cos^3 = pi/2.
    const State c{field(g, [](double x) { return 1.0 + std::cos(x); }), SpectralField(g), 0.0};
    // \int (1 + cos)^3 = 2 pi + 3 pi = 5 pi
    CHECK(hs_invariants(c, 0.0, 0.0).V == doctest::Approx(0.5 * pi - 5.0 * pi).epsilon(1e-13));
}

TEST_CASE("Gear-Grimshaw invariants on trigonometric data") {
    const GridSpec g = make_grid(32, 2 * pi);
    const State zero{SpectralField(g), SpectralField(g), 0.0};
    const GgInvariants z = gg_invariants(zero, GearGrimshaw{});
    CHECK(z.phi1 == 0.0);
    CHECK(z.phi3 == 0.0);
    CHECK(z.phi4 == 0.0);
    const SpectralField c = field(g, [](double x) { return std::cos(x); });
    const GgInvariants r = gg_invariants(State{c, c, 0.0}, GearGrimshaw{0, 0, 0, 1, 1, 0});
    CHECK(r.phi3 == doctest::Approx(2 * pi).epsilon(1e-14));
    CHECK(std::abs(r.phi1) < 1e-14);
    // phi4 = \int u_x^2 + v_x^2 - (u^3 + v^3)/3 = 2 pi for cosines (cubes integrate to 0).
    CHECK(r.phi4 == doctest::Approx(2 * pi).epsilon(1e-13));
    const SpectralField one = field(g, [](double) { return 1.0; });
    CHECK(gg_invariants(State{one, one, 0.0}, GearGrimshaw{}).phi2 == doctest::Approx(2 * pi).epsilon(1e-14));
}

TEST_CASE("short-run conservation") {
    // 512 points keep the data spectrum below round-off at the dealiasing cutoff.
    const GridSpec g = make_grid(512, 64 * pi);
    const State s0{field(g, [](double x) { return 0.5 * std::exp(-x * x / 8.0); }),
                   field(g, [](double x) { return 0.4 * std::exp(-(x - 1) * (x - 1) / 8.0); }), 0.0};
    const HirotaSatsuma hs{-0.5, 1.0};
    std::vector<DiagnosticRecord> recs;
    simulate(s0, hs, 0.2, StepperConfig{1e-3}, 0.05, {[&](const State& s) { recs.push_back(make_record(s, hs, 1.0)); }});
    CHECK(recs.size() == 5);
    CHECK(relative_drift(recs, Quantity::F) < 1e-9);
    CHECK(relative_drift(recs, Quantity::V) < 1e-7);
    CHECK(std::isnan(recs[0].phi1));
    CHECK(recs[0].valid);
}

TEST_CASE("mixed norms") {
    const GridSpec g = make_grid(128, 40.0);
    Trajectory zero;
    zero.spec = HirotaSatsuma{-0.5, 1};
    for (int i = -10; i <= 10; ++i) zero.states.push_back(State{SpectralField(g), SpectralField(g), 0.1 * i});
    CHECK(mixed_norms(zero, 1.0, 1.0).total() == 0.0);

    const SpectralField gx = field(g, [](double x) { return std::exp(-x * x); });
    Trajectory st = zero;
    for (auto& s : st.states) s.u = gx;
    const MixedNorms m = mixed_norms(st, 1.0, 1.0);
    const double sup_gx = inverse(spectral_derivative(gx, 1)).cwiseAbs().maxCoeff();
    CHECK(m.max_sobolev == doctest::Approx(sobolev_norm(gx, 1.0)).epsilon(1e-14));
    CHECK(m.l4t_linfx_ux == doctest::Approx(std::pow(2.0, 0.25) * sup_gx).epsilon(1e-12));
    CHECK(m.linfx_l2t_ux == doctest::Approx(std::sqrt(2.0) * sup_gx).epsilon(1e-12));
    CHECK(m.weighted_l2x_linft == doctest::Approx(std::sqrt(l2_norm_sq(gx) / 2.0)).epsilon(1e-12));
}

TEST_CASE("mixed norm components grow with the window") {
    const GridSpec g = make_grid(128, 40.0);
    const State s0{field(g, [](double x) { return 0.3 * std::exp(-x * x); }), SpectralField(g), 0.0};
    const HirotaSatsuma hs{-0.5, 1.0};
    Trajectory fwd = simulate(s0, hs, 1.0, StepperConfig{1e-3}, 0.01);
    const Trajectory bwd = simulate(s0, hs, -1.0, StepperConfig{1e-3}, 0.01);
    Trajectory all;
    all.spec = hs;
    all.states.assign(bwd.states.begin(), bwd.states.end() - 1);
    all.states.insert(all.states.end(), fwd.states.begin(), fwd.states.end());
    MixedNorms prev;
    for (double T : {0.1, 0.25, 0.5, 1.0}) {
        const MixedNorms m = mixed_norms(all, 1.0, T);
        CHECK(m.max_sobolev >= prev.max_sobolev);
        CHECK(m.l4t_linfx_ux >= prev.l4t_linfx_ux);
        CHECK(m.linfx_l2t_dr_ux >= prev.linfx_l2t_dr_ux);
        CHECK(m.unweighted_l2linf >= prev.unweighted_l2linf);
        CHECK(m.linfx_l2t_ux >= prev.linfx_l2t_ux);
        prev = m;
    }
}

TEST_CASE("smoothing ratio is stable under refinement") {
    // ||d_x U_a(t) u0||_{L^4_T L^inf_x} / ||u0||_{3/4} on two resolutions.
    auto ratio = [](int n, int m) {
        const double dt = 0.5 / m;
        const GridSpec g = make_grid(n, 40.0);
        const SpectralField u0 = field(g, [](double x) { return std::exp(-x * x) * std::cos(3 * x); });
        const HirotaSatsuma lin{-1.0, 0.0};
        Trajectory tr;
        tr.spec = lin;
        const State s{u0, SpectralField(g), 0.0};
        for (int i = -m; i <= m; ++i) tr.states.push_back(linear_propagate(s, lin, i * dt));
        return mixed_norms(tr, 0.75, 0.5).l4t_linfx_ux / sobolev_norm(u0, 0.75);
    };
    const double r1 = ratio(256, 100), r2 = ratio(512, 200);
    CHECK(std::abs(r1 - r2) < 0.02 * r2);
}
