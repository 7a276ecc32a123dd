#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ckdv/bourgain.hpp"
#include "ckdv/cutoff.hpp"
#include "ckdv/error.hpp"
#include "test_util.hpp"

using namespace ckdv;

namespace {

constexpr double pi = std::numbers::pi;

SpaceTimeField random_field(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return random_space_time_field(16, 16, 16.0, 8.0, rng);
}

}  // namespace

TEST_CASE("bracket is generic in the scalar type") {
    CHECK(bracket(-2.5f) == 3.5f);
    CHECK(bracket(-2.5L) == 3.5L);
    CHECK(pointwise_bound(2.0L, 1.0L, -1.0L) == 1.5L);
}

TEST_CASE("space-time transform of a Gaussian") {
    // (2 pi)^{-1} \int\int e^{-i(x xi + t tau)} e^{-(x^2 + t^2)/2} = e^{-(xi^2 + tau^2)/2}.
    const int nx = 64, nt = 64;
    const double Lx = 24.0, Lt = 24.0;
    Eigen::MatrixXcd s(nx, nt);
    for (int j = 0; j < nx; ++j)
        for (int m = 0; m < nt; ++m) {
            const double x = -Lx / 2 + j * Lx / nx, t = -Lt / 2 + m * Lt / nt;
            s(j, m) = std::exp(-(x * x + t * t) / 2);
        }
    const SpaceTimeField F = space_time_transform(s, Lx, Lt);
    double err = 0.0;
    for (int i = 0; i < nx; ++i)
        for (int m = 0; m < nt; ++m)
            err = std::max(err, std::abs(F.coeffs(i, m) - std::exp(-(F.xi(i) * F.xi(i) + F.tau(m) * F.tau(m)) / 2)));
    CHECK(err < 1e-12);
}

TEST_CASE("b = 0 norms do not depend on a") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const SpaceTimeField F = random_field(seed);
        const double n1 = xsb_norm(F, {1.0, 0.3, 0.0, 0.0});
        CHECK(xsb_norm(F, {-1.0, 0.3, 0.0, 0.0}) == n1);
        CHECK(xsb_norm(F, {2.0, 0.3, 0.0, 0.0}) == n1);
    }
    CHECK_THROWS_AS(xsb_norm(random_field(1), {0.0, 0.0, 0.5, 0.0}), InvalidArgument);
}

TEST_CASE("norm is monotone in b off the characteristic") {
    SpaceTimeField F = random_field(9);
    const double a = -1.0;
    for (int i = 0; i < F.nx(); ++i)
        for (int m = 0; m < F.nt(); ++m)
            if (std::abs(F.tau(m) + a * std::pow(F.xi(i), 3)) < 1.0) F.coeffs(i, m) = 0.0;
    double prev = 0.0;
    for (double b : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const double v = xsb_norm(F, {a, 0.0, b, 0.0});
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("pointwise inequality and f_w") {
    for (auto [a, a0, a1] : {std::array{2.0, 1.0, -1.0}, std::array{-3.0, 0.5, 2.0}, std::array{0.2, 1.0, 3.0}}) {
        const LatticeScan sc = pointwise_scan(a, a0, a1, 200, 200);
        CHECK(sc.violations == 0);
        CHECK(sc.max_ratio <= sc.bound);
        CHECK(sc.points == 40000);
    }
    CHECK(f_w(0.3) == 0.5);
    CHECK(f_w(1.0) == 0.5);
    CHECK(f_w(3.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    const FwScan fw = f_w_scan(10.0, 2001);
    CHECK(fw.max_value == 0.5);
    CHECK(fw.plateau_min == 0.5);
}

TEST_CASE("embedding constant and check") {
    // theta = (2 - 1)/(-1 - 1) = -1/2.
    CHECK(embedding_constant(2.0, 1.0, -1.0, 0.6) == doctest::Approx(std::pow(1.5, 0.6) * std::pow(2.0, 0.6)));
    CHECK(embedding_constant(2.0, 1.0, -1.0, 0.4) == doctest::Approx(std::pow(1.5, 0.4)));
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const SpaceTimeField F = random_field(seed);
        CHECK(embedding_check(F, 2.0, 1.0, -1.0, 0.0, 0.6).pass);
        CHECK(embedding_check(F, -0.7, 3.0, 1.5, -0.5, 0.75).pass);
        const IntersectionRatio r = intersection_ratio(F, {1.0, -1.0}, {2.0, -3.0}, 0.0, 0.6);
        CHECK(r.pass);
        CHECK(r.lower <= r.ratio);
        CHECK(r.ratio <= r.upper);
    }
}

TEST_CASE("epsilon_s values") {
    CHECK(epsilon_s(0.0, PairKind::SameSign) == doctest::Approx(0.25));
    CHECK(epsilon_s(1.0, PairKind::Mixed) == doctest::Approx(0.5));
    CHECK(epsilon_s(-0.7, PairKind::SameSign) == doctest::Approx(2.0 / 15.0).epsilon(1e-12));
    CHECK(epsilon_s(-0.7, PairKind::Mixed) == doctest::Approx(-0.7 / 3.0 + 0.25).epsilon(1e-12));
    // On [-1/2, 0) the value at s' = -5/8 is used.
    CHECK(epsilon_s(-0.3, PairKind::SameSign) == doctest::Approx(epsilon_s(-0.625, PairKind::SameSign)));
    CHECK_THROWS_AS(epsilon_s(-0.75, PairKind::Mixed), InvalidArgument);
    CHECK(bilinear_admissible(0.0, 0.6, -0.4, PairKind::SameSign));
    CHECK_FALSE(bilinear_admissible(0.0, 0.6, 0.1, PairKind::SameSign));
}

TEST_CASE("free evolution ratio is the cutoff constant") {
    // Parseval: C_0 = \int |psi^|^2 = \int psi^2 dt.
    const double psi2 = integrate([](double t) { return psi_cutoff(t) * psi_cutoff(t); }, -2.0, 2.0, std::vector<double>{-1.0, 1.0}).value;
    CHECK(cutoff_weight(0.0) == doctest::Approx(psi2).epsilon(1e-6));

    const GridSpec g = make_grid(64, 16 * pi);
    std::vector<SpectralField> data;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        SpectralField u = testing::random_band_limited(g, 20, seed);
        data.push_back(u);
    }
    for (double s : {0.0, -0.6, 1.0}) {
        const ConstancyReport c = free_evolution_constancy(data, 1.0, s, 0.6, TimeGrid{});
        CHECK(c.cv < 1e-2);
        CHECK(c.mean == doctest::Approx(std::sqrt(cutoff_weight(0.6))).epsilon(2e-2));
    }
}

TEST_CASE("zero inputs give zero") {
    const GridSpec g = make_grid(32, 16.0);
    CHECK(cutoff_data_membership(SpectralField(g), 0.0, 0.6) == 0.0);
    const Eigen::VectorXcd z = Eigen::VectorXcd::Zero(32);
    const Eigen::VectorXcd r = Eigen::VectorXcd::Ones(32);
    CHECK(bilinear_ratio_for(z, r, 0.0, 0.6, -0.4, -1, -1, -1, BilinearOptions{}) == 0.0);
}

TEST_CASE("bilinear ratio is deterministic and flags inadmissible parameters") {
    BilinearOptions opt;
    opt.trials = 2;
    const BilinearResult a = bilinear_ratio(0.0, 0.6, -0.4, -1, -1, -1, 4, opt);
    const BilinearResult b = bilinear_ratio(0.0, 0.6, -0.4, -1, -1, -1, 4, opt);
    CHECK(a.max_ratio == b.max_ratio);
    CHECK(a.admissible);
    CHECK(a.ratios.size() == 2);
    CHECK(a.q10 <= a.median);
    CHECK(a.median <= a.q90);
    CHECK_FALSE(bilinear_ratio(0.0, 0.6, 0.1, -1, -1, -1, 4, opt).admissible);
}

TEST_CASE("non-equivalence preconditions") {
    CHECK_THROWS_AS(nonequivalence_demo(1, -1, 0, 0.5), HypothesisViolation);
    CHECK_THROWS_AS(nonequivalence_demo(0, -1, 0, 3), InvalidArgument);
}
