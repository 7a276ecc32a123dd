#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "ckdv/quadrature.hpp"

using namespace ckdv;

namespace {

double boost_gk(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, 1e-13);
}

}  // namespace

TEST_CASE("polynomials up to degree 13 on one panel are exact") {
    for (int k = 0; k <= 13; ++k) {
        const QuadResult r = integrate([k](double x) { return std::pow(x, k); }, 0.0, 1.0, QuadOptions{1e-14, 0, 1, 1});
        CHECK(r.value == doctest::Approx(1.0 / (k + 1)).epsilon(1e-14));
    }
}

TEST_CASE("agrees with Boost Gauss-Kronrod") {
    const std::vector<std::function<double(double)>> fs{
        [](double x) { return 1.0 / (1.0 + 100.0 * x * x); },
        [](double x) { return std::exp(-x) * std::cos(5.0 * x); },
        [](double x) { return std::pow(1.0 + std::abs(x), -2.4); },
    };
    for (const auto& f : fs) {
        const double ours = integrate(f, -3.0, 5.0, std::vector<double>{0.0}).value;
        CHECK(ours == doctest::Approx(boost_gk(f, -3.0, 0.0) + boost_gk(f, 0.0, 5.0)).epsilon(1e-11));
    }
}

TEST_CASE("breakpoints resolve kinks") {
    // 0.3^2/2 + 0.7^2/2.
    auto f = [](double x) { return std::abs(x - 0.3); };
    const QuadResult r = integrate(f, 0.0, 1.0, std::vector<double>{0.3}, QuadOptions{1e-14, 0, 10, 1});
    CHECK(r.value == doctest::Approx(0.29).epsilon(1e-14));
    CHECK(r.converged);
}

TEST_CASE("panel budget exhaustion is reported") {
    auto f = [](double x) { return std::sin(1.0 / x); };
    const QuadResult r = integrate(f, 1e-4, 1.0, QuadOptions{1e-14, 0, 4, 1});
    CHECK_FALSE(r.converged);
}
