#include "doctest.h"

#include <cmath>

#include "homflow/quadrature.hpp"

using namespace homflow;

TEST_CASE("gauss_legendre reproduces the classical low-order rules") {
    auto r2 = gauss_legendre(2);
    // roots of P_2: +-1/sqrt(3)
    CHECK(r2.x[0] == doctest::Approx(-0.5773502691896257).epsilon(1e-14));
    CHECK(r2.x[1] == doctest::Approx(0.5773502691896257).epsilon(1e-14));
    CHECK(r2.w[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r2.w[1] == doctest::Approx(1.0).epsilon(1e-14));

    auto r3 = gauss_legendre(3);
    // roots of P_3: 0, +-sqrt(3/5); weights 8/9, 5/9
    CHECK(r3.x[1] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(r3.x[2] == doctest::Approx(0.7745966692414834).epsilon(1e-14));
    CHECK(r3.w[1] == doctest::Approx(8.0 / 9.0).epsilon(1e-14));
    CHECK(r3.w[0] == doctest::Approx(5.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("gauss_legendre is exact on polynomials of degree 2n-1") {
    auto r = gauss_legendre(8);
    for (int k = 0; k <= 15; ++k) {
        double s = 0.0;
        for (size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * std::pow(r.x[i], k);
        double exact = (k % 2 == 0) ? 2.0 / (k + 1) : 0.0;
        CHECK(s == doctest::Approx(exact).epsilon(1e-13).scale(1.0));
    }
}

TEST_CASE("gauss_jacobi with zero exponents equals gauss_legendre") {
    auto gl = gauss_legendre(12);
    auto gj = gauss_jacobi(12, 0.0, 0.0);
    for (int i = 0; i < 12; ++i) {
        CHECK(gj.x[i] == doctest::Approx(gl.x[i]).epsilon(1e-12));
        CHECK(gj.w[i] == doctest::Approx(gl.w[i]).epsilon(1e-12));
    }
}

TEST_CASE("gauss_jacobi weights carry the exact total mass") {
    // int_{-1}^{1} (1-x)^{1/2} dx = (2/3) 2^{3/2}
    auto r = gauss_jacobi(10, 0.5, 0.0);
    double s = 0.0;
    for (double w : r.w) s += w;
    CHECK(s == doctest::Approx(1.8856180831641267).epsilon(1e-13));

    // int_{-1}^{1} (1-x)^{-1/2} dx = 2 sqrt(2); integrable endpoint singularity
    auto rs = gauss_jacobi(10, -0.5, 0.0);
    s = 0.0;
    for (double w : rs.w) s += w;
    CHECK(s == doctest::Approx(2.8284271247461903).epsilon(1e-13));
}

TEST_CASE("gauss_jacobi first moment matches the recurrence origin") {
    double a = 1.5, b = -0.25;
    auto r = gauss_jacobi(16, a, b);
    double m0 = 0.0, m1 = 0.0;
    for (size_t i = 0; i < r.x.size(); ++i) {
        m0 += r.w[i];
        m1 += r.w[i] * r.x[i];
    }
    double mu0 = std::exp((a + b + 1) * std::log(2.0) + std::lgamma(a + 1) +
                          std::lgamma(b + 1) - std::lgamma(a + b + 2));
    CHECK(m0 == doctest::Approx(mu0).epsilon(1e-13));
    CHECK(m1 / m0 == doctest::Approx((b - a) / (a + b + 2)).epsilon(1e-12));
}

TEST_CASE("gauss_jacobi agrees with adaptive integration on a smooth integrand") {
    double a = 0.5, b = 0.25;
    auto r = gauss_jacobi(40, a, b);
    double s = 0.0;
    for (size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * std::cos(r.x[i]);
    double ref = adaptive_simpson(
        [&](double x) {
            return std::pow(1.0 - x, a) * std::pow(1.0 + x, b) * std::cos(x);
        },
        -1.0, 1.0, 1e-12);
    CHECK(s == doctest::Approx(ref).epsilon(1e-9));
}

TEST_CASE("adaptive_simpson hits analytic values") {
    double v = adaptive_simpson([](double x) { return std::exp(x); }, 0.0, 1.0, 1e-12);
    CHECK(v == doctest::Approx(1.7182818284590452).epsilon(1e-12));
    double w = adaptive_simpson([](double x) { return 1.0 / (1.0 + x * x); }, 0.0, 1.0, 1e-12);
    CHECK(w == doctest::Approx(0.7853981633974483).epsilon(1e-12));
}

TEST_CASE("golden_max locates an interior maximum") {
    double x = golden_max([](double t) { return 1.0 - (t - 0.3) * (t - 0.3); }, 0.0, 1.0, 1e-10);
    CHECK(x == doctest::Approx(0.3).epsilon(1e-8));
}

TEST_CASE("panel_integrate converges on a smooth integrand") {
    auto rule = gauss_legendre(16);
    double v = panel_integrate([](double x) { return std::sin(x); }, 0.0, 3.0, 8, rule);
    CHECK(v == doctest::Approx(1.0 - std::cos(3.0)).epsilon(1e-13));
}
