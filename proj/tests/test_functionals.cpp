#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "homflow/field.hpp"
#include "homflow/functionals.hpp"
#include "homflow/profile.hpp"
#include "homflow/quadrature.hpp"

using namespace homflow;

namespace {

ThetaProfile solved(double c1, double c2, double c3, double gamma) {
    return solve_profile({c1, c2, c3, gamma}, {}, 1e-8);
}

double landau_u(double g, double y) {
    return 2.0 * g * (1.0 - y) * (1.0 + y) / (2.0 + g * y);
}

double landau_du(double g, double y) {
    const double d = 2.0 + g * y;
    return -2.0 * g * (g * y * y + 4.0 * y + g) / (d * d);
}

// r|u| for the closed-form family, smooth away from the poles.
double landau_m(double g, double y) {
    const double one_m_y2 = (1.0 - y) * (1.0 + y);
    const double u = landau_u(g, y);
    const double du = landau_du(g, y);
    return std::sqrt(du * du + u * u / one_m_y2);
}

double norm3(const Vec3& v) {
    return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

double frob(const Mat3& m) {
    double s = 0.0;
    for (const auto& row : m)
        for (double v : row) s += v * v;
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("b of the zero profile is exactly zero") {
    const BResult r = compute_b(solved(0.0, 0.0, 0.0, 0.0));
    CHECK(r.value == 0.0);
    CHECK(r.error == 0.0);
}

TEST_CASE("b vanishes within its error estimate for symmetric forcing at gamma zero") {
    for (double c3 : {0.4, 0.2, 0.1}) {
        CAPTURE(c3);
        const BResult r = compute_b(solved(0.0, 0.0, c3, 0.0));
        CHECK(std::abs(r.value) <= r.error);
        CHECK(r.error < 1e-8);
    }
}

TEST_CASE("b changes sign under profile reflection") {
    const BResult fwd = compute_b(solved(0.0, 0.0, 0.7, 0.5));
    const BResult rev = compute_b(solved(0.0, 0.0, 0.7, -0.5));
    CHECK(std::abs(fwd.value) > 1e-4);
    CHECK(std::abs(fwd.value + rev.value) <= fwd.error + rev.error + 1e-12);
}

TEST_CASE("refining the panel count moves b by less than the reported error") {
    const ThetaProfile p = solved(0.0, 0.0, 0.7, 0.5);
    const BResult coarse = compute_b(p, {64, 1e-10});
    const BResult fine = compute_b(p, {128, 1e-10});
    CHECK(std::abs(coarse.value - fine.value) <= coarse.error);
    CHECK(fine.error <= coarse.error * 4.0 + 1e-15);
}

TEST_CASE("b rejects profiles with nonzero endpoint values") {
    const ThetaProfile extremal = solve_profile({0.0, 0.0, 0.0, 2.0}, {}, 1e-8);
    CHECK(extremal.endpoint_minus == doctest::Approx(4.0));
    CHECK_THROWS_AS((void)compute_b(extremal), DivergingError);
}

TEST_CASE("b validates its quadrature spec") {
    const ThetaProfile p = solved(0.0, 0.0, 0.0, 0.0);
    CHECK_THROWS_AS((void)compute_b(p, {1, 1e-10}), std::invalid_argument);
    CHECK_THROWS_AS((void)compute_b(p, {64, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS((void)compute_b(p, {64, 0.5}), std::invalid_argument);
}

TEST_CASE("K of the zero field is zero") {
    const VelocityField f(solved(0.0, 0.0, 0.0, 0.0));
    const KReport k = compute_K(f);
    CHECK(k.k_cone == 0.0);
    CHECK(k.k_outer == 0.0);
    CHECK(k.k_grad == 0.0);
}

TEST_CASE("K speed entries match a dense closed-form scan for c = 0") {
    const double g = 1.0;
    const VelocityField f(solved(0.0, 0.0, 0.0, g));
    const KReport k = compute_K(f);

    const double s_cone = std::exp(-1.0);
    const double y_cut = std::sqrt((1.0 - s_cone) * (1.0 + s_cone));
    double outer_ref = 0.0;
    double cone_ref = 0.0;
    const int n = 2000000;
    for (int i = 0; i <= n; ++i) {
        const double y = -1.0 + 2.0 * static_cast<double>(i) / n;
        if (std::abs(y) >= 1.0) continue;
        const double s = std::sqrt((1.0 - y) * (1.0 + y));
        const double m = landau_m(g, y);
        if (std::abs(y) <= y_cut) outer_ref = std::max(outer_ref, m);
        if (s <= s_cone) cone_ref = std::max(cone_ref, std::sqrt(s) * m);
    }
    for (double y : {-y_cut, y_cut}) {
        outer_ref = std::max(outer_ref, landau_m(g, y));
        cone_ref = std::max(cone_ref, std::sqrt(s_cone) * landau_m(g, y));
    }
    CHECK(k.k_outer == doctest::Approx(outer_ref).epsilon(1e-6));
    CHECK(k.k_cone == doctest::Approx(cone_ref).epsilon(1e-6));
    CHECK(k.k_grad > 0.0);
}

TEST_CASE("K entries shrink with the forcing amplitude") {
    KReport prev{0.0, 0.0, 0.0};
    bool first = true;
    for (double c3 : {1.0, 0.5, 0.25}) {
        CAPTURE(c3);
        const KReport k = compute_K(VelocityField(solved(0.0, 0.0, c3, 0.0)));
        CHECK(k.k_cone > 0.0);
        CHECK(k.k_outer > 0.0);
        CHECK(k.k_grad > 0.0);
        if (!first) {
            CHECK(k.k_cone < prev.k_cone);
            CHECK(k.k_outer < prev.k_outer);
            CHECK(k.k_grad < prev.k_grad);
        }
        prev = k;
        first = false;
    }
}

TEST_CASE("weighted magnitudes are radius-independent to the last bit") {
    const VelocityField f(solved(0.0, 0.0, 1.0, 0.0));
    for (double theta : {0.2, 1.0, 2.5}) {
        CAPTURE(theta);
        for (double r : {0.35, 1.0, 7.0}) {
            CAPTURE(r);
            const Vec3 x = to_cartesian({r, theta, 0.9});
            const Vec3 x2 = {2.0 * x[0], 2.0 * x[1], 2.0 * x[2]};
            const double rho = std::hypot(x[0], x[1]);
            const double rr = norm3(x);

            const double cone_a = std::sqrt(rho * rr) * norm3(eval_velocity(f, x));
            const double cone_b =
                std::sqrt(4.0 * rho * rr) * norm3(eval_velocity(f, x2));
            CHECK(cone_a == cone_b);

            const double outer_a = rr * norm3(eval_velocity(f, x));
            const double outer_b = 2.0 * rr * norm3(eval_velocity(f, x2));
            CHECK(outer_a == outer_b);

            const double grad_a = rho * rr * frob(eval_gradient(f, x));
            const double grad_b = 4.0 * rho * rr * frob(eval_gradient(f, x2));
            CHECK(grad_a == grad_b);
        }
    }
}

TEST_CASE("cone weight factor sqrt(s) ln(1/s) peaks at 2/e") {
    const double two_over_e = 2.0 * std::exp(-1.0);
    double best = 0.0;
    double best_s = 0.0;
    for (int i = 1; i <= 400000; ++i) {
        const double s = std::exp(-1.0) * static_cast<double>(i) / 400000;
        const double v = std::sqrt(s) * std::log(1.0 / s);
        CHECK(v <= two_over_e + 1e-15);
        if (v > best) {
            best = v;
            best_s = s;
        }
    }
    CHECK(best == doctest::Approx(two_over_e).epsilon(1e-9));
    CHECK(best_s == doctest::Approx(std::exp(-2.0)).epsilon(1e-4));
}

TEST_CASE("pointwise cone bound holds on random samples") {
    const double worst = pu09_check(200000);
    CHECK(worst <= 1e-12);
    CHECK(worst >= -0.05);
    CHECK(pu09_check(100, 1ULL) == pu09_check(100, 1ULL));
    CHECK_THROWS_AS((void)pu09_check(0), std::invalid_argument);
}

TEST_CASE("|t ln t| attains 1/e at t = 1/e") {
    const double t = std::exp(-1.0);
    CHECK(std::abs(t * std::log(t)) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    for (double tt : {0.05, 0.2, 0.5, 0.9, 0.999}) {
        CHECK(std::abs(tt * std::log(tt)) <= std::exp(-1.0) + 1e-15);
    }
}
