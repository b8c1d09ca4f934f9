#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "homflow/decay.hpp"

using namespace homflow;

TEST_CASE("decay constant approaches one as q -> 3") {
    for (double tau : {0.1, 0.5, 0.9}) {
        CAPTURE(tau);
        CHECK(sharp_constant(3.0 + 1e-8, tau) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("decay constant large-q limit") {
    const double pi = 3.14159265358979323846;
    const double tau = 0.5;
    const double limit =
        1.0 / (std::pow(3.0, 1.75) * std::exp(2.0) * std::sqrt(4.0 * pi * (1.0 - tau)));
    CHECK(sharp_constant(1e8, tau) == doctest::Approx(limit).epsilon(1e-6));
}

TEST_CASE("closed form and quadrature agree across the grid") {
    for (double q : {3.5, 4.0, 6.0, 9.0, 20.0}) {
        for (double tau : {0.1, 0.5, 0.9}) {
            CAPTURE(q);
            CAPTURE(tau);
            const double closed = sharp_constant(q, tau);
            const double quad = constant_via_quadrature(q, tau);
            CHECK(std::abs(closed - quad) < 1e-8);
        }
    }
}

TEST_CASE("quadrature path runs its internal piece-sum check") {
    CHECK_NOTHROW((void)constant_via_quadrature(6.0, 0.5));
    CHECK_NOTHROW((void)constant_via_quadrature(4.0, 0.1));
    CHECK_NOTHROW((void)constant_via_quadrature(9.0, 0.5));
}

TEST_CASE("decay constant is increasing in tau") {
    for (double q : {3.5, 6.0, 20.0}) {
        CAPTURE(q);
        double prev = 0.0;
        for (double tau : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const double c = sharp_constant(q, tau);
            CHECK(c > prev);
            prev = c;
        }
    }
}

TEST_CASE("decay constant is smooth in q") {
    const double tau = 0.4;
    for (int i = 0; i <= 40; ++i) {
        const double q = 3.01 * std::pow(100.0 / 3.01, i / 40.0);
        const double h = 1e-3 * q;
        if (q - h <= 3.0) continue;
        const double d2 = (sharp_constant(q + h, tau) - 2.0 * sharp_constant(q, tau) +
                           sharp_constant(q - h, tau)) /
                          (h * h);
        CHECK(std::isfinite(d2));
    }
}

TEST_CASE("bound struct carries the advertised exponent range") {
    for (double q : {3.5, 6.0, 9.0, 100.0}) {
        const DecayBound b = decay_bound(q, 0.3);
        CHECK(b.c_q > 0.0);
        CHECK(b.exponent > 0.0);
        CHECK(b.exponent < 0.5);
    }
    CHECK(decay_bound(6.0, 0.3).exponent == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("envelope follows the power law and is linear in the initial norm") {
    const double e1 = decay_envelope(6.0, 0.5, 1.0, 1.0);
    const double e2 = decay_envelope(6.0, 0.5, 1.0, 2.0);
    CHECK(e2 / e1 == doctest::Approx(std::pow(2.0, -0.25)).epsilon(1e-12));
    CHECK(decay_envelope(6.0, 0.5, 2.0, 1.0) == 2.0 * e1);
    CHECK(decay_envelope(6.0, 0.5, 0.0, 1.0) == 0.0);
}

TEST_CASE("domain validation") {
    CHECK_THROWS_AS((void)sharp_constant(3.0, 0.5), std::domain_error);
    CHECK_THROWS_AS((void)sharp_constant(2.0, 0.5), std::domain_error);
    CHECK_THROWS_AS((void)sharp_constant(6.0, 0.0), std::domain_error);
    CHECK_THROWS_AS((void)sharp_constant(6.0, 1.0), std::domain_error);
    CHECK_THROWS_AS((void)constant_via_quadrature(3.0, 0.5), std::domain_error);
    CHECK_THROWS_AS((void)decay_envelope(6.0, 0.5, 1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS((void)decay_envelope(6.0, 0.5, -1.0, 1.0), std::domain_error);
}

TEST_CASE("main ramp runs from 3 to q and increases") {
    const RampSpec spec{6.0, 2.0, RampVariant::main};
    CHECK(ramp(spec, 0.0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(ramp(spec, spec.T) == doctest::Approx(6.0).epsilon(1e-12));
    double prev = 0.0;
    for (int i = 0; i <= 10; ++i) {
        const double r = ramp(spec, spec.T * i / 10.0);
        CHECK(r > prev);
        prev = r;
    }
}

TEST_CASE("step-2 ramp runs from 5/2 to 3 and increases") {
    const RampSpec spec{3.0, 0.7, RampVariant::step2};
    CHECK(ramp(spec, 0.0) == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(ramp(spec, spec.T) == doctest::Approx(3.0).epsilon(1e-12));
    double prev = 0.0;
    for (int i = 0; i <= 10; ++i) {
        const double r = ramp(spec, spec.T * i / 10.0);
        CHECK(r > prev);
        prev = r;
    }
}

TEST_CASE("ramp validates its range") {
    const RampSpec spec{6.0, 1.0, RampVariant::main};
    CHECK_THROWS_AS((void)ramp(spec, -0.1), std::out_of_range);
    CHECK_THROWS_AS((void)ramp(spec, 1.1), std::out_of_range);
    CHECK_THROWS_AS((void)ramp({6.0, 0.0, RampVariant::main}, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)ramp({3.0, 1.0, RampVariant::main}, 0.5),
                    std::invalid_argument);
}
