#include "homflow/decay.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "homflow/quadrature.hpp"

namespace homflow {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_domain(double q, double tau, const char* who) {
    if (!(q > 3.0)) throw std::domain_error(std::string(who) + ": requires q > 3");
    if (!(tau > 0.0 && tau < 1.0))
        throw std::domain_error(std::string(who) + ": requires tau in (0,1)");
}

double log_kernel(double r, double tau) {
    return std::log(4.0 * kPi * (1.0 - tau) * (r - 2.0) * r * r);
}

}  // namespace

double sharp_constant(double q, double tau) {
    check_domain(q, tau, "sharp_constant");
    const double gap = 1.0 / 3.0 - 1.0 / q;
    return std::pow(3.0, -1.75) * std::pow(q, 3.0 / q) *
           std::pow(q - 2.0, 1.5 / q) * std::pow(q / (q - 2.0), 0.75) *
           std::pow(4.0 * kPi * (1.0 - tau), -1.5 * gap) * std::exp(-6.0 * gap);
}

double constant_via_quadrature(double q, double tau) {
    check_domain(q, tau, "constant_via_quadrature");
    const double gap = 1.0 / 3.0 - 1.0 / q;

    const double integral = adaptive_simpson(
        [tau](double r) { return log_kernel(r, tau) / (r * r); }, 3.0, q, 1e-13);

    const double piece_weight = gap * std::log(4.0 * kPi * (1.0 - tau));
    const double piece_edge =
        (0.5 - 1.0 / q) * std::log(q - 2.0) + 0.5 * std::log(3.0 / q);
    const double piece_log = 2.0 * ((1.0 + std::log(3.0)) / 3.0 -
                                    (1.0 + std::log(q)) / q);
    if (std::abs(integral - (piece_weight + piece_edge + piece_log)) >= 1e-10)
        throw std::runtime_error(
            "constant_via_quadrature: antiderivative pieces disagree with quadrature");

    const double value = std::exp(-3.0 * gap - 1.5 * integral);

    // the schedule parameter must cancel out of the time-parameterized form
    double by_T[2];
    for (int i = 0; i < 2; ++i) {
        const double T = i + 1.0;
        const double it = adaptive_simpson(
            [q, tau, T](double t) {
                const double r = 1.0 / ((1.0 / T) * (1.0 / q - 1.0 / 3.0) * t + 1.0 / 3.0);
                return 3.0 + 1.5 * log_kernel(r, tau);
            },
            0.0, T, 1e-12);
        by_T[i] = std::exp(-(1.0 / T) * gap * it);
    }
    if (std::abs(by_T[0] - by_T[1]) >= 1e-10 * (std::abs(value) + 1.0) ||
        std::abs(by_T[0] - value) >= 1e-8 * (std::abs(value) + 1.0))
        throw std::runtime_error(
            "constant_via_quadrature: time-parameterized form disagrees");

    return value;
}

DecayBound decay_bound(double q, double tau) {
    check_domain(q, tau, "decay_bound");
    return {q, tau, sharp_constant(q, tau), 1.5 * (1.0 / 3.0 - 1.0 / q)};
}

double decay_envelope(double q, double tau, double w0_l3_norm, double t) {
    check_domain(q, tau, "decay_envelope");
    if (!(w0_l3_norm >= 0.0))
        throw std::domain_error("decay_envelope: norm must be nonnegative");
    if (!(t > 0.0)) throw std::domain_error("decay_envelope: requires t > 0");
    const double gap = 1.0 / 3.0 - 1.0 / q;
    return sharp_constant(q, tau) * std::pow(gap, 1.5 * gap) *
           std::pow(t, -1.5 * gap) * w0_l3_norm;
}

double ramp(const RampSpec& spec, double t) {
    if (!(spec.T > 0.0)) throw std::invalid_argument("ramp: T must be positive");
    if (spec.variant == RampVariant::main && !(spec.q > 3.0))
        throw std::invalid_argument("ramp: main variant requires q > 3");
    if (!(t >= 0.0 && t <= spec.T))
        throw std::out_of_range("ramp: t outside [0, T]");
    if (spec.variant == RampVariant::main)
        return 1.0 / ((1.0 / spec.T) * (1.0 / spec.q - 1.0 / 3.0) * t + 1.0 / 3.0);
    return 1.0 / (-t / (15.0 * spec.T) + 2.0 / 5.0);
}

}  // namespace homflow
