#pragma once

namespace homflow {

/// Decay-rate data for one (q, tau) pair: ||w(t)||_q decays like
/// c_q * t^{-exponent} times the initial L3 norm.
struct DecayBound {
    double q;
    double tau;
    double c_q;
    double exponent;  ///< (3/2)(1/3 - 1/q)
};

/// Closed-form decay constant; domain errors for q <= 3 or tau outside (0,1).
double sharp_constant(double q, double tau);

/// Same constant recomputed by adaptive quadrature of its defining integral.
/// Internally cross-checks the three closed-form antiderivative pieces against
/// the quadrature value (1e-10) and the time-parameterized form at two
/// parameter choices; throws std::runtime_error if either check fails.
double constant_via_quadrature(double q, double tau);

DecayBound decay_bound(double q, double tau);

/// c_q (1/3-1/q)^{(3/2)(1/3-1/q)} t^{-(3/2)(1/3-1/q)} * w0_l3_norm.
double decay_envelope(double q, double tau, double w0_l3_norm, double t);

enum class RampVariant { main, step2 };

/// Exponent schedule r(t) on [0,T]: main runs 3 -> q, step2 runs 5/2 -> 3.
struct RampSpec {
    double q;
    double T;
    RampVariant variant;
};

double ramp(const RampSpec& spec, double t);

}  // namespace homflow
