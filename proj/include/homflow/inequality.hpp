#pragma once

#include <array>
#include <stdexcept>
#include <vector>

namespace homflow {

struct ConditionsFail : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parameters of a weighted interpolation inequality
///   || |x'|^a1 |x|^b1 u ||_{s1}  <=  C || |x'|^a2 |x|^b2 grad u ||_{s2}^theta
///                                     * || |x'|^a3 |x|^b3 u ||_{s3}^(1-theta)
/// in dimension n, with |x'| the distance to the x_n axis.
/// The constructor rejects s1, s3 <= 0, s2 < 1, and theta outside [0,1].
struct CknSpec {
    int n;
    double theta;
    double s1, s2, s3;
    double a1, a2, a3;
    double b1, b2, b3;

    CknSpec(int n, double theta, double s1, double s2, double s3, double a1,
            double a2, double a3, double b1, double b2, double b3);
};

/// n = 3 instance bounding || |x'|^{-alpha} |x|^{alpha-1} u ||_2 by the
/// gradient alone (theta = 1, all exponents 2).
CknSpec axis_hardy_spec(double alpha);

/// Validity conditions for the inequality, one flag per clause; equality
/// clauses are tested with absolute tolerance 1e-12.
struct ConditionReport {
    bool measure_ok;    ///< local integrability of each weight slot
    bool balance_ok;    ///< dilation balance across the three slots
    bool beta_ok;       ///< ordering of the |x| exponents
    bool alpha_beta_ok; ///< ordering of the combined exponents
    bool axis_ok;       ///< ordering of the |x'| exponents
    bool endpoint_ok;   ///< integrability-index tie-break for the equal case
    bool overall;       ///< conjunction of the six flags
};

ConditionReport ckn_conditions(const CknSpec& spec);

/// Axisymmetric Gaussian bump centered on the x3 axis at (0,0,z0), cut off to
/// the ball of the given support radius by a cubed quadratic.
struct AxisBump {
    double amp;
    double z0;
    double sigma_rho;
    double sigma_z;
    double support;

    double value(double rho, double z) const;
    /// d/d rho and d/d z of value
    std::array<double, 2> gradient(double rho, double z) const;
};

/// Deterministic bump for the given seed and index; scales span four decades
/// and supports stay away from the origin.
AxisBump random_bump(unsigned long long seed, int index);

/// The bump x -> u(lambda x).
AxisBump dilated(const AxisBump& bump, double lambda);

/// LHS/RHS of the inequality for one bump, norms by tensorized
/// Gauss-Jacobi/Gauss-Legendre quadrature in spherical coordinates.
double ckn_ratio(const CknSpec& spec, const AxisBump& bump);

struct BumpSampler {
    unsigned long long seed = 1;
};

/// Max of ckn_ratio over sampled bumps. Throws ConditionsFail when the spec
/// fails ckn_conditions. The result is an observed maximum, not a sharp
/// constant.
double ckn_empirical(const CknSpec& spec, const BumpSampler& sampler, int samples);

/// Power weight |x'|^theta1 |x|^theta2 paired with an integrability exponent.
struct WeightSpec {
    int n;
    double q;
    double theta1;
    double theta2;

    WeightSpec(int n, double q, double theta1, double theta2);  // q > 1, n >= 2
};

/// Exact membership test for the power weight in the Muckenhoupt class A_q.
bool aq_membership(const WeightSpec& spec);

struct BallSampler {
    unsigned long long seed = 7;
    int points_per_ball = 20000;
};

/// Max over sampled balls of avg(w) * avg(w^{-1/(q-1)})^{q-1}, with centers
/// covering origin-anchored, axis-touching, and generic positions and radii
/// spanning six decades. Requires n == 3.
double muckenhoupt_ratio(const WeightSpec& spec, const BallSampler& sampler,
                         int balls);

/// Ratio of the largest to the smallest per-radius maximum across the radius
/// ladder; near 1 for A_q weights, large when some ball family degenerates.
double muckenhoupt_growth(const WeightSpec& spec, const BallSampler& sampler,
                          int balls_per_radius);

/// Anisotropic Gaussian amp * exp(-sum (x_i - c_i)^2 / (2 sigma_i^2)).
struct GaussianSpec {
    double amp;
    std::array<double, 3> sigma;
    std::array<double, 3> center;
};

/// RHS - LHS of the Gaussian-type entropy bound
///   int f^2 ln(f^2/||f||_2^2) + 3(1 + ln a)||f||_2^2 <= (a^2/pi) int |grad f|^2
/// for one (f, a) pair, by tensor quadrature on a support-scaled grid.
double log_sobolev_margin(const GaussianSpec& f, double a);

/// Min margin over the a grid.
double log_sobolev_check(const GaussianSpec& f, const std::vector<double>& a_grid);

/// Deterministic family of Gaussians for sweep tests.
std::vector<GaussianSpec> gaussian_family(unsigned long long seed, int count);

/// Norm constant cot(pi/(2p)) of the directional Riesz transform on L^p.
/// Domain error for p <= 1.
double riesz_constant(double p);

/// RHS - LHS of ||u||_q <= ||u||_{q0}^{1-lambda} ||u||_{q1}^{lambda} with
/// 1/q = (1-lambda)/q0 + lambda/q1, on discrete norms with cell volume vol.
double lebesgue_interpolation_check(const std::vector<double>& samples, double vol,
                                    double q0, double q1, double lambda);

}  // namespace homflow
