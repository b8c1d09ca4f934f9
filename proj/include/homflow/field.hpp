#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "homflow/profile.hpp"

namespace homflow {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;  ///< grad[i][j] = d u_i / d x_j

struct OnAxisError : std::domain_error {
    OnAxisError() : std::domain_error("evaluation point lies on the x3-axis") {}
};

struct StepTooLargeError : std::invalid_argument {
    explicit StepTooLargeError(double h, double dist)
        : std::invalid_argument("finite-difference step " + std::to_string(h) +
                                " too large for axis distance " + std::to_string(dist)) {}
};

struct SphericalPoint {
    double r;      ///< > 0
    double theta;  ///< in (0, pi); off-axis means sin(theta) > 0
    double phi;
};

Vec3 to_cartesian(const SphericalPoint& p);

/// Velocity field u(x) = U'(y) x/|x|^2 + U(y) e_theta/(|x| sin(theta)),
/// y = cos(theta) = x3/|x|, built from a solved profile. Axisymmetric with no
/// azimuthal component, (-1)-homogeneous. Between the stored nodes the profile
/// is evaluated by cubic Hermite interpolation; beyond the outermost nodes by
/// the matched endpoint tails.
class VelocityField {
  public:
    explicit VelocityField(ThetaProfile profile);

    const ThetaProfile& profile() const { return prof_; }

    double profile_value(double y) const;
    double profile_slope(double y) const;
    /// U''(y) through the differentiated profile equation
    /// (1-y^2) U'' + 2U + U U' = -c1 + c2 - 2 c3 y.
    double profile_curvature(double y) const;

  private:
    ThetaProfile prof_;
    EndpointTail minus_;
    EndpointTail plus_;
};

Vec3 eval_velocity(const VelocityField& field, const Vec3& x);

/// p(x) = P(y)/|x|^2 with P = U' + c3 - U^2/(2(1-y^2)); the constant is pinned
/// by the radial momentum balance of the stationary equations.
double eval_pressure(const VelocityField& field, const Vec3& x);

Mat3 eval_gradient(const VelocityField& field, const Vec3& x);

/// Central-difference evaluation of -lap(u) + (u.grad)u + grad(p) at x.
Vec3 nse_residual(const VelocityField& field, const Vec3& x, double h);

/// Central-difference divergence of the velocity at x (zero analytically).
double fd_divergence(const VelocityField& field, const Vec3& x, double h);

/// Least-squares slope A of |u| against ln(1/|x'|) + intercept, sampled on the
/// unit sphere at the given axis distances approaching the positive pole.
double singularity_fit(const VelocityField& field,
                       const std::vector<double>& axis_distances);

}  // namespace homflow
