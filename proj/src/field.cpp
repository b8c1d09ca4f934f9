#include "homflow/field.hpp"

#include <cmath>

#include "homflow/interp.hpp"

namespace homflow {

namespace {

struct Frame {
    double r, r2, rho2, y;
};

Frame make_frame(const Vec3& x) {
    double rho2 = x[0] * x[0] + x[1] * x[1];
    if (rho2 == 0.0) throw OnAxisError();
    double r2 = rho2 + x[2] * x[2];
    double r = std::sqrt(r2);
    return {r, r2, rho2, x[2] / r};
}

}  // namespace

Vec3 to_cartesian(const SphericalPoint& p) {
    double s = std::sin(p.theta);
    return {p.r * s * std::cos(p.phi), p.r * s * std::sin(p.phi),
            p.r * std::cos(p.theta)};
}

VelocityField::VelocityField(ThetaProfile profile) : prof_(std::move(profile)) {
    if (prof_.nodes.size() < 2 || prof_.nodes.size() != prof_.u_values.size() ||
        prof_.nodes.size() != prof_.du_values.size())
        throw std::invalid_argument("VelocityField: malformed profile");
    minus_ = minus_tail(prof_);
    plus_ = plus_tail(prof_);
}

double VelocityField::profile_value(double y) const {
    if (y <= prof_.nodes.front()) return minus_.value(1.0 + y);
    if (y >= prof_.nodes.back()) return plus_.value(1.0 - y);
    std::size_t i = bracket_index(prof_.nodes, y);
    double h = prof_.nodes[i + 1] - prof_.nodes[i];
    double s = (y - prof_.nodes[i]) / h;
    return hermite_value(prof_.u_values[i], prof_.du_values[i], prof_.u_values[i + 1],
                         prof_.du_values[i + 1], h, s);
}

double VelocityField::profile_slope(double y) const {
    if (y <= prof_.nodes.front()) return minus_.slope(1.0 + y);
    if (y >= prof_.nodes.back()) return -plus_.slope(1.0 - y);
    std::size_t i = bracket_index(prof_.nodes, y);
    double h = prof_.nodes[i + 1] - prof_.nodes[i];
    double s = (y - prof_.nodes[i]) / h;
    return hermite_slope(prof_.u_values[i], prof_.du_values[i], prof_.u_values[i + 1],
                         prof_.du_values[i + 1], h, s);
}

double VelocityField::profile_curvature(double y) const {
    const HomParams& p = prof_.params;
    double u = profile_value(y);
    double du = profile_slope(y);
    double one_m_y2 = (1.0 - y) * (1.0 + y);
    return (-p.c1 + p.c2 - 2.0 * p.c3 * y - 2.0 * u - u * du) / one_m_y2;
}

Vec3 eval_velocity(const VelocityField& field, const Vec3& x) {
    Frame f = make_frame(x);
    double u = field.profile_value(f.y);
    double du = field.profile_slope(f.y);
    double g = 1.0 / (f.r * f.rho2);
    return {du * x[0] / f.r2 + u * x[0] * x[2] * g,
            du * x[1] / f.r2 + u * x[1] * x[2] * g,
            du * x[2] / f.r2 - u / f.r};
}

double eval_pressure(const VelocityField& field, const Vec3& x) {
    Frame f = make_frame(x);
    double u = field.profile_value(f.y);
    double du = field.profile_slope(f.y);
    double one_m_y2 = f.rho2 / f.r2;
    return (du + field.profile().params.c3 - u * u / (2.0 * one_m_y2)) / f.r2;
}

Mat3 eval_gradient(const VelocityField& field, const Vec3& x) {
    Frame f = make_frame(x);
    double u = field.profile_value(f.y);
    double du = field.profile_slope(f.y);
    const HomParams& p = field.profile().params;
    double d2u = (-p.c1 + p.c2 - 2.0 * p.c3 * f.y - 2.0 * u - u * du) * f.r2 / f.rho2;

    double r = f.r, r2 = f.r2;
    double r3 = r2 * r, r4 = r2 * r2;
    double g = 1.0 / (r * f.rho2);

    // e_theta direction scaled by 1/(r sin): v = (x1 x3 g, x2 x3 g, -1/r)
    Vec3 v = {x[0] * x[2] * g, x[1] * x[2] * g, -1.0 / r};
    // dy/dx_j
    Vec3 Y = {-x[2] * x[0] / r3, -x[2] * x[1] / r3, 1.0 / r - x[2] * x[2] / r3};
    // dg/dx_j
    Vec3 dg = {-x[0] / (r3 * f.rho2) - 2.0 * x[0] * g / f.rho2,
               -x[1] / (r3 * f.rho2) - 2.0 * x[1] * g / f.rho2, -x[2] / (r3 * f.rho2)};

    Mat3 grad{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            double dv;
            if (i == 2) {
                dv = x[j] / r3;
            } else {
                dv = x[i] * x[2] * dg[j];
                if (i == j) dv += x[2] * g;
                if (j == 2) dv += x[i] * g;
            }
            double val = d2u * Y[j] * x[i] / r2 - 2.0 * du * x[i] * x[j] / r4 +
                         du * Y[j] * v[i] + u * dv;
            if (i == j) val += du / r2;
            grad[i][j] = val;
        }
    }
    return grad;
}

Vec3 nse_residual(const VelocityField& field, const Vec3& x, double h) {
    Frame f = make_frame(x);
    double dist = std::sqrt(f.rho2);
    if (h <= 0.0) throw std::invalid_argument("nse_residual: step must be positive");
    if (h >= dist / 4.0) throw StepTooLargeError(h, dist);

    Vec3 uc = eval_velocity(field, x);
    Vec3 lap = {0.0, 0.0, 0.0};
    Vec3 conv = {0.0, 0.0, 0.0};
    Vec3 gradp = {0.0, 0.0, 0.0};
    for (int a = 0; a < 3; ++a) {
        Vec3 xp = x, xm = x;
        xp[a] += h;
        xm[a] -= h;
        Vec3 up = eval_velocity(field, xp);
        Vec3 um = eval_velocity(field, xm);
        for (int i = 0; i < 3; ++i) {
            lap[i] += (up[i] - 2.0 * uc[i] + um[i]) / (h * h);
            conv[i] += uc[a] * (up[i] - um[i]) / (2.0 * h);
        }
        gradp[a] = (eval_pressure(field, xp) - eval_pressure(field, xm)) / (2.0 * h);
    }
    return {-lap[0] + conv[0] + gradp[0], -lap[1] + conv[1] + gradp[1],
            -lap[2] + conv[2] + gradp[2]};
}

double fd_divergence(const VelocityField& field, const Vec3& x, double h) {
    Frame f = make_frame(x);
    double dist = std::sqrt(f.rho2);
    if (h <= 0.0) throw std::invalid_argument("fd_divergence: step must be positive");
    if (h >= dist / 4.0) throw StepTooLargeError(h, dist);
    double div = 0.0;
    for (int a = 0; a < 3; ++a) {
        Vec3 xp = x, xm = x;
        xp[a] += h;
        xm[a] -= h;
        div += (eval_velocity(field, xp)[a] - eval_velocity(field, xm)[a]) / (2.0 * h);
    }
    return div;
}

double singularity_fit(const VelocityField& field,
                       const std::vector<double>& axis_distances) {
    if (axis_distances.size() < 2)
        throw std::invalid_argument("singularity_fit: need at least two sample distances");
    double sl = 0.0, sf = 0.0, sll = 0.0, slf = 0.0;
    std::size_t n = axis_distances.size();
    for (double s : axis_distances) {
        if (s <= 0.0 || s >= 1.0)
            throw std::invalid_argument("singularity_fit: distances must lie in (0,1)");
        double x3 = std::sqrt((1.0 - s) * (1.0 + s));
        Vec3 u = eval_velocity(field, {s, 0.0, x3});
        double mag = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
        double l = std::log(1.0 / s);
        sl += l;
        sf += mag;
        sll += l * l;
        slf += l * mag;
    }
    double denom = n * sll - sl * sl;
    if (denom == 0.0)
        throw std::invalid_argument("singularity_fit: sample distances are degenerate");
    return (n * slf - sl * sf) / denom;
}

}  // namespace homflow
