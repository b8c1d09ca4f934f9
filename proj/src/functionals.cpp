#include "homflow/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "homflow/quadrature.hpp"

namespace homflow {

namespace {

constexpr double kPi = 3.14159265358979323846;

double b_integrand(const VelocityField& f, double y) {
    const double u = f.profile_value(y);
    const double du = f.profile_slope(y);
    const double one_m_y2 = (1.0 - y) * (1.0 + y);
    return y * du * du - (2.0 - y * y) / one_m_y2 * u - y / one_m_y2 * u * u;
}

// Panels equispaced in theta (y = -cos theta) so their widths shrink toward the
// endpoints, where the integrand carries squared-log factors.
double b_panels(const VelocityField& f, int panels, double theta_min,
                const QuadRule& rule, double* abs_sum) {
    const double span = kPi - 2.0 * theta_min;
    double total = 0.0;
    double atotal = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double t0 = theta_min + span * p / panels;
        const double t1 = theta_min + span * (p + 1) / panels;
        const double mid = 0.5 * (t0 + t1);
        const double half = 0.5 * (t1 - t0);
        for (std::size_t i = 0; i < rule.x.size(); ++i) {
            const double theta = mid + half * rule.x[i];
            const double term =
                rule.w[i] * half * b_integrand(f, -std::cos(theta)) * std::sin(theta);
            total += term;
            atotal += std::abs(term);
        }
    }
    if (abs_sum != nullptr) *abs_sum = atotal;
    return total;
}

double frob_norm(const Mat3& m) {
    double s = 0.0;
    for (const auto& row : m)
        for (double v : row) s += v * v;
    return std::sqrt(s);
}

// r|u| at colatitude with sin = s, independent of r by homogeneity.
double speed_weight(const VelocityField& f, double s, int side) {
    const double y = side * std::sqrt((1.0 - s) * (1.0 + s));
    const double u = f.profile_value(y);
    const double du = f.profile_slope(y);
    return std::hypot(du, u / s);
}

double grad_weight(const VelocityField& f, double s, int side) {
    const double y = side * std::sqrt((1.0 - s) * (1.0 + s));
    return s * frob_norm(eval_gradient(f, {s, 0.0, y}));
}

struct ScanBest {
    double arg = 0.0;
    double val = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

// Dense scan over [a,b] keeping the best sample and its bracketing neighbors.
ScanBest scan(const std::function<double(double)>& fn, double a, double b, int n) {
    ScanBest best;
    best.lo = a;
    best.hi = b;
    double prev = a;
    for (int i = 0; i <= n; ++i) {
        const double t = a + (b - a) * i / n;
        const double v = fn(t);
        if (i == 0 || v > best.val) {
            best.val = v;
            best.arg = t;
            best.lo = prev;
            best.hi = std::min(b, t + (b - a) / n);
        }
        prev = t;
    }
    return best;
}

double refine_max(const std::function<double(double)>& fn, const ScanBest& coarse) {
    const double arg = golden_max(fn, coarse.lo, coarse.hi, 1e-11);
    return std::max(coarse.val, fn(arg));
}

}  // namespace

BResult compute_b(const ThetaProfile& profile, const BQuadSpec& quad) {
    if (quad.base_panels < 2)
        throw std::invalid_argument("compute_b: base_panels must be >= 2");
    if (!(quad.endpoint_offset > 0.0 && quad.endpoint_offset < 1e-3))
        throw std::invalid_argument("compute_b: endpoint_offset out of (0, 1e-3)");
    if (std::abs(profile.endpoint_minus) > 1e-8 || std::abs(profile.endpoint_plus) > 1e-8)
        throw DivergingError("compute_b: nonzero profile endpoint value, integral diverges");

    const VelocityField field(profile);
    const QuadRule rule = gauss_legendre(16);
    const double theta_min = std::acos(1.0 - quad.endpoint_offset);

    const double b1 = b_panels(field, quad.base_panels, theta_min, rule, nullptr);
    const double b2 = b_panels(field, 2 * quad.base_panels, theta_min, rule, nullptr);
    double abs_sum = 0.0;
    const double b3 = b_panels(field, 4 * quad.base_panels, theta_min, rule, &abs_sum);

    const double n_evals = 16.0 * 4.0 * quad.base_panels;
    const double floor =
        std::numeric_limits<double>::epsilon() * abs_sum * std::sqrt(n_evals);
    const double d1 = b2 - b1;
    const double d2 = b3 - b2;

    BResult out{b3, std::abs(d2) + floor};
    if (d2 != 0.0 && std::abs(d1) > std::abs(d2)) {
        const double p = std::clamp(std::log2(std::abs(d1) / std::abs(d2)), 0.5, 10.0);
        const double corr = d2 / (std::exp2(p) - 1.0);
        out.value = b3 + corr;
        out.error = std::abs(d2) + std::abs(corr) + floor;
    }
    return out;
}

KReport compute_K(const VelocityField& field) {
    const double s_cone = std::exp(-1.0);
    const double log_s_lo = -10.0;
    const double log_s_hi = std::log10(s_cone);

    KReport rep{0.0, 0.0, 0.0};

    for (int side : {-1, 1}) {
        const auto cone_fn = [&](double ls) {
            const double s = std::pow(10.0, ls);
            return std::sqrt(s) * speed_weight(field, s, side);
        };
        const ScanBest c = scan(cone_fn, log_s_lo, log_s_hi, 400);
        rep.k_cone = std::max(rep.k_cone, refine_max(cone_fn, c));
        rep.k_cone = std::max(rep.k_cone, cone_fn(log_s_hi));
    }

    const double y_cut = std::sqrt((1.0 - s_cone) * (1.0 + s_cone));
    const auto outer_fn = [&](double y) {
        const double s = std::sqrt((1.0 - y) * (1.0 + y));
        const double u = field.profile_value(y);
        const double du = field.profile_slope(y);
        return std::hypot(du, u / s);
    };
    const ScanBest o = scan(outer_fn, -y_cut, y_cut, 1200);
    rep.k_outer = refine_max(outer_fn, o);

    for (int side : {-1, 1}) {
        const auto pole_fn = [&](double ls) {
            return grad_weight(field, std::pow(10.0, ls), side);
        };
        const ScanBest g = scan(pole_fn, log_s_lo, 0.0 - 1e-9, 400);
        rep.k_grad = std::max(rep.k_grad, refine_max(pole_fn, g));
    }
    const auto mid_fn = [&](double y) {
        return grad_weight(field, std::sqrt((1.0 - y) * (1.0 + y)), y >= 0.0 ? 1 : -1);
    };
    const ScanBest gm = scan(mid_fn, -y_cut, y_cut, 1200);
    rep.k_grad = std::max(rep.k_grad, refine_max(mid_fn, gm));

    return rep;
}

double pu09_check(int sample_count, unsigned long long seed) {
    if (sample_count < 1) throw std::invalid_argument("pu09_check: sample_count must be >= 1");
    std::uint64_t state = seed ? seed : 0x9e3779b97f4a7c15ULL;
    const auto next_unit = [&state]() {
        // splitmix64; fixed mapping keeps the sample set platform-independent
        state += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z = z ^ (z >> 31);
        return static_cast<double>(z >> 11) * 0x1.0p-53;
    };

    const double two_over_e = 2.0 * std::exp(-1.0);
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < sample_count; ++i) {
        const double s = std::exp(-1.0 - 26.0 * next_unit());  // sin(theta) in (e^-27, 1/e]
        const double r = std::pow(10.0, -1.0 + 2.0 * next_unit());
        const double side = next_unit() < 0.5 ? 1.0 : -1.0;
        const double rho = r * s;
        const double x3 = side * r * std::sqrt((1.0 - s) * (1.0 + s));
        const double abs_x = std::hypot(rho, x3);
        const double mid = -(1.0 / abs_x) * std::log(rho / abs_x);
        const double lower_violation = abs_x * (1.0 / abs_x - mid);
        const double upper_violation = abs_x * (mid - two_over_e / std::sqrt(rho * abs_x));
        worst = std::max(worst, std::max(lower_violation, upper_violation));
    }
    return worst;
}

}  // namespace homflow
