#include "homflow/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "homflow/quadrature.hpp"

namespace homflow {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEqTol = 1e-12;

struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed ? seed : 0x9e3779b97f4a7c15ULL) {}
    double unit() {
        state += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z = z ^ (z >> 31);
        return static_cast<double>(z >> 11) * 0x1.0p-53;
    }
    double range(double lo, double hi) { return lo + (hi - lo) * unit(); }
    double normal() {
        const double u1 = std::max(unit(), 1e-300);
        const double u2 = unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

bool slot_measure_ok(int n, double s, double a, double b) {
    if (!(1.0 / s + a / (n - 1.0) > 0.0)) return false;
    if (b >= 0.0) return true;
    return 1.0 / s + (a + b) / n > 0.0;
}

// One weighted norm || |x'|^a |x|^b F ||_s for an axisymmetric F(rho, z) given
// in spherical coordinates, by Gauss-Jacobi in y and Gauss-Legendre in r.
template <typename F>
double weighted_norm(double s, double a, double b, double r_lo, double r_hi,
                     const F& f) {
    const double ay = a * s;
    const double radial_pow = a * s + b * s + 2.0;
    const QuadRule yrule = gauss_jacobi(96, 0.5 * ay, 0.5 * ay);
    const QuadRule rrule = gauss_legendre(96);
    const double mid = 0.5 * (r_lo + r_hi);
    const double half = 0.5 * (r_hi - r_lo);
    double total = 0.0;
    for (std::size_t i = 0; i < rrule.x.size(); ++i) {
        const double r = mid + half * rrule.x[i];
        const double wr = rrule.w[i] * half * std::pow(r, radial_pow);
        for (std::size_t j = 0; j < yrule.x.size(); ++j) {
            const double y = yrule.x[j];
            const double sin_t = std::sqrt((1.0 - y) * (1.0 + y));
            const double v = f(r * sin_t, r * y);
            if (v != 0.0) total += wr * yrule.w[j] * std::pow(std::abs(v), s);
        }
    }
    return std::pow(2.0 * kPi * total, 1.0 / s);
}

}  // namespace

CknSpec::CknSpec(int n_, double theta_, double s1_, double s2_, double s3_,
                 double a1_, double a2_, double a3_, double b1_, double b2_,
                 double b3_)
    : n(n_),
      theta(theta_),
      s1(s1_),
      s2(s2_),
      s3(s3_),
      a1(a1_),
      a2(a2_),
      a3(a3_),
      b1(b1_),
      b2(b2_),
      b3(b3_) {
    if (n < 2) throw std::invalid_argument("CknSpec: n must be >= 2");
    if (!(s1 > 0.0) || !(s3 > 0.0))
        throw std::invalid_argument("CknSpec: s1 and s3 must be positive");
    if (!(s2 >= 1.0)) throw std::invalid_argument("CknSpec: s2 must be >= 1");
    if (!(theta >= 0.0 && theta <= 1.0))
        throw std::invalid_argument("CknSpec: theta must lie in [0,1]");
}

CknSpec axis_hardy_spec(double alpha) {
    return CknSpec(3, 1.0, 2.0, 2.0, 2.0, -alpha, 0.0, 0.0, alpha - 1.0, 0.0, 0.0);
}

ConditionReport ckn_conditions(const CknSpec& sp) {
    ConditionReport rep{};
    rep.measure_ok = slot_measure_ok(sp.n, sp.s1, sp.a1, sp.b1) &&
                     slot_measure_ok(sp.n, sp.s2, sp.a2, sp.b2) &&
                     slot_measure_ok(sp.n, sp.s3, sp.a3, sp.b3);

    const double lhs_idx = 1.0 / sp.s1 + (sp.a1 + sp.b1) / sp.n;
    const double grad_idx = 1.0 / sp.s2 + (sp.a2 + sp.b2 - 1.0) / sp.n;
    const double int_idx = 1.0 / sp.s3 + (sp.a3 + sp.b3) / sp.n;
    rep.balance_ok =
        std::abs(lhs_idx - sp.theta * grad_idx - (1.0 - sp.theta) * int_idx) <= kEqTol;

    rep.beta_ok = sp.b1 <= sp.theta * sp.b2 + (1.0 - sp.theta) * sp.b3;
    rep.alpha_beta_ok = sp.a1 + sp.b1 <=
                        sp.theta * (sp.a2 + sp.b2) + (1.0 - sp.theta) * (sp.a3 + sp.b3);

    const double axis_lhs = 1.0 / sp.s1 + sp.a1 / (sp.n - 1.0);
    const double axis_rhs = sp.theta * (1.0 / sp.s2 + (sp.a2 - 1.0) / (sp.n - 1.0)) +
                            (1.0 - sp.theta) * (1.0 / sp.s3 + sp.a3 / (sp.n - 1.0));
    rep.axis_ok = axis_lhs >= axis_rhs;

    const bool all_equal =
        std::abs(lhs_idx - grad_idx) <= kEqTol && std::abs(grad_idx - int_idx) <= kEqTol;
    rep.endpoint_ok = !all_equal ||
                      1.0 / sp.s1 <= sp.theta / sp.s2 + (1.0 - sp.theta) / sp.s3 ||
                      std::abs(sp.theta) <= kEqTol || std::abs(1.0 - sp.theta) <= kEqTol ||
                      std::abs(axis_lhs - axis_rhs) <= kEqTol;

    rep.overall = rep.measure_ok && rep.balance_ok && rep.beta_ok &&
                  rep.alpha_beta_ok && rep.axis_ok && rep.endpoint_ok;
    return rep;
}

double AxisBump::value(double rho, double z) const {
    const double dz = z - z0;
    const double d2 = rho * rho + dz * dz;
    const double r2 = support * support;
    if (d2 >= r2) return 0.0;
    const double cut = 1.0 - d2 / r2;
    const double g = amp * std::exp(-rho * rho / (2.0 * sigma_rho * sigma_rho) -
                                    dz * dz / (2.0 * sigma_z * sigma_z));
    return g * cut * cut * cut;
}

std::array<double, 2> AxisBump::gradient(double rho, double z) const {
    const double dz = z - z0;
    const double d2 = rho * rho + dz * dz;
    const double r2 = support * support;
    if (d2 >= r2) return {0.0, 0.0};
    const double cut = 1.0 - d2 / r2;
    const double g = amp * std::exp(-rho * rho / (2.0 * sigma_rho * sigma_rho) -
                                    dz * dz / (2.0 * sigma_z * sigma_z));
    const double chi = cut * cut * cut;
    const double dchi = -6.0 * cut * cut / r2;  // d chi / d(d^2) * 2
    return {g * (chi * (-rho / (sigma_rho * sigma_rho)) + dchi * rho),
            g * (chi * (-dz / (sigma_z * sigma_z)) + dchi * dz)};
}

AxisBump random_bump(unsigned long long seed, int index) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(index)));
    const double scale = std::pow(10.0, rng.range(-2.0, 2.0));
    AxisBump b;
    b.sigma_rho = scale * std::pow(10.0, rng.range(-0.25, 0.25));
    b.sigma_z = scale * std::pow(10.0, rng.range(-0.25, 0.25));
    b.support = 3.2 * std::max(b.sigma_rho, b.sigma_z);
    const double sign = rng.unit() < 0.5 ? -1.0 : 1.0;
    b.z0 = sign * b.support * (1.4 + 1.6 * rng.unit());
    b.amp = 0.5 + rng.unit();
    return b;
}

AxisBump dilated(const AxisBump& bump, double lambda) {
    return {bump.amp, bump.z0 / lambda, bump.sigma_rho / lambda,
            bump.sigma_z / lambda, bump.support / lambda};
}

double ckn_ratio(const CknSpec& spec, const AxisBump& bump) {
    const double r_lo = std::abs(bump.z0) - bump.support;
    const double r_hi = std::abs(bump.z0) + bump.support;
    if (!(r_lo > 0.0))
        throw std::invalid_argument("ckn_ratio: bump support must exclude the origin");

    const auto val = [&bump](double rho, double z) { return bump.value(rho, z); };
    const auto grad = [&bump](double rho, double z) {
        const std::array<double, 2> g = bump.gradient(rho, z);
        return std::hypot(g[0], g[1]);
    };

    const double lhs = weighted_norm(spec.s1, spec.a1, spec.b1, r_lo, r_hi, val);
    double rhs = 1.0;
    if (spec.theta > 0.0)
        rhs *= std::pow(weighted_norm(spec.s2, spec.a2, spec.b2, r_lo, r_hi, grad),
                        spec.theta);
    if (spec.theta < 1.0)
        rhs *= std::pow(weighted_norm(spec.s3, spec.a3, spec.b3, r_lo, r_hi, val),
                        1.0 - spec.theta);
    return lhs / rhs;
}

double ckn_empirical(const CknSpec& spec, const BumpSampler& sampler, int samples) {
    if (samples < 1) throw std::invalid_argument("ckn_empirical: samples must be >= 1");
    if (!ckn_conditions(spec).overall)
        throw ConditionsFail("ckn_empirical: spec fails the validity conditions");
    double best = 0.0;
    for (int i = 0; i < samples; ++i)
        best = std::max(best, ckn_ratio(spec, random_bump(sampler.seed, i)));
    return best;
}

WeightSpec::WeightSpec(int n_, double q_, double t1, double t2)
    : n(n_), q(q_), theta1(t1), theta2(t2) {
    if (n < 2) throw std::invalid_argument("WeightSpec: n must be >= 2");
    if (!(q > 1.0)) throw std::invalid_argument("WeightSpec: q must be > 1");
}

bool aq_membership(const WeightSpec& sp) {
    const double nm1 = sp.n - 1.0;
    const bool in_a = sp.theta1 > -nm1 && sp.theta2 >= 0.0;
    const bool in_b =
        sp.theta1 > -nm1 && sp.theta2 < 0.0 && sp.theta1 + sp.theta2 > -sp.n;
    const double cap = nm1 * (sp.q - 1.0);
    const bool in_c = sp.theta1 < cap && sp.theta2 <= 0.0;
    const bool in_d = sp.theta1 < cap && sp.theta2 > 0.0 &&
                      sp.theta1 + sp.theta2 < sp.n * (sp.q - 1.0);
    return (in_a || in_b) && (in_c || in_d);
}

namespace {

double one_ball_ratio(const WeightSpec& sp, Rng& rng, const std::array<double, 3>& c,
                      double radius, int npts) {
    double sum_w = 0.0;
    double sum_inv = 0.0;
    const double inv_pow = -1.0 / (sp.q - 1.0);
    for (int i = 0; i < npts; ++i) {
        double d0 = rng.normal();
        double d1 = rng.normal();
        double d2 = rng.normal();
        const double dn = std::sqrt(d0 * d0 + d1 * d1 + d2 * d2) + 1e-300;
        const double rr = radius * std::cbrt(std::max(rng.unit(), 1e-300));
        const double x0 = c[0] + rr * d0 / dn;
        const double x1 = c[1] + rr * d1 / dn;
        const double x2 = c[2] + rr * d2 / dn;
        const double rho = std::hypot(x0, x1);
        const double r = std::sqrt(x0 * x0 + x1 * x1 + x2 * x2);
        const double w = std::pow(rho, sp.theta1) * std::pow(r, sp.theta2);
        sum_w += w;
        sum_inv += std::pow(w, inv_pow);
    }
    return (sum_w / npts) * std::pow(sum_inv / npts, sp.q - 1.0);
}

std::array<double, 3> ball_center(Rng& rng, int type, double radius) {
    if (type == 0) {
        // origin inside the ball
        const double d = 0.3 * radius * rng.unit();
        const double ang = 2.0 * kPi * rng.unit();
        const double ch = rng.range(-1.0, 1.0);
        const double sh = std::sqrt(std::max(0.0, 1.0 - ch * ch));
        return {d * sh * std::cos(ang), d * sh * std::sin(ang), d * ch};
    }
    if (type == 1) {
        // straddles the axis at a fixed-scale height
        return {0.8 * radius * rng.unit(), 0.0, rng.range(-2.0, 2.0)};
    }
    // generic center at unit-scale distance
    const double ang = 2.0 * kPi * rng.unit();
    const double ch = rng.range(-1.0, 1.0);
    const double sh = std::sqrt(std::max(0.0, 1.0 - ch * ch));
    const double d = rng.range(0.5, 2.0);
    return {d * sh * std::cos(ang), d * sh * std::sin(ang), d * ch};
}

constexpr int kNumRadii = 7;

double radius_level(int j) { return std::pow(10.0, -3.0 + j); }

}  // namespace

double muckenhoupt_ratio(const WeightSpec& spec, const BallSampler& sampler, int balls) {
    if (spec.n != 3)
        throw std::invalid_argument("muckenhoupt_ratio: sampling implemented for n == 3");
    if (balls < 1) throw std::invalid_argument("muckenhoupt_ratio: balls must be >= 1");
    double best = 0.0;
    for (int i = 0; i < balls; ++i) {
        Rng rng(mix_seed(sampler.seed, static_cast<std::uint64_t>(i)));
        const double radius = radius_level(i % kNumRadii);
        const std::array<double, 3> c = ball_center(rng, (i / kNumRadii) % 3, radius);
        best = std::max(best,
                        one_ball_ratio(spec, rng, c, radius, sampler.points_per_ball));
    }
    return best;
}

double muckenhoupt_growth(const WeightSpec& spec, const BallSampler& sampler,
                          int balls_per_radius) {
    if (spec.n != 3)
        throw std::invalid_argument("muckenhoupt_growth: sampling implemented for n == 3");
    if (balls_per_radius < 1)
        throw std::invalid_argument("muckenhoupt_growth: balls_per_radius must be >= 1");
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (int j = 0; j < kNumRadii; ++j) {
        const double radius = radius_level(j);
        double level = 0.0;
        for (int i = 0; i < balls_per_radius; ++i) {
            Rng rng(mix_seed(sampler.seed, 1000 + static_cast<std::uint64_t>(j) * 97 + i));
            const std::array<double, 3> c = ball_center(rng, i % 3, radius);
            level = std::max(level,
                             one_ball_ratio(spec, rng, c, radius, sampler.points_per_ball));
        }
        lo = std::min(lo, level);
        hi = std::max(hi, level);
    }
    return hi / lo;
}

double log_sobolev_margin(const GaussianSpec& f, double a) {
    if (!(a > 0.0)) throw std::invalid_argument("log_sobolev_margin: a must be positive");
    for (double s : f.sigma)
        if (!(s > 0.0))
            throw std::invalid_argument("log_sobolev_margin: sigma must be positive");

    const QuadRule rule = gauss_legendre(64);
    const int m = static_cast<int>(rule.x.size());
    std::array<std::vector<double>, 3> nodes;
    std::array<std::vector<double>, 3> weights;
    for (int axis = 0; axis < 3; ++axis) {
        const double half = 8.0 * f.sigma[axis];
        nodes[axis].resize(m);
        weights[axis].resize(m);
        for (int i = 0; i < m; ++i) {
            nodes[axis][i] = f.center[axis] + half * rule.x[i];
            weights[axis][i] = half * rule.w[i];
        }
    }

    double i2 = 0.0, ig = 0.0, il = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) {
                const double dx = (nodes[0][i] - f.center[0]) / f.sigma[0];
                const double dy = (nodes[1][j] - f.center[1]) / f.sigma[1];
                const double dz = (nodes[2][k] - f.center[2]) / f.sigma[2];
                const double v = f.amp * std::exp(-0.5 * (dx * dx + dy * dy + dz * dz));
                const double w = weights[0][i] * weights[1][j] * weights[2][k];
                const double v2 = v * v;
                const double g2 = v2 * (dx * dx / (f.sigma[0] * f.sigma[0]) +
                                        dy * dy / (f.sigma[1] * f.sigma[1]) +
                                        dz * dz / (f.sigma[2] * f.sigma[2]));
                i2 += w * v2;
                ig += w * g2;
                if (v2 > 0.0) il += w * v2 * std::log(v2);
            }

    const double entropy = il - i2 * std::log(i2);
    return (a * a / kPi) * ig - entropy - 3.0 * (1.0 + std::log(a)) * i2;
}

double log_sobolev_check(const GaussianSpec& f, const std::vector<double>& a_grid) {
    if (a_grid.empty())
        throw std::invalid_argument("log_sobolev_check: empty a grid");
    double worst = std::numeric_limits<double>::infinity();
    for (double a : a_grid) worst = std::min(worst, log_sobolev_margin(f, a));
    return worst;
}

std::vector<GaussianSpec> gaussian_family(unsigned long long seed, int count) {
    if (count < 1) throw std::invalid_argument("gaussian_family: count must be >= 1");
    std::vector<GaussianSpec> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        Rng rng(mix_seed(seed, 5000 + static_cast<std::uint64_t>(i)));
        GaussianSpec g;
        g.amp = 0.3 + 2.0 * rng.unit();
        for (int axis = 0; axis < 3; ++axis) {
            g.sigma[axis] = std::pow(10.0, rng.range(-1.0, 1.0));
            g.center[axis] = rng.range(-2.0, 2.0);
        }
        out.push_back(g);
    }
    return out;
}

double riesz_constant(double p) {
    if (!(p > 1.0)) throw std::domain_error("riesz_constant: requires p > 1");
    return 1.0 / std::tan(kPi / (2.0 * p));
}

double lebesgue_interpolation_check(const std::vector<double>& samples, double vol,
                                    double q0, double q1, double lambda) {
    if (samples.empty())
        throw std::invalid_argument("lebesgue_interpolation_check: empty sample set");
    if (!(vol > 0.0))
        throw std::invalid_argument("lebesgue_interpolation_check: vol must be positive");
    if (!(q0 >= 1.0) || !(q1 >= 1.0))
        throw std::invalid_argument("lebesgue_interpolation_check: q0,q1 must be >= 1");
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw std::invalid_argument("lebesgue_interpolation_check: lambda in [0,1]");

    const auto norm = [&](double q) {
        double s = 0.0;
        for (double v : samples) s += std::pow(std::abs(v), q);
        return std::pow(vol * s, 1.0 / q);
    };
    const double q = 1.0 / ((1.0 - lambda) / q0 + lambda / q1);
    return std::pow(norm(q0), 1.0 - lambda) * std::pow(norm(q1), lambda) - norm(q);
}

}  // namespace homflow
