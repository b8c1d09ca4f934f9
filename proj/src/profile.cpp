#include "homflow/profile.hpp"

#include <algorithm>
#include <cmath>

#include "homflow/interp.hpp"

namespace homflow {

namespace {

constexpr double eps_bl = 1e-6;     // boundary-layer width: algebraic update inside
constexpr double eps_probe = 1e-9;  // deeper stop used by the gamma-range predicate

double forcing(const HomParams& p, double y) {
    return p.c1 * (1.0 - y) + p.c2 * (1.0 + y) + p.c3 * (1.0 - y * y);
}

double guard_bound(const HomParams& p) {
    return 10.0 * (4.0 + 2.0 * std::sqrt(1.0 + p.c1) + 2.0 * std::sqrt(1.0 + p.c2) +
                   std::abs(p.gamma));
}

// Dormand-Prince 5(4) pair.
struct Dopri {
    const HomParams& p;
    double guard;
    long max_steps = 2000000;

    // Integrates u' = f(y,u) from (y,u) to y_end; calls sink(node_y, node_u) at
    // every value in nodes (sorted in travel direction) as it passes them.
    // Returns true on success, false when the guard bound was exceeded (y holds
    // the blow-up location).
    template <class Sink>
    bool run(double& y, double& u, double y_end, const std::vector<double>& nodes,
             Sink&& sink, double tol) {
        double dir = (y_end > y) ? 1.0 : -1.0;
        double h = dir * 1e-4;
        std::size_t next_node = 0;
        long steps = 0;
        double k1 = ode_rhs(p, y, u);
        while (dir * (y_end - y) > 0.0) {
            if (++steps > max_steps)
                throw NoConvergeError("profile integration: step limit reached");
            bool clipped_node = false;
            double target = y_end;
            if (next_node < nodes.size() && dir * (nodes[next_node] - target) < 0.0) {
                target = nodes[next_node];
                clipped_node = true;
            }
            bool hit = false;
            if (dir * (y + h - target) >= 0.0) {
                h = target - y;
                hit = true;
            }
            double k2 = ode_rhs(p, y + 0.2 * h, u + h * 0.2 * k1);
            double k3 = ode_rhs(p, y + 0.3 * h, u + h * (3.0 / 40 * k1 + 9.0 / 40 * k2));
            double k4 = ode_rhs(p, y + 0.8 * h,
                                u + h * (44.0 / 45 * k1 - 56.0 / 15 * k2 + 32.0 / 9 * k3));
            double k5 = ode_rhs(p, y + 8.0 / 9 * h,
                                u + h * (19372.0 / 6561 * k1 - 25360.0 / 2187 * k2 +
                                         64448.0 / 6561 * k3 - 212.0 / 729 * k4));
            double k6 = ode_rhs(p, y + h,
                                u + h * (9017.0 / 3168 * k1 - 355.0 / 33 * k2 +
                                         46732.0 / 5247 * k3 + 49.0 / 176 * k4 -
                                         5103.0 / 18656 * k5));
            double u5 = u + h * (35.0 / 384 * k1 + 500.0 / 1113 * k3 + 125.0 / 192 * k4 -
                                 2187.0 / 6784 * k5 + 11.0 / 84 * k6);
            double k7 = ode_rhs(p, y + h, u5);
            double err = h * (71.0 / 57600 * k1 - 71.0 / 16695 * k3 + 71.0 / 1920 * k4 -
                              17253.0 / 339200 * k5 + 22.0 / 525 * k6 - 1.0 / 40 * k7);
            double sc = tol + tol * std::max(std::abs(u), std::abs(u5));
            double e = std::abs(err) / sc;
            if (e <= 1.0 || std::abs(h) <= 1e-15) {
                y += h;
                if (hit) y = target;  // rounding must not strand the node
                u = u5;
                k1 = k7;
                if (std::abs(u) > guard) return false;
                if (hit && clipped_node) {
                    sink(y, u);
                    ++next_node;
                }
            }
            double fac = 0.9 * std::pow(std::max(e, 1e-10), -0.2);
            h *= std::clamp(fac, 0.2, 5.0);
            if (std::abs(h) < 1e-16) h = std::copysign(1e-16, dir);
        }
        return true;
    }
};

std::vector<double> cheb_interior_nodes(int n) {
    std::vector<double> y(n - 1);
    for (int k = 1; k <= n - 1; ++k) {
        int j = std::min(k, n - k);
        double v = std::cos(M_PI * j / n);
        if (2 * k < n)
            y[k - 1] = -v;
        else if (2 * k == n)
            y[k - 1] = 0.0;
        else
            y[k - 1] = v;
    }
    return y;
}

EndpointTail make_tail(double root, double kappa, double log_coef, double hom_expo,
                       double e_edge, double u_edge) {
    EndpointTail m;
    m.root = root;
    if (std::abs(root) <= 1e-8) {
        m.resonant = true;
        m.expo = 1.0;
        m.coef = log_coef;
        m.lin = (u_edge - root - m.coef * e_edge * std::log(e_edge)) / e_edge;
        return m;
    }
    m.resonant = false;
    m.expo = hom_expo;
    if (m.expo <= 1e-10) {
        // Growing mode: its coefficient is zero for any solution that actually
        // attains the root, so matching it would amplify roundoff. Keep only
        // the linear part.
        m.expo = 1.0;
        m.coef = 0.0;
        m.lin = (u_edge - root) / e_edge;
        return m;
    }
    m.lin = kappa / root;
    m.coef = (u_edge - root - m.lin * e_edge) / std::pow(e_edge, m.expo);
    return m;
}

EndpointTail minus_side_model(const HomParams& p, double root, double e_edge,
                              double u_edge) {
    double kappa = p.c2 - p.c1 + 2.0 * p.c3 - 2.0 * root;
    return make_tail(root, kappa, kappa / 2.0, 1.0 - root / 2.0, e_edge, u_edge);
}

EndpointTail plus_side_model(const HomParams& p, double root, double e_edge,
                             double u_edge) {
    double kappa = p.c1 - p.c2 + 2.0 * p.c3 + 2.0 * root;
    return make_tail(root, kappa, -kappa / 2.0, 1.0 + root / 2.0, e_edge, u_edge);
}

double nearest_root(double r1, double r2, double v) {
    return (std::abs(v - r1) <= std::abs(v - r2)) ? r1 : r2;
}

double node_defect_max(const ThetaProfile& prof) {
    double worst = 0.0;
    for (std::size_t i = 0; i < prof.nodes.size(); ++i) {
        double yy = prof.nodes[i];
        double r = (1.0 - yy * yy) * prof.du_values[i] + 2.0 * yy * prof.u_values[i] +
                   0.5 * prof.u_values[i] * prof.u_values[i] - forcing(prof.params, yy);
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

double hermite_defect_probe(const ThetaProfile& prof) {
    const auto& y = prof.nodes;
    const auto& u = prof.u_values;
    const auto& du = prof.du_values;
    double worst = node_defect_max(prof);
    auto defect = [&](double yy, double uu, double dd) {
        double r = (1.0 - yy * yy) * dd + 2.0 * yy * uu + 0.5 * uu * uu -
                   forcing(prof.params, yy);
        return std::abs(r);
    };
    for (std::size_t i = 0; i + 1 < y.size(); ++i) {
        double h = y[i + 1] - y[i];
        for (double s : {0.25, 0.5, 0.75}) {
            double yy = y[i] + s * h;
            double uu = hermite_value(u[i], du[i], u[i + 1], du[i + 1], h, s);
            double dd = hermite_slope(u[i], du[i], u[i + 1], du[i + 1], h, s);
            worst = std::max(worst, defect(yy, uu, dd));
        }
    }
    return worst;
}

bool reaches_boundary(const HomParams& p, double y_target) {
    Dopri integ{p, guard_bound(p)};
    double y = 0.0, u = p.gamma;
    std::vector<double> none;
    return integ.run(y, u, y_target, none, [](double, double) {}, 1e-10);
}

}  // namespace

double cbar3(double c1, double c2) {
    if (c1 < -1.0 || c2 < -1.0)
        throw std::domain_error("cbar3: arguments must be >= -1");
    double s = std::sqrt(1.0 + c1) + std::sqrt(1.0 + c2);
    return -0.5 * s * (s + 2.0);
}

double ode_rhs(const HomParams& p, double y, double u) {
    return (forcing(p, y) - 2.0 * y * u - 0.5 * u * u) / (1.0 - y * y);
}

double landau_profile(double gamma, double y) {
    double num = 2.0 * gamma * (1.0 - y * y);
    double den = 2.0 + gamma * y;
    if (num == 0.0 && den == 0.0) {
        // removable at the extremal parameter: one factor of the numerator
        // cancels the denominator
        return (y < 0.0) ? 2.0 * (1.0 - y) : -2.0 * (1.0 + y);
    }
    return num / den;
}

Admissibility is_admissible(const HomParams& p) {
    if (p.c1 < -1.0 || p.c2 < -1.0 || p.c3 < cbar3(p.c1, p.c2))
        return Admissibility::outside_J;
    if (p.c1 == 0.0 && p.c2 == 0.0 && p.c3 > -4.0) {
        GammaRange gr = gamma_range(p.c1, p.c2, p.c3, 1e-8);
        if (gr.gamma_minus < p.gamma && p.gamma < gr.gamma_plus)
            return Admissibility::in_M;
    }
    return Admissibility::in_J;
}

std::pair<double, double> endpoint_values(const HomParams& p, Branch branch) {
    if (p.c1 < -1.0 || p.c2 < -1.0)
        throw std::domain_error("endpoint_values: parameters outside the admissible set");
    double sm = 2.0 * std::sqrt(1.0 + p.c1);
    double sp = 2.0 * std::sqrt(1.0 + p.c2);
    double um = (branch == Branch::plus_extremal) ? 2.0 + sm : 2.0 - sm;
    double up = (branch == Branch::minus_extremal) ? -2.0 - sp : -2.0 + sp;
    return {um, up};
}

ThetaProfile solve_profile(const HomParams& p, const GridSpec& grid, double tol) {
    if (p.c1 < -1.0 || p.c2 < -1.0 || p.c3 < cbar3(p.c1, p.c2))
        throw std::domain_error("solve_profile: parameters outside the admissible set");
    if (grid.n < 8) throw std::invalid_argument("solve_profile: grid too coarse");
    double local_tol = std::min(tol * 1e-2, 1e-10);

    ThetaProfile prof;
    prof.params = p;
    prof.nodes = cheb_interior_nodes(grid.n);
    std::size_t m = prof.nodes.size();
    prof.u_values.assign(m, 0.0);
    prof.du_values.assign(m, 0.0);
    std::vector<char> have(m, 0);

    Dopri integ{p, guard_bound(p)};

    // positive direction
    {
        std::vector<double> nodes;
        for (double yy : prof.nodes)
            if (yy > 0.0 && yy <= 1.0 - eps_bl) nodes.push_back(yy);
        double y = 0.0, u = p.gamma;
        bool ok = integ.run(y, u, 1.0 - eps_bl, nodes,
                            [&](double yy, double uu) {
                                std::size_t i = bracket_index(prof.nodes, yy);
                                if (prof.nodes[i] != yy) ++i;
                                prof.u_values[i] = uu;
                                have[i] = 1;
                            },
                            local_tol);
        if (!ok) throw BlowUpError(y);
        double root = nearest_root(-2.0 + 2.0 * std::sqrt(1.0 + p.c2),
                                   -2.0 - 2.0 * std::sqrt(1.0 + p.c2), u);
        prof.endpoint_plus = root;
        EndpointTail lm = plus_side_model(p, root, eps_bl, u);
        for (std::size_t i = 0; i < m; ++i) {
            if (prof.nodes[i] > 1.0 - eps_bl && !have[i]) {
                prof.u_values[i] = lm.value(1.0 - prof.nodes[i]);
                have[i] = 1;
            }
        }
    }
    // negative direction
    {
        std::vector<double> nodes;
        for (auto it = prof.nodes.rbegin(); it != prof.nodes.rend(); ++it)
            if (*it < 0.0 && *it >= -1.0 + eps_bl) nodes.push_back(*it);
        double y = 0.0, u = p.gamma;
        bool ok = integ.run(y, u, -1.0 + eps_bl, nodes,
                            [&](double yy, double uu) {
                                std::size_t i = bracket_index(prof.nodes, yy);
                                if (prof.nodes[i] != yy) ++i;
                                prof.u_values[i] = uu;
                                have[i] = 1;
                            },
                            local_tol);
        if (!ok) throw BlowUpError(y);
        double root = nearest_root(2.0 - 2.0 * std::sqrt(1.0 + p.c1),
                                   2.0 + 2.0 * std::sqrt(1.0 + p.c1), u);
        prof.endpoint_minus = root;
        EndpointTail lm = minus_side_model(p, root, eps_bl, u);
        for (std::size_t i = 0; i < m; ++i) {
            if (prof.nodes[i] < -1.0 + eps_bl && !have[i]) {
                prof.u_values[i] = lm.value(1.0 + prof.nodes[i]);
                have[i] = 1;
            }
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (!have[i]) prof.u_values[i] = p.gamma;  // the y=0 node
        prof.du_values[i] = ode_rhs(p, prof.nodes[i], prof.u_values[i]);
    }
    prof.max_residual = node_defect_max(prof);
    return prof;
}

GammaRange gamma_range(double c1, double c2, double c3, double tol) {
    if (c1 < -1.0 || c2 < -1.0 || c3 < cbar3(c1, c2) - 1e-12)
        throw std::domain_error("gamma_range: parameters outside the admissible set");
    if (tol <= 0.0) tol = 1e-8;
    double G0 = 4.0 + 2.0 * std::sqrt(1.0 + c1) + 2.0 * std::sqrt(1.0 + c2) +
                2.0 * std::sqrt(std::max(c3, 0.0)) + 2.0;

    auto p_minus = [&](double g) {  // true iff gamma <= gamma_plus
        return reaches_boundary({c1, c2, c3, g}, -1.0 + eps_probe);
    };
    auto p_plus = [&](double g) {  // true iff gamma >= gamma_minus
        return reaches_boundary({c1, c2, c3, g}, 1.0 - eps_probe);
    };

    auto bracket_down = [&](auto&& pred) {  // largest probe with pred true
        double g = 0.0;
        for (int i = 0; i < 64; ++i) {
            if (pred(g)) return g;
            g = (g == 0.0) ? -G0 : 2.0 * g;
        }
        throw NoConvergeError("gamma_range: no admissible gamma found (lower scan)");
    };
    auto bracket_up = [&](auto&& pred) {
        double g = 0.0;
        for (int i = 0; i < 64; ++i) {
            if (pred(g)) return g;
            g = (g == 0.0) ? G0 : 2.0 * g;
        }
        throw NoConvergeError("gamma_range: no admissible gamma found (upper scan)");
    };

    // gamma_plus: bisect the failure edge of p_minus
    double lo = bracket_down(p_minus);
    double hi = lo == 0.0 ? G0 : std::max(G0, -lo);
    for (int i = 0; i < 64 && p_minus(hi); ++i) hi *= 2.0;
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (p_minus(mid))
            lo = mid;
        else
            hi = mid;
    }
    double gplus = lo;

    // gamma_minus: bisect the failure edge of p_plus
    double hi2 = bracket_up(p_plus);
    double lo2 = hi2 == 0.0 ? -G0 : -std::max(G0, hi2);
    for (int i = 0; i < 64 && p_plus(lo2); ++i) lo2 *= 2.0;
    while (hi2 - lo2 > tol) {
        double mid = 0.5 * (lo2 + hi2);
        if (p_plus(mid))
            hi2 = mid;
        else
            lo2 = mid;
    }
    double gminus = hi2;

    if (gminus > gplus) {
        double mid = 0.5 * (gminus + gplus);
        gminus = gplus = mid;
    }
    return {gminus, gplus, tol};
}

// Nodal values satisfy the equation by construction whenever du was computed
// from u, so the defect is also probed at three interior points of each
// interval through the cubic-Hermite extension.
double ode_residual(const ThetaProfile& prof) {
    if (prof.nodes.size() < 2 || prof.nodes.size() != prof.u_values.size() ||
        prof.nodes.size() != prof.du_values.size())
        throw std::invalid_argument("ode_residual: malformed profile");
    return hermite_defect_probe(prof);
}

double EndpointTail::value(double e) const {
    if (e <= 0.0) return root;
    if (resonant) return root + coef * e * std::log(e) + lin * e;
    return root + lin * e + coef * std::pow(e, expo);
}

double EndpointTail::slope(double e) const {
    if (e < 1e-300) e = 1e-300;
    if (resonant) return coef * (std::log(e) + 1.0) + lin;
    return lin + coef * expo * std::pow(e, expo - 1.0);
}

EndpointTail minus_tail(const ThetaProfile& prof) {
    if (prof.nodes.empty()) throw std::invalid_argument("minus_tail: empty profile");
    double e_edge = 1.0 + prof.nodes.front();
    return minus_side_model(prof.params, prof.endpoint_minus, e_edge,
                            prof.u_values.front());
}

EndpointTail plus_tail(const ThetaProfile& prof) {
    if (prof.nodes.empty()) throw std::invalid_argument("plus_tail: empty profile");
    double e_edge = 1.0 - prof.nodes.back();
    return plus_side_model(prof.params, prof.endpoint_plus, e_edge,
                           prof.u_values.back());
}

}  // namespace homflow
