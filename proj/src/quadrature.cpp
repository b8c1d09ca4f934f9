#include "homflow/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace homflow {

QuadRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
    QuadRule r;
    r.x.resize(n);
    r.w.resize(n);
    int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.x[i] = -x;
        r.x[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        r.w[i] = w;
        r.w[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.x[n / 2] = 0.0;
    return r;
}

namespace {

// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix,
// accumulating only the first row of the eigenvector matrix (enough for
// Golub-Welsch weights).
void tridiag_eig(std::vector<double>& d, std::vector<double>& e, std::vector<double>& z) {
    int n = static_cast<int>(d.size());
    e.push_back(0.0);
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 1e-16 * dd) break;
            }
            if (m != l) {
                if (iter++ == 60) throw std::runtime_error("tridiag_eig: no convergence");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double rr = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(rr, g));
                double s = 1.0, c = 1.0, p = 0.0;
                for (int i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    double b = c * e[i];
                    rr = std::hypot(f, g);
                    e[i + 1] = rr;
                    if (rr == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / rr;
                    c = g / rr;
                    g = d[i + 1] - p;
                    rr = (d[i] - g) * s + 2.0 * c * b;
                    p = s * rr;
                    d[i + 1] = g + p;
                    g = c * rr - b;
                    f = z[i + 1];
                    z[i + 1] = s * z[i] + c * f;
                    z[i] = c * z[i] - s * f;
                }
                if (rr == 0.0 && m - 1 >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int i, int j) { return d[i] < d[j]; });
    std::vector<double> ds(n), zs(n);
    for (int i = 0; i < n; ++i) {
        ds[i] = d[idx[i]];
        zs[i] = z[idx[i]];
    }
    d = ds;
    z = zs;
}

}  // namespace

QuadRule gauss_jacobi(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("gauss_jacobi: n must be positive");
    if (a <= -1.0 || b <= -1.0)
        throw std::invalid_argument("gauss_jacobi: exponents must exceed -1");
    std::vector<double> d(n), e(n > 1 ? n - 1 : 0), z(n, 0.0);
    z[0] = 1.0;
    double ab = a + b;
    d[0] = (b - a) / (ab + 2.0);
    for (int k = 1; k < n; ++k) {
        double t = 2.0 * k + ab;
        d[k] = (b * b - a * a) / (t * (t + 2.0));
    }
    for (int k = 1; k < n; ++k) {
        double beta;
        if (k == 1) {
            beta = 4.0 * (1.0 + a) * (1.0 + b) / ((ab + 2.0) * (ab + 2.0) * (ab + 3.0));
        } else {
            double t = 2.0 * k + ab;
            beta = 4.0 * k * (k + a) * (k + b) * (k + ab) /
                   (t * t * (t + 1.0) * (t - 1.0));
        }
        e[k - 1] = std::sqrt(beta);
    }
    tridiag_eig(d, e, z);
    double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) +
                          std::lgamma(b + 1.0) - std::lgamma(ab + 2.0));
    QuadRule r;
    r.x = d;
    r.w.resize(n);
    for (int i = 0; i < n; ++i) r.w[i] = mu0 * z[i] * z[i];
    return r;
}

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b,
                   double fa, double fm, double fb, double whole, double tol,
                   int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

double golden_max(const std::function<double(double)>& f, double a, double b,
                  double xtol) {
    const double invphi = 0.6180339887498949;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > xtol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

double panel_integrate(const std::function<double(double)>& f, double a, double b,
                       int n_panels, const QuadRule& rule) {
    double h = (b - a) / n_panels;
    double total = 0.0;
    for (int p = 0; p < n_panels; ++p) {
        double lo = a + p * h;
        double c = lo + 0.5 * h, half = 0.5 * h;
        double s = 0.0;
        for (size_t i = 0; i < rule.x.size(); ++i) s += rule.w[i] * f(c + half * rule.x[i]);
        total += s * half;
    }
    return total;
}

}  // namespace homflow
