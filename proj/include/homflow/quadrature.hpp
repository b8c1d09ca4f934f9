#pragma once

#include <functional>
#include <vector>

namespace homflow {

/// Nodes and weights of a quadrature rule on a reference interval.
struct QuadRule {
    std::vector<double> x;
    std::vector<double> w;
};

/// n-point Gauss-Legendre rule on [-1,1].
QuadRule gauss_legendre(int n);

/// n-point Gauss-Jacobi rule on [-1,1] for the weight (1-x)^a (1+x)^b, a,b > -1.
/// The weight is absorbed into w, so sum_i w_i f(x_i) ~ int (1-x)^a (1+x)^b f dx.
QuadRule gauss_jacobi(int n, double a, double b);

/// Adaptive Simpson integration of f on [a,b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 60);

/// Golden-section maximizer of f on [a,b]; returns the abscissa of the maximum.
double golden_max(const std::function<double(double)>& f, double a, double b,
                  double xtol);

/// Composite fixed-order Gauss-Legendre over [a,b] split into n_panels equal panels.
double panel_integrate(const std::function<double(double)>& f, double a, double b,
                       int n_panels, const QuadRule& rule);

}  // namespace homflow
