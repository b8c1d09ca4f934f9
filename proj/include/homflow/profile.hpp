#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace homflow {

/// Parameter tuple (c1,c2,c3,gamma) of the reduced angular ODE
///   (1-y^2) U' + 2 y U + U^2/2 = c1 (1-y) + c2 (1+y) + c3 (1-y^2),  U(0)=gamma.
struct HomParams {
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
    double gamma = 0.0;
};

enum class Admissibility { outside_J, in_J, in_M };

enum class Branch { plus_extremal, minus_extremal, interior };

struct GammaRange {
    double gamma_minus;
    double gamma_plus;
    double tol;
};

/// Discretized solution of the angular ODE on interior nodes of (-1,1).
/// du_values holds the ODE slope at each node; endpoint values sit on the
/// roots of the quadratics U(-1)^2 - 4U(-1) - 4c1 = 0, U(1)^2 + 4U(1) - 4c2 = 0.
struct ThetaProfile {
    std::vector<double> nodes;
    std::vector<double> u_values;
    std::vector<double> du_values;
    double endpoint_minus = 0.0;
    double endpoint_plus = 0.0;
    HomParams params;
    double max_residual = 0.0;
};

struct GridSpec {
    int n = 2400;  ///< number of Chebyshev-clustered subintervals; n-1 interior nodes
};

struct BlowUpError : std::runtime_error {
    double y_star;
    explicit BlowUpError(double y)
        : std::runtime_error("profile blow-up at y=" + std::to_string(y)), y_star(y) {}
};

struct NoConvergeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Lower admissibility threshold for c3 at given (c1,c2).
double cbar3(double c1, double c2);

Admissibility is_admissible(const HomParams& params);

/// Right-hand side slope U' = f(y,U) of the angular ODE.
double ode_rhs(const HomParams& params, double y, double u);

ThetaProfile solve_profile(const HomParams& params, const GridSpec& grid, double tol);

/// Endpoint pair (U(-1), U(1)) on the requested solution branch.
std::pair<double, double> endpoint_values(const HomParams& params, Branch branch);

GammaRange gamma_range(double c1, double c2, double c3, double tol);

/// Max absolute ODE defect of the cubic-Hermite extension of the profile,
/// probed at the nodes and at three interior points per interval.
double ode_residual(const ThetaProfile& profile);

/// Closed-form profile for c = 0: U = 2 gamma (1-y^2)/(2 + gamma y).
double landau_profile(double gamma, double y);

/// Matched local model of U near an endpoint, in the distance variable
/// e (= 1+y at the left end, 1-y at the right end):
///   U = root + lin*e + coef*e^expo, or, when the endpoint value vanishes,
///   U = root + coef*e*ln(e) + lin*e.
/// Valid between the endpoint and the outermost stored node; this is what
/// field evaluation uses beyond the node range, where a cubic cannot follow
/// the e*ln(e) behaviour.
struct EndpointTail {
    double root;
    bool resonant;
    double lin;
    double coef;
    double expo;

    double value(double e) const;
    double slope(double e) const;  ///< dU/de
};

/// Tail at y = -1, anchored at the first stored node (e = 1+y).
EndpointTail minus_tail(const ThetaProfile& profile);
/// Tail at y = +1, anchored at the last stored node (e = 1-y).
EndpointTail plus_tail(const ThetaProfile& profile);

}  // namespace homflow
