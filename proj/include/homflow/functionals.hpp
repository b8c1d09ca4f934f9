#pragma once

#include <stdexcept>

#include "homflow/field.hpp"
#include "homflow/profile.hpp"

namespace homflow {

struct DivergingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Richardson-extrapolated value of the force integral with an error estimate;
/// the estimate is the last refinement difference plus a roundoff floor.
struct BResult {
    double value;
    double error;
};

struct BQuadSpec {
    int base_panels = 64;          ///< Richardson ladder uses {p, 2p, 4p}
    double endpoint_offset = 1e-10;
};

/// Integral over (-1,1) of y U'^2 - (2-y^2)/(1-y^2) U - y/(1-y^2) U^2 for an
/// interior-branch profile. Throws DivergingError when either endpoint value
/// exceeds 1e-8 in magnitude (the integrand is then not integrable).
BResult compute_b(const ThetaProfile& profile, const BQuadSpec& quad = {});

/// Scale-invariant sup-norms of the field, each reduced to a one-dimensional
/// maximization over the polar angle by (-1)-homogeneity:
///   k_cone  = sup over sin(theta) <= 1/e of |x'|^{1/2}|x|^{1/2}|u|
///   k_outer = sup over sin(theta) >  1/e of |x||u|
///   k_grad  = sup over all angles of |x'||x|·|grad u|_F
struct KReport {
    double k_cone;
    double k_outer;
    double k_grad;
};

KReport compute_K(const VelocityField& field);

/// Max violation over random cone samples (sin(theta) <= 1/e) of the two-sided
/// pointwise bound: 1/|x| <= -(1/|x|) ln(|x'|/|x|) <= (2/e)|x'|^{-1/2}|x|^{-1/2}.
/// Violations are reported multiplied by |x| so they are scale-invariant;
/// a nonpositive return means the bound holds on every sample.
double pu09_check(int sample_count, unsigned long long seed = 20260823ULL);

}  // namespace homflow
