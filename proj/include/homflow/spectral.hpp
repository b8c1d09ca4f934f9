#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "homflow/field.hpp"
#include "homflow/functionals.hpp"
#include "homflow/profile.hpp"

namespace homflow {

struct CFLViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PicardDiverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SmallnessViolated : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class InitKind { zero, random_field, single_mode };

struct InitSpec {
    InitKind kind = InitKind::zero;
    unsigned long long seed = 1;
    double target_l3 = 0.0;          ///< random_field: prescribed L3 norm of w0
    double k0 = 3.0;                 ///< random_field: spectral peak (integer mode units)
    std::array<int, 3> mode{1, 0, 0};  ///< single_mode: integer wavevector
    int component = 1;               ///< single_mode: velocity component, k.e must vanish
    double amplitude = 1.0;
};

struct SimConfig {
    double L = 6.283185307179586;
    int N = 32;
    double dt = 1e-3;
    double T = 0.05;
    HomParams background{};
    double rho_m = 0.5;   ///< axis blend radius; must exceed 2L/N
    double R_c = 2.5;     ///< outer cutoff radius; must stay below L/2
    InitSpec init{};
    std::vector<double> q_list{6.0};  ///< norms recorded in addition to L2/L3
    bool dealias = true;
    int record_stride = 1;

    /// Structural checks (grid, radii, steps); CFL is checked against the
    /// realized fields when stepping. Throws std::invalid_argument.
    void validate() const;
};

/// Divergence-free spectral velocity on the periodic box: half-spectrum r2c
/// layout [N][N][N/2+1], coefficients of exp(i k x).
struct SpecField {
    int n = 0;
    double L = 0.0;
    std::array<std::vector<std::complex<double>>, 3> comp;

    std::size_t spec_size() const {
        return static_cast<std::size_t>(n) * n * (n / 2 + 1);
    }
    std::size_t at(int i, int j, int k3) const {
        return (static_cast<std::size_t>(i) * n + j) * (n / 2 + 1) + k3;
    }
};

SpecField make_field(int n, double L);

/// Integer mode number of storage index i (negative frequencies wrap).
inline int mode_of(int n, int i) { return i <= n / 2 ? i : i - n; }

struct SpectralState {
    SpecField w;
    double t = 0.0;
};

void leray_project(SpecField& f);
void dealias_two_thirds(SpecField& f);

/// max over modes of |k . w_hat(k)| in physical wavenumber units.
double max_divergence(const SpecField& f);

/// max over the half-spectrum reality plane k3 = 0 of
/// |w_hat(-k) - conj(w_hat(k))|.
double reality_defect(const SpecField& f);

double spectral_l2(const SpecField& f);       ///< ||w||_{L2(box)} by Parseval
double spectral_grad_l2sq(const SpecField& f); ///< ||grad w||^2_{L2(box)}
double sup_speed(const SpecField& f);          ///< max over grid of |w(x)|
double grid_norm_q(const SpecField& f, double q);

/// Analytic mollification of the singular background: the exact field times a
/// quintic axis blend beta(rho/rho_m) and a quintic outer cutoff chi(r)
/// falling from 1 at 0.8 R_c to 0 at R_c.
class MollifiedBackground {
  public:
    MollifiedBackground(const HomParams& params, double rho_m, double R_c);

    Vec3 velocity(const Vec3& x) const;
    Mat3 gradient(const Vec3& x) const;
    double rho_m() const { return rho_m_; }
    double R_c() const { return R_c_; }
    const VelocityField& exact() const { return field_; }

  private:
    VelocityField field_;
    double rho_m_;
    double R_c_;
};

/// Grid-ready background: real-space samples of the mollified field after
/// spectral truncation and projection, its spectral gradient, and a report of
/// the sup-norm and weighted sup-functionals of the sampled mollified field.
struct BackgroundField {
    int n = 0;
    double L = 0.0;
    std::array<std::vector<double>, 3> u;
    std::array<std::array<std::vector<double>, 3>, 3> grad;  ///< grad[i][j] = d u_i/d x_j
    SpecField spec;
    double sup_norm = 0.0;
    KReport k_mollified{0.0, 0.0, 0.0};
};

BackgroundField make_background(const HomParams& params, const SimConfig& config);

SpectralState make_initial_state(const SimConfig& config);

/// One exponential-integrator midpoint step of the background-coupled linear
/// system. Throws CFLViolation when dt exceeds the advective bound.
SpectralState linear_step(const SpectralState& state, const BackgroundField& bg,
                          double dt);

/// Same stepper with the self-advection term included; this is what run_sim
/// advances internally.
SpectralState nonlinear_step(const SpectralState& state, const BackgroundField& bg,
                             double dt, bool dealias = true);

struct NormSample {
    double t;
    double l2;
    double l3;
    double grad_l2sq;
    double cross;  ///< discrete integral of (w . grad U) . w
    std::vector<double> lq;
};

struct NormSeries {
    std::vector<double> q_list;
    std::vector<NormSample> rows;
};

NormSeries run_sim(const SimConfig& config);

struct PicardReport {
    std::vector<double> sup_diffs;  ///< D_k = sup_t ||a_k - a_{k-1}||_3, k = 1..K
    std::vector<double> ratios;     ///< D_{k+1}/D_k (0 when both vanish)
};

/// Joint iterated linear solves a_k driven by a_{k-1}; a_0 = 0. Throws
/// PicardDiverged when the contraction ratio exceeds 1 three times in a row.
PicardReport picard_linear(const SpectralState& w0, const BackgroundField& bg,
                           const SimConfig& config, int iterations);

/// Discrete mild-solution quadratic term: minus the trapezoid-rule heat
/// propagation of the projected divergence of u tensor v along the stored
/// trajectory (uniform spacing dt). Trajectories are capped at 512 slices.
std::vector<SpecField> duhamel_bilinear(const std::vector<SpecField>& u,
                                        const std::vector<SpecField>& v, double dt,
                                        bool dealias = true);

std::vector<SpecField> duhamel_rhs(const std::vector<SpecField>& w, double dt,
                                   bool dealias = true);

struct EnergyReport {
    std::vector<double> defects;       ///< per-interval energy balance defect
    std::vector<double> cross_ratios;  ///< |cross| / ||grad w||^2 per row
    double max_abs_defect = 0.0;
    double max_cross_ratio = 0.0;
    double k_reference = 0.0;  ///< reporting yardstick built from the background sups
};

/// Balance defect (E_{i+1}-E_i)/dt + avg ||grad w||^2 + avg cross per interval,
/// and the measured cross-term ratios against a yardstick combination
/// k_cone^2 + k_outer^2 + k_grad of the background report (reported, not a bound).
EnergyReport energy_report(const NormSeries& series, const KReport& background_k);

void save_checkpoint(const SpectralState& state, const std::string& path);
SpectralState load_checkpoint(const std::string& path);

/// x = a + N(x,x) by direct iteration from x0 = a, for any V with +, - and a
/// caller-supplied norm. The contraction precondition 4 |N| |a| < 1 uses an
/// operator-norm estimate maximized over sampled unit pairs.
template <typename V, typename Bilinear, typename Norm, typename Sampler>
V bilinear_fixed_point(const V& a, Bilinear&& nmap, Norm&& norm,
                       Sampler&& unit_sample, int est_samples, double tol,
                       int max_iter = 200) {
    double n_est = 0.0;
    for (int i = 0; i < est_samples; ++i) {
        const V u = unit_sample(2 * i);
        const V v = unit_sample(2 * i + 1);
        n_est = std::max(n_est, norm(nmap(u, v)));
    }
    if (!(4.0 * n_est * norm(a) < 1.0))
        throw SmallnessViolated("bilinear_fixed_point: 4 |N| |a| >= 1");
    V x = a;
    for (int it = 0; it < max_iter; ++it) {
        V next = a + nmap(x, x);
        const double diff = norm(next - x);
        x = next;
        if (diff < tol) return x;
    }
    throw NoConvergeError("bilinear_fixed_point: iteration cap reached");
}

}  // namespace homflow
