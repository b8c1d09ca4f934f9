#include "homflow/spectral.hpp"

#include <fftw3.h>

#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>

namespace homflow {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

uint64_t splitmix64(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double unit_double(uint64_t& state) {
    return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

double normal_draw(uint64_t& state) {
    double u1 = unit_double(state);
    while (u1 <= 0.0) u1 = unit_double(state);
    const double u2 = unit_double(state);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

/// Plans are created once on internal buffers; execution copies through them,
/// so caller arrays need no FFTW alignment. Forward applies the 1/N^3 factor
/// that turns DFT sums into coefficients of exp(i k x).
class Fft3 {
  public:
    explicit Fft3(int n)
        : n_(n),
          rbuf_(static_cast<std::size_t>(n) * n * n),
          cbuf_(static_cast<std::size_t>(n) * n * (n / 2 + 1)) {
        fwd_ = fftw_plan_dft_r2c_3d(n, n, n, rbuf_.data(),
                                    reinterpret_cast<fftw_complex*>(cbuf_.data()),
                                    FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_c2r_3d(n, n, n,
                                    reinterpret_cast<fftw_complex*>(cbuf_.data()),
                                    rbuf_.data(), FFTW_ESTIMATE);
        if (fwd_ == nullptr || bwd_ == nullptr)
            throw std::runtime_error("fftw plan creation failed");
    }
    ~Fft3() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
    }
    Fft3(const Fft3&) = delete;
    Fft3& operator=(const Fft3&) = delete;

    void forward(const std::vector<double>& real,
                 std::vector<std::complex<double>>& spec) {
        std::copy(real.begin(), real.end(), rbuf_.begin());
        fftw_execute(fwd_);
        const double scale = 1.0 / (static_cast<double>(n_) * n_ * n_);
        spec.resize(cbuf_.size());
        for (std::size_t i = 0; i < cbuf_.size(); ++i) spec[i] = cbuf_[i] * scale;
    }

    void backward(const std::vector<std::complex<double>>& spec,
                  std::vector<double>& real) {
        std::copy(spec.begin(), spec.end(), cbuf_.begin());
        fftw_execute(bwd_);
        real.resize(rbuf_.size());
        std::copy(rbuf_.begin(), rbuf_.end(), real.begin());
    }

  private:
    int n_;
    std::vector<double> rbuf_;
    std::vector<std::complex<double>> cbuf_;
    fftw_plan fwd_;
    fftw_plan bwd_;
};

std::vector<double> wavenumbers(int n, double L) {
    std::vector<double> k(n);
    for (int i = 0; i < n; ++i) k[i] = kTwoPi / L * mode_of(n, i);
    return k;
}

/// Parseval weight of a half-spectrum entry: interior k3 columns stand in for
/// their conjugates as well.
inline double column_weight(int n, int k3) {
    return (k3 == 0 || k3 == n / 2) ? 1.0 : 2.0;
}

void check_same_box(const SpecField& a, const SpecField& b, const char* who) {
    if (a.n != b.n || a.L != b.L)
        throw std::invalid_argument(std::string(who) + ": mismatched grids");
}

void add_scaled(SpecField& dst, const SpecField& src, double s) {
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < dst.comp[c].size(); ++i)
            dst.comp[c][i] += s * src.comp[c][i];
}

void apply_heat(SpecField& f, double dt) {
    const auto k = wavenumbers(f.n, f.L);
    const int half = f.n / 2 + 1;
    for (int i = 0; i < f.n; ++i)
        for (int j = 0; j < f.n; ++j)
            for (int k3 = 0; k3 < half; ++k3) {
                const double k2 = k[i] * k[i] + k[j] * k[j] + k[k3] * k[k3];
                const double e = std::exp(-k2 * dt);
                const std::size_t p = f.at(i, j, k3);
                for (int c = 0; c < 3; ++c) f.comp[c][p] *= e;
            }
}

struct Workspace {
    int n;
    double L;
    Fft3 fft;
    std::array<std::vector<double>, 3> wr;
    std::array<std::vector<double>, 6> tr;
    std::vector<std::complex<double>> tc;

    Workspace(int n_, double L_)
        : n(n_), L(L_), fft(n_) {
        const std::size_t real_size = static_cast<std::size_t>(n) * n * n;
        for (auto& v : wr) v.assign(real_size, 0.0);
        for (auto& v : tr) v.assign(real_size, 0.0);
    }
};

constexpr int kTensorRow[6] = {0, 0, 0, 1, 1, 2};
constexpr int kTensorCol[6] = {0, 1, 2, 1, 2, 2};

/// rhs = -P div(T) with T = w ox w (when include_self) + U ox w + w ox U,
/// products formed pseudo-spectrally, then dealiased and projected.
void eval_rhs(Workspace& ws, const SpecField& w, const BackgroundField& bg,
              bool include_self, bool dealias, SpecField& out) {
    for (int c = 0; c < 3; ++c) ws.fft.backward(w.comp[c], ws.wr[c]);

    const std::size_t real_size = ws.wr[0].size();
    for (int e = 0; e < 6; ++e) {
        const int a = kTensorRow[e];
        const int b = kTensorCol[e];
        const double* wa = ws.wr[a].data();
        const double* wb = ws.wr[b].data();
        const double* ua = bg.u[a].data();
        const double* ub = bg.u[b].data();
        double* t = ws.tr[e].data();
        if (include_self) {
            for (std::size_t p = 0; p < real_size; ++p)
                t[p] = wa[p] * wb[p] + ua[p] * wb[p] + wa[p] * ub[p];
        } else {
            for (std::size_t p = 0; p < real_size; ++p)
                t[p] = ua[p] * wb[p] + wa[p] * ub[p];
        }
    }

    out.n = w.n;
    out.L = w.L;
    for (int c = 0; c < 3; ++c) out.comp[c].assign(w.spec_size(), {0.0, 0.0});

    const auto k = wavenumbers(w.n, w.L);
    const int half = w.n / 2 + 1;
    for (int e = 0; e < 6; ++e) {
        const int a = kTensorRow[e];
        const int b = kTensorCol[e];
        ws.fft.forward(ws.tr[e], ws.tc);
        for (int i = 0; i < w.n; ++i)
            for (int j = 0; j < w.n; ++j)
                for (int k3 = 0; k3 < half; ++k3) {
                    const std::size_t p = w.at(i, j, k3);
                    const std::complex<double> th = ws.tc[p];
                    const double kv[3] = {k[i], k[j], k[k3]};
                    // (div T)_a picks up d_b T_ab; symmetric off-diagonal
                    // entries feed both rows.
                    out.comp[a][p] -= std::complex<double>(0.0, kv[b]) * th;
                    if (a != b)
                        out.comp[b][p] -= std::complex<double>(0.0, kv[a]) * th;
                }
    }

    if (dealias) dealias_two_thirds(out);
    leray_project(out);
}

double workspace_norm_q(Workspace& ws, const SpecField& f, double q) {
    for (int c = 0; c < 3; ++c) ws.fft.backward(f.comp[c], ws.wr[c]);
    const double h3 = (f.L / f.n) * (f.L / f.n) * (f.L / f.n);
    double sum = 0.0;
    for (std::size_t p = 0; p < ws.wr[0].size(); ++p) {
        const double m2 = ws.wr[0][p] * ws.wr[0][p] + ws.wr[1][p] * ws.wr[1][p] +
                          ws.wr[2][p] * ws.wr[2][p];
        sum += std::pow(m2, 0.5 * q);
    }
    return std::pow(h3 * sum, 1.0 / q);
}

double workspace_sup(Workspace& ws, const SpecField& f) {
    for (int c = 0; c < 3; ++c) ws.fft.backward(f.comp[c], ws.wr[c]);
    double best = 0.0;
    for (std::size_t p = 0; p < ws.wr[0].size(); ++p) {
        const double m2 = ws.wr[0][p] * ws.wr[0][p] + ws.wr[1][p] * ws.wr[1][p] +
                          ws.wr[2][p] * ws.wr[2][p];
        best = std::max(best, m2);
    }
    return std::sqrt(best);
}

double cfl_limit(double h, double speed) {
    return 0.5 * h / std::max(speed, 1e-12);
}

SpectralState step_once(Workspace& ws, const SpectralState& state,
                        const BackgroundField& bg, double dt, bool include_self,
                        bool dealias) {
    SpecField r0;
    eval_rhs(ws, state.w, bg, include_self, dealias, r0);

    SpecField half = state.w;
    add_scaled(half, r0, 0.5 * dt);
    apply_heat(half, 0.5 * dt);

    SpecField r1;
    eval_rhs(ws, half, bg, include_self, dealias, r1);
    apply_heat(r1, 0.5 * dt);

    SpecField out = state.w;
    apply_heat(out, dt);
    add_scaled(out, r1, dt);
    return SpectralState{std::move(out), state.t + dt};
}

NormSample make_sample(Workspace& ws, const SpectralState& state,
                       const BackgroundField& bg,
                       const std::vector<double>& q_list) {
    NormSample s;
    s.t = state.t;
    for (int c = 0; c < 3; ++c) ws.fft.backward(state.w.comp[c], ws.wr[c]);
    const double h3 = (state.w.L / state.w.n) * (state.w.L / state.w.n) *
                      (state.w.L / state.w.n);
    double sum2 = 0.0, sum3 = 0.0, cross = 0.0;
    std::vector<double> sums(q_list.size(), 0.0);
    for (std::size_t p = 0; p < ws.wr[0].size(); ++p) {
        const double w0 = ws.wr[0][p], w1 = ws.wr[1][p], w2 = ws.wr[2][p];
        const double m2 = w0 * w0 + w1 * w1 + w2 * w2;
        const double m = std::sqrt(m2);
        sum2 += m2;
        sum3 += m2 * m;
        for (std::size_t qi = 0; qi < q_list.size(); ++qi)
            sums[qi] += std::pow(m, q_list[qi]);
        const double wv[3] = {w0, w1, w2};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                cross += wv[j] * bg.grad[i][j][p] * wv[i];
    }
    s.l2 = std::sqrt(h3 * sum2);
    s.l3 = std::cbrt(h3 * sum3);
    s.grad_l2sq = spectral_grad_l2sq(state.w);
    s.cross = h3 * cross;
    s.lq.resize(q_list.size());
    for (std::size_t qi = 0; qi < q_list.size(); ++qi)
        s.lq[qi] = std::pow(h3 * sums[qi], 1.0 / q_list[qi]);
    return s;
}

void check_finite(const NormSample& s) {
    const bool ok = std::isfinite(s.l2) && std::isfinite(s.l3) &&
                    std::isfinite(s.grad_l2sq) && std::isfinite(s.cross);
    if (!ok)
        throw std::runtime_error("run_sim: non-finite norms at t=" +
                                 std::to_string(s.t) +
                                 " (l2=" + std::to_string(s.l2) + ")");
}

/// Quintic smoothstep, C^2 at both ends.
double smoothstep5(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

double smoothstep5_deriv(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return 30.0 * x * x * (1.0 - x) * (1.0 - x);
}

void write_raw(std::ofstream& out, const void* data, std::size_t bytes) {
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
}

void read_raw(std::ifstream& in, void* data, std::size_t bytes) {
    in.read(static_cast<char*>(data), static_cast<std::streamsize>(bytes));
    if (!in) throw std::runtime_error("checkpoint: truncated file");
}

constexpr char kCkptMagic[8] = {'S', 'P', 'E', 'C', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kCkptVersion = 1;
constexpr std::size_t kDuhamelCap = 512;

}  // namespace

void SimConfig::validate() const {
    if (N < 4 || (N & (N - 1)) != 0)
        throw std::invalid_argument("SimConfig: N must be a power of two, at least 4");
    if (!(L > 0.0)) throw std::invalid_argument("SimConfig: L must be positive");
    if (!(dt > 0.0)) throw std::invalid_argument("SimConfig: dt must be positive");
    if (!(T >= 0.0)) throw std::invalid_argument("SimConfig: T must be nonnegative");
    if (record_stride < 1)
        throw std::invalid_argument("SimConfig: record_stride must be at least 1");
    if (!(rho_m > 2.0 * L / N))
        throw std::invalid_argument(
            "SimConfig: axis blend radius rho_m must exceed two grid spacings");
    if (!(R_c > 0.0 && R_c < 0.5 * L))
        throw std::invalid_argument(
            "SimConfig: cutoff radius R_c must sit inside the half-box");
    for (double q : q_list)
        if (!(q >= 1.0))
            throw std::invalid_argument("SimConfig: recorded norms need q >= 1");
    if (init.kind == InitKind::random_field) {
        if (!(init.target_l3 > 0.0))
            throw std::invalid_argument("SimConfig: random init needs target_l3 > 0");
        if (!(init.k0 > 0.0))
            throw std::invalid_argument("SimConfig: random init needs k0 > 0");
    }
    if (init.kind == InitKind::single_mode) {
        if (init.component < 0 || init.component > 2)
            throw std::invalid_argument("SimConfig: mode component out of range");
        if (init.mode[init.component] != 0)
            throw std::invalid_argument(
                "SimConfig: single mode must be transverse (k.e = 0)");
        const int cap = dealias ? N / 3 : N / 2 - 1;
        bool all_zero = true;
        for (int m : init.mode) {
            if (m != 0) all_zero = false;
            if (std::abs(m) > cap)
                throw std::invalid_argument("SimConfig: mode outside retained band");
        }
        if (all_zero)
            throw std::invalid_argument("SimConfig: single mode must be nonzero");
    }
}

SpecField make_field(int n, double L) {
    SpecField f;
    f.n = n;
    f.L = L;
    for (auto& c : f.comp) c.assign(f.spec_size(), {0.0, 0.0});
    return f;
}

void leray_project(SpecField& f) {
    const auto k = wavenumbers(f.n, f.L);
    const int half = f.n / 2 + 1;
    for (int i = 0; i < f.n; ++i)
        for (int j = 0; j < f.n; ++j)
            for (int k3 = 0; k3 < half; ++k3) {
                const double kv[3] = {k[i], k[j], k[k3]};
                const double k2 = kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2];
                if (k2 == 0.0) continue;
                const std::size_t p = f.at(i, j, k3);
                const std::complex<double> dot =
                    kv[0] * f.comp[0][p] + kv[1] * f.comp[1][p] + kv[2] * f.comp[2][p];
                for (int c = 0; c < 3; ++c) f.comp[c][p] -= kv[c] * dot / k2;
            }
}

void dealias_two_thirds(SpecField& f) {
    const int cut = f.n / 3;
    const int half = f.n / 2 + 1;
    for (int i = 0; i < f.n; ++i) {
        const bool cut_i = std::abs(mode_of(f.n, i)) > cut;
        for (int j = 0; j < f.n; ++j) {
            const bool cut_j = cut_i || std::abs(mode_of(f.n, j)) > cut;
            for (int k3 = 0; k3 < half; ++k3)
                if (cut_j || k3 > cut) {
                    const std::size_t p = f.at(i, j, k3);
                    for (int c = 0; c < 3; ++c) f.comp[c][p] = {0.0, 0.0};
                }
        }
    }
}

double max_divergence(const SpecField& f) {
    const auto k = wavenumbers(f.n, f.L);
    const int half = f.n / 2 + 1;
    double best = 0.0;
    for (int i = 0; i < f.n; ++i)
        for (int j = 0; j < f.n; ++j)
            for (int k3 = 0; k3 < half; ++k3) {
                const std::size_t p = f.at(i, j, k3);
                const std::complex<double> dot =
                    k[i] * f.comp[0][p] + k[j] * f.comp[1][p] + k[k3] * f.comp[2][p];
                best = std::max(best, std::abs(dot));
            }
    return best;
}

double reality_defect(const SpecField& f) {
    double best = 0.0;
    std::vector<int> planes{0};
    if (f.n % 2 == 0) planes.push_back(f.n / 2);
    for (int k3 : planes)
        for (int i = 0; i < f.n; ++i)
            for (int j = 0; j < f.n; ++j) {
                const std::size_t p = f.at(i, j, k3);
                const std::size_t q = f.at((f.n - i) % f.n, (f.n - j) % f.n, k3);
                for (int c = 0; c < 3; ++c)
                    best = std::max(best,
                                    std::abs(f.comp[c][q] - std::conj(f.comp[c][p])));
            }
    return best;
}

double spectral_l2(const SpecField& f) {
    const int half = f.n / 2 + 1;
    double sum = 0.0;
    for (int i = 0; i < f.n; ++i)
        for (int j = 0; j < f.n; ++j)
            for (int k3 = 0; k3 < half; ++k3) {
                const std::size_t p = f.at(i, j, k3);
                const double wgt = column_weight(f.n, k3);
                for (int c = 0; c < 3; ++c) sum += wgt * std::norm(f.comp[c][p]);
            }
    return std::sqrt(f.L * f.L * f.L * sum);
}

double spectral_grad_l2sq(const SpecField& f) {
    const auto k = wavenumbers(f.n, f.L);
    const int half = f.n / 2 + 1;
    double sum = 0.0;
    for (int i = 0; i < f.n; ++i)
        for (int j = 0; j < f.n; ++j)
            for (int k3 = 0; k3 < half; ++k3) {
                const std::size_t p = f.at(i, j, k3);
                const double k2 = k[i] * k[i] + k[j] * k[j] + k[k3] * k[k3];
                const double wgt = column_weight(f.n, k3);
                for (int c = 0; c < 3; ++c)
                    sum += wgt * k2 * std::norm(f.comp[c][p]);
            }
    return f.L * f.L * f.L * sum;
}

double sup_speed(const SpecField& f) {
    Workspace ws(f.n, f.L);
    return workspace_sup(ws, f);
}

double grid_norm_q(const SpecField& f, double q) {
    if (!(q >= 1.0)) throw std::invalid_argument("grid_norm_q: q must be >= 1");
    Workspace ws(f.n, f.L);
    return workspace_norm_q(ws, f, q);
}

MollifiedBackground::MollifiedBackground(const HomParams& params, double rho_m,
                                         double R_c)
    : field_(solve_profile(params, GridSpec{}, 1e-8)), rho_m_(rho_m), R_c_(R_c) {
    if (!(rho_m > 0.0) || !(R_c > 0.0))
        throw std::invalid_argument("MollifiedBackground: radii must be positive");
    if (is_admissible(params) != Admissibility::in_M)
        throw std::domain_error(
            "MollifiedBackground: parameters outside the admissible set");
}

namespace {
struct Blend {
    double value;
    Vec3 grad;
};

/// beta(rho/rho_m) * chi(r); chi falls from 1 at 0.8 R_c to 0 at R_c.
Blend blend_factor(const Vec3& x, double rho_m, double R_c) {
    const double rho = std::hypot(x[0], x[1]);
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    const double r0 = 0.8 * R_c;
    const double wd = R_c - r0;
    const double sb = rho / rho_m;
    const double sc = (r - r0) / wd;
    const double beta = smoothstep5(sb);
    const double chi = 1.0 - smoothstep5(sc);
    Blend out;
    out.value = beta * chi;
    out.grad = {0.0, 0.0, 0.0};
    if (rho > 0.0) {
        const double dbeta = smoothstep5_deriv(sb) / rho_m;
        out.grad[0] += dbeta * (x[0] / rho) * chi;
        out.grad[1] += dbeta * (x[1] / rho) * chi;
    }
    if (r > 0.0) {
        const double dchi = -smoothstep5_deriv(sc) / wd;
        for (int i = 0; i < 3; ++i) out.grad[i] += beta * dchi * x[i] / r;
    }
    return out;
}
}  // namespace

Vec3 MollifiedBackground::velocity(const Vec3& x) const {
    const double rho = std::hypot(x[0], x[1]);
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    if (rho == 0.0 || r >= R_c_) return {0.0, 0.0, 0.0};
    const Blend b = blend_factor(x, rho_m_, R_c_);
    if (b.value == 0.0) return {0.0, 0.0, 0.0};
    const Vec3 u = eval_velocity(field_, x);
    return {u[0] * b.value, u[1] * b.value, u[2] * b.value};
}

Mat3 MollifiedBackground::gradient(const Vec3& x) const {
    Mat3 out{};
    const double rho = std::hypot(x[0], x[1]);
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    if (rho == 0.0 || r >= R_c_) return out;
    const Blend b = blend_factor(x, rho_m_, R_c_);
    if (b.value == 0.0 && b.grad[0] == 0.0 && b.grad[1] == 0.0 && b.grad[2] == 0.0)
        return out;
    const Vec3 u = eval_velocity(field_, x);
    const Mat3 g = eval_gradient(field_, x);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            out[i][j] = g[i][j] * b.value + u[i] * b.grad[j];
    return out;
}

namespace {

KReport scan_mollified_k(const MollifiedBackground& bg) {
    constexpr int kNr = 240;
    constexpr int kNth = 320;
    const double s_cone = std::exp(-1.0);
    KReport rep{0.0, 0.0, 0.0};
    const double r_lo = 1e-5 * bg.R_c();
    for (int it = 0; it <= kNth; ++it) {
        // interior angles plus the exact cone boundaries on both sides
        double theta;
        if (it == kNth) theta = std::asin(s_cone);
        else if (it == kNth - 1) theta = 3.141592653589793 - std::asin(s_cone);
        else theta = 3.141592653589793 * (it + 0.5) / (kNth - 1);
        const double s = std::sin(theta);
        if (s <= 0.0) continue;
        const bool in_cone = s <= s_cone * (1.0 + 1e-14);
        for (int ir = 0; ir < kNr; ++ir) {
            const double r =
                r_lo * std::pow(bg.R_c() / r_lo, (ir + 0.5) / kNr);
            const Vec3 x{r * s, 0.0, r * std::cos(theta)};
            const Vec3 u = bg.velocity(x);
            const double mag = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
            const double rho = r * s;
            if (in_cone)
                rep.k_cone = std::max(rep.k_cone, std::sqrt(rho * r) * mag);
            else
                rep.k_outer = std::max(rep.k_outer, r * mag);
            const Mat3 g = bg.gradient(x);
            double f2 = 0.0;
            for (int a = 0; a < 3; ++a)
                for (int bcol = 0; bcol < 3; ++bcol) f2 += g[a][bcol] * g[a][bcol];
            rep.k_grad = std::max(rep.k_grad, rho * r * std::sqrt(f2));
        }
    }
    return rep;
}

}  // namespace

BackgroundField make_background(const HomParams& params, const SimConfig& config) {
    config.validate();
    if (is_admissible(params) != Admissibility::in_M)
        throw std::domain_error("make_background: parameters outside the admissible set");

    const MollifiedBackground moll(params, config.rho_m, config.R_c);

    BackgroundField bg;
    bg.n = config.N;
    bg.L = config.L;
    const int n = config.N;
    const double h = config.L / n;
    const std::size_t real_size = static_cast<std::size_t>(n) * n * n;
    for (auto& v : bg.u) v.assign(real_size, 0.0);

    double sup2 = 0.0;
    std::size_t p = 0;
    for (int i = 0; i < n; ++i) {
        const double x0 = -0.5 * config.L + h * i;
        for (int j = 0; j < n; ++j) {
            const double x1 = -0.5 * config.L + h * j;
            for (int k3 = 0; k3 < n; ++k3, ++p) {
                const double x2 = -0.5 * config.L + h * k3;
                const Vec3 u = moll.velocity({x0, x1, x2});
                bg.u[0][p] = u[0];
                bg.u[1][p] = u[1];
                bg.u[2][p] = u[2];
                sup2 = std::max(sup2, u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
            }
        }
    }
    bg.sup_norm = std::sqrt(sup2);
    bg.k_mollified = scan_mollified_k(moll);

    Fft3 fft(n);
    bg.spec = make_field(n, config.L);
    for (int c = 0; c < 3; ++c) fft.forward(bg.u[c], bg.spec.comp[c]);
    if (config.dealias) dealias_two_thirds(bg.spec);
    leray_project(bg.spec);
    for (int c = 0; c < 3; ++c) fft.backward(bg.spec.comp[c], bg.u[c]);

    const auto k = wavenumbers(n, config.L);
    const int half = n / 2 + 1;
    std::vector<std::complex<double>> dspec(bg.spec.spec_size());
    for (int ci = 0; ci < 3; ++ci)
        for (int cj = 0; cj < 3; ++cj) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k3 = 0; k3 < half; ++k3) {
                        const std::size_t q = bg.spec.at(i, j, k3);
                        const double kj = cj == 0 ? k[i] : (cj == 1 ? k[j] : k[k3]);
                        dspec[q] = std::complex<double>(0.0, kj) * bg.spec.comp[ci][q];
                    }
            bg.grad[ci][cj].assign(real_size, 0.0);
            fft.backward(dspec, bg.grad[ci][cj]);
        }
    return bg;
}

SpectralState make_initial_state(const SimConfig& config) {
    config.validate();
    SpectralState state;
    state.t = 0.0;
    state.w = make_field(config.N, config.L);
    const int n = config.N;

    switch (config.init.kind) {
        case InitKind::zero:
            break;
        case InitKind::single_mode: {
            std::array<int, 3> m = config.init.mode;
            if (m[2] < 0) {
                for (int& mi : m) mi = -mi;  // conjugate mode, same real field
            }
            const int i = m[0] >= 0 ? m[0] : m[0] + n;
            const int j = m[1] >= 0 ? m[1] : m[1] + n;
            const int c = config.init.component;
            const double a = 0.5 * config.init.amplitude;
            state.w.comp[c][state.w.at(i, j, m[2])] = {a, 0.0};
            if (m[2] == 0) {
                const int i2 = (n - i) % n;
                const int j2 = (n - j) % n;
                state.w.comp[c][state.w.at(i2, j2, 0)] = {a, 0.0};
            }
            break;
        }
        case InitKind::random_field: {
            Workspace ws(n, config.L);
            uint64_t rng = config.init.seed;
            std::vector<double> noise(static_cast<std::size_t>(n) * n * n);
            for (int c = 0; c < 3; ++c) {
                for (auto& v : noise) v = normal_draw(rng);
                ws.fft.forward(noise, state.w.comp[c]);
            }
            const int half = n / 2 + 1;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k3 = 0; k3 < half; ++k3) {
                        const double mi = mode_of(n, i);
                        const double mj = mode_of(n, j);
                        const double mm =
                            std::sqrt(mi * mi + mj * mj + double(k3) * k3);
                        const double amp =
                            mm * std::exp(-mm * mm / (2.0 * config.init.k0 *
                                                      config.init.k0));
                        const std::size_t p = state.w.at(i, j, k3);
                        for (int c = 0; c < 3; ++c) state.w.comp[c][p] *= amp;
                    }
            leray_project(state.w);
            if (config.dealias) dealias_two_thirds(state.w);
            const double l3 = workspace_norm_q(ws, state.w, 3.0);
            if (!(l3 > 0.0))
                throw std::runtime_error("make_initial_state: degenerate random draw");
            const double scale = config.init.target_l3 / l3;
            for (int c = 0; c < 3; ++c)
                for (auto& z : state.w.comp[c]) z *= scale;
            break;
        }
    }
    if (config.dealias) dealias_two_thirds(state.w);
    leray_project(state.w);
    return state;
}

SpectralState linear_step(const SpectralState& state, const BackgroundField& bg,
                          double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("linear_step: dt must be positive");
    check_same_box(state.w, bg.spec, "linear_step");
    const double h = state.w.L / state.w.n;
    if (dt > cfl_limit(h, bg.sup_norm))
        throw CFLViolation("linear_step: dt " + std::to_string(dt) +
                           " exceeds advective limit " +
                           std::to_string(cfl_limit(h, bg.sup_norm)));
    Workspace ws(state.w.n, state.w.L);
    return step_once(ws, state, bg, dt, false, true);
}

SpectralState nonlinear_step(const SpectralState& state, const BackgroundField& bg,
                             double dt, bool dealias) {
    if (!(dt > 0.0))
        throw std::invalid_argument("nonlinear_step: dt must be positive");
    check_same_box(state.w, bg.spec, "nonlinear_step");
    Workspace ws(state.w.n, state.w.L);
    const double h = state.w.L / state.w.n;
    const double speed = bg.sup_norm + workspace_sup(ws, state.w);
    if (dt > cfl_limit(h, speed))
        throw CFLViolation("nonlinear_step: dt " + std::to_string(dt) +
                           " exceeds advective limit " +
                           std::to_string(cfl_limit(h, speed)));
    return step_once(ws, state, bg, dt, true, dealias);
}

NormSeries run_sim(const SimConfig& config) {
    config.validate();
    BackgroundField bg = make_background(config.background, config);
    SpectralState state = make_initial_state(config);
    Workspace ws(config.N, config.L);

    NormSeries series;
    series.q_list = config.q_list;
    NormSample s0 = make_sample(ws, state, bg, config.q_list);
    check_finite(s0);
    series.rows.push_back(std::move(s0));

    const double h = config.L / config.N;
    const long steps = std::lround(std::ceil(config.T / config.dt - 1e-9));
    for (long step = 0; step < steps; ++step) {
        const double speed = bg.sup_norm + workspace_sup(ws, state.w);
        if (config.dt > cfl_limit(h, speed))
            throw CFLViolation("run_sim: dt " + std::to_string(config.dt) +
                               " exceeds advective limit " +
                               std::to_string(cfl_limit(h, speed)) + " at t=" +
                               std::to_string(state.t));
        state = step_once(ws, state, bg, config.dt, true, config.dealias);
        if ((step + 1) % config.record_stride == 0 || step + 1 == steps) {
            NormSample s = make_sample(ws, state, bg, config.q_list);
            check_finite(s);
            series.rows.push_back(std::move(s));
        }
    }
    return series;
}

PicardReport picard_linear(const SpectralState& w0, const BackgroundField& bg,
                           const SimConfig& config, int iterations) {
    config.validate();
    if (iterations < 2)
        throw std::invalid_argument("picard_linear: need at least 2 iterates");
    check_same_box(w0.w, bg.spec, "picard_linear");
    const double h = w0.w.L / w0.w.n;
    if (config.dt > cfl_limit(h, bg.sup_norm))
        throw CFLViolation("picard_linear: dt exceeds advective limit");

    const int K = iterations;
    Workspace ws(w0.w.n, w0.w.L);
    std::vector<SpecField> a(K + 1);
    a[0] = make_field(w0.w.n, w0.w.L);
    for (int k = 1; k <= K; ++k) a[k] = w0.w;

    std::vector<double> D(K + 1, 0.0);
    auto record_diffs = [&](const std::vector<SpecField>& cur) {
        for (int k = 1; k <= K; ++k) {
            SpecField diff = cur[k];
            add_scaled(diff, cur[k - 1], -1.0);
            D[k] = std::max(D[k], workspace_norm_q(ws, diff, 3.0));
        }
    };
    record_diffs(a);

    const long steps = std::lround(std::ceil(config.T / config.dt - 1e-9));
    std::vector<SpecField> src_now(K), src_half(K), half(K + 1);
    for (long step = 0; step < steps; ++step) {
        for (int k = 0; k < K; ++k)
            eval_rhs(ws, a[k], bg, false, config.dealias, src_now[k]);
        half[0] = make_field(w0.w.n, w0.w.L);
        for (int k = 1; k <= K; ++k) {
            half[k] = a[k];
            add_scaled(half[k], src_now[k - 1], 0.5 * config.dt);
            apply_heat(half[k], 0.5 * config.dt);
        }
        for (int k = 0; k < K; ++k)
            eval_rhs(ws, half[k], bg, false, config.dealias, src_half[k]);
        for (int k = K; k >= 1; --k) {
            apply_heat(a[k], config.dt);
            apply_heat(src_half[k - 1], 0.5 * config.dt);
            add_scaled(a[k], src_half[k - 1], config.dt);
        }
        record_diffs(a);
    }

    PicardReport rep;
    rep.sup_diffs.assign(D.begin() + 1, D.end());
    for (int k = 1; k < K; ++k) {
        double ratio;
        if (D[k] > 0.0) ratio = D[k + 1] / D[k];
        else ratio = D[k + 1] > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
        rep.ratios.push_back(ratio);
    }
    int run = 0;
    for (double r : rep.ratios) {
        run = r > 1.0 ? run + 1 : 0;
        if (run >= 3)
            throw PicardDiverged("picard_linear: contraction ratio above 1 for 3 "
                                 "consecutive iterates");
    }
    return rep;
}

std::vector<SpecField> duhamel_bilinear(const std::vector<SpecField>& u,
                                        const std::vector<SpecField>& v, double dt,
                                        bool dealias) {
    if (u.empty() || u.size() != v.size())
        throw std::invalid_argument("duhamel_bilinear: mismatched trajectories");
    if (u.size() > kDuhamelCap)
        throw std::length_error("duhamel_bilinear: trajectory exceeds the 512-slice "
                                "memory budget");
    if (!(dt > 0.0)) throw std::invalid_argument("duhamel_bilinear: dt must be positive");
    const int n = u[0].n;
    const double L = u[0].L;
    for (std::size_t i = 0; i < u.size(); ++i) {
        check_same_box(u[i], u[0], "duhamel_bilinear");
        check_same_box(v[i], u[0], "duhamel_bilinear");
    }

    Workspace ws(n, L);
    const std::size_t real_size = static_cast<std::size_t>(n) * n * n;
    std::array<std::vector<double>, 3> ur, vr;
    for (auto& b : ur) b.assign(real_size, 0.0);
    for (auto& b : vr) b.assign(real_size, 0.0);
    const auto k = wavenumbers(n, L);
    const int half_n = n / 2 + 1;

    auto quad_term = [&](const SpecField& uf, const SpecField& vf) {
        for (int c = 0; c < 3; ++c) {
            ws.fft.backward(uf.comp[c], ur[c]);
            ws.fft.backward(vf.comp[c], vr[c]);
        }
        SpecField g = make_field(n, L);
        std::vector<double> prod(real_size);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                for (std::size_t p = 0; p < real_size; ++p)
                    prod[p] = ur[a][p] * vr[b][p];
                ws.fft.forward(prod, ws.tc);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        for (int k3 = 0; k3 < half_n; ++k3) {
                            const std::size_t p = g.at(i, j, k3);
                            const double kb = b == 0 ? k[i] : (b == 1 ? k[j] : k[k3]);
                            g.comp[a][p] -= std::complex<double>(0.0, kb) * ws.tc[p];
                        }
            }
        if (dealias) dealias_two_thirds(g);
        leray_project(g);
        return g;
    };

    std::vector<SpecField> out(u.size());
    out[0] = make_field(n, L);
    SpecField g_prev = quad_term(u[0], v[0]);
    SpecField acc = g_prev;
    for (auto& c : acc.comp)
        for (auto& z : c) z *= 0.5;
    for (std::size_t jrow = 1; jrow < u.size(); ++jrow) {
        // trapezoid accumulator: A_j = E(dt)(A_{j-1} + G_{j-1}/2) + G_j/2
        SpecField g_cur = quad_term(u[jrow], v[jrow]);
        add_scaled(acc, g_prev, 0.5);
        apply_heat(acc, dt);
        add_scaled(acc, g_cur, 0.5);
        out[jrow] = acc;
        for (auto& c : out[jrow].comp)
            for (auto& z : c) z *= dt;
        add_scaled(acc, g_cur, -0.5);
        g_prev = std::move(g_cur);
    }
    return out;
}

std::vector<SpecField> duhamel_rhs(const std::vector<SpecField>& w, double dt,
                                   bool dealias) {
    return duhamel_bilinear(w, w, dt, dealias);
}

EnergyReport energy_report(const NormSeries& series, const KReport& background_k) {
    EnergyReport rep;
    rep.k_reference = background_k.k_cone * background_k.k_cone +
                      background_k.k_outer * background_k.k_outer +
                      background_k.k_grad;
    const auto& rows = series.rows;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double ratio =
            rows[i].grad_l2sq > 0.0 ? std::abs(rows[i].cross) / rows[i].grad_l2sq : 0.0;
        rep.cross_ratios.push_back(ratio);
        rep.max_cross_ratio = std::max(rep.max_cross_ratio, ratio);
    }
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        const double dt = rows[i + 1].t - rows[i].t;
        if (!(dt > 0.0))
            throw std::invalid_argument("energy_report: non-increasing time stamps");
        const double e0 = 0.5 * rows[i].l2 * rows[i].l2;
        const double e1 = 0.5 * rows[i + 1].l2 * rows[i + 1].l2;
        const double defect = (e1 - e0) / dt +
                              0.5 * (rows[i].grad_l2sq + rows[i + 1].grad_l2sq) +
                              0.5 * (rows[i].cross + rows[i + 1].cross);
        rep.defects.push_back(defect);
        rep.max_abs_defect = std::max(rep.max_abs_defect, std::abs(defect));
    }
    return rep;
}

void save_checkpoint(const SpectralState& state, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("checkpoint: cannot open " + path);
    write_raw(out, kCkptMagic, sizeof(kCkptMagic));
    const std::uint32_t version = kCkptVersion;
    const std::uint32_t n = static_cast<std::uint32_t>(state.w.n);
    write_raw(out, &version, sizeof(version));
    write_raw(out, &n, sizeof(n));
    write_raw(out, &state.w.L, sizeof(double));
    write_raw(out, &state.t, sizeof(double));
    for (int c = 0; c < 3; ++c)
        write_raw(out, state.w.comp[c].data(),
                  state.w.comp[c].size() * sizeof(std::complex<double>));
    if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

SpectralState load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
    char magic[8];
    read_raw(in, magic, sizeof(magic));
    if (std::memcmp(magic, kCkptMagic, sizeof(magic)) != 0)
        throw std::runtime_error("checkpoint: bad magic in " + path);
    std::uint32_t version = 0, n = 0;
    read_raw(in, &version, sizeof(version));
    if (version != kCkptVersion)
        throw std::runtime_error("checkpoint: unsupported version " +
                                 std::to_string(version));
    read_raw(in, &n, sizeof(n));
    if (n < 4 || n > 4096 || (n & (n - 1)) != 0)
        throw std::runtime_error("checkpoint: implausible grid size " +
                                 std::to_string(n));
    SpectralState state;
    double L = 0.0;
    read_raw(in, &L, sizeof(L));
    read_raw(in, &state.t, sizeof(state.t));
    if (!(L > 0.0)) throw std::runtime_error("checkpoint: invalid box size");
    state.w = make_field(static_cast<int>(n), L);
    for (int c = 0; c < 3; ++c)
        read_raw(in, state.w.comp[c].data(),
                 state.w.comp[c].size() * sizeof(std::complex<double>));
    return state;
}

}  // namespace homflow
