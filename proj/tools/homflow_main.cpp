// Command-line front end: every subcommand resolves its configuration to a
// flat key=value map, writes a manifest up front, then computes and emits
// machine-readable outputs. Replaying a manifest reruns the stored map, which
// reproduces the CSV outputs byte for byte on the same build.

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "homflow/config.hpp"
#include "homflow/decay.hpp"
#include "homflow/field.hpp"
#include "homflow/functionals.hpp"
#include "homflow/inequality.hpp"
#include "homflow/profile.hpp"
#include "homflow/spectral.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kManifestSchema = 1;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string now_utc() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string resolve_out_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("HOMFLOW_OUT"); env != nullptr && *env != '\0')
        return env;
    return ".";
}

void write_manifest(const std::string& subcommand, const homflow::ConfigMap& cfg,
                    unsigned long long seed, const std::vector<std::string>& outputs,
                    const fs::path& dir) {
    json m;
    m["schema"] = kManifestSchema;
    m["tool"] = "homflow";
    m["version"] = kVersion;
    m["subcommand"] = subcommand;
    m["seed"] = seed;
    m["created_utc"] = now_utc();
    m["out_dir"] = dir.string();
    m["outputs"] = outputs;
    json cfgj = json::object();
    for (const auto& [k, v] : cfg.items()) cfgj[k] = v;
    m["config"] = cfgj;
    const fs::path path = dir / (subcommand + "_manifest.json");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write manifest " + path.string());
    out << m.dump(2) << "\n";
}

std::ofstream open_csv(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void apply_overrides(homflow::ConfigMap& cfg, const std::vector<std::string>& sets) {
    for (const std::string& s : sets) {
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos || eq == 0)
            throw homflow::ConfigError("--set expects key=value, got '" + s + "'");
        cfg.set(s.substr(0, eq), s.substr(eq + 1));
    }
}

// ---------------------------------------------------------------- classify

int run_classify(const homflow::ConfigMap& in, const fs::path& dir) {
    const double c1 = in.get_double("classify.c1", 0.0);
    const double c2 = in.get_double("classify.c2", 0.0);
    const double c3 = in.get_double("classify.c3", 0.0);
    const double tol = in.get_double("classify.tol", 1e-8);
    if (!(tol > 0.0)) throw homflow::ConfigError("classify: tol must be positive");

    homflow::ConfigMap cfg;
    cfg.set("classify.c1", fmt17(c1));
    cfg.set("classify.c2", fmt17(c2));
    cfg.set("classify.c3", fmt17(c3));
    cfg.set("classify.tol", fmt17(tol));
    write_manifest("classify", cfg, 0, {"classify.csv"}, dir);

    // c1 or c2 below -1 puts the triple outside the admissible wedge before
    // the c3 threshold even applies
    const bool domain_ok = c1 >= -1.0 && c2 >= -1.0;
    const double bar = domain_ok ? homflow::cbar3(c1, c2)
                                 : std::numeric_limits<double>::quiet_NaN();
    const bool in_j = domain_ok && c3 > bar;
    std::string gm = "nan", gp = "nan";
    if (in_j) {
        const homflow::GammaRange r = homflow::gamma_range(c1, c2, c3, tol);
        gm = fmt17(r.gamma_minus);
        gp = fmt17(r.gamma_plus);
    }

    auto out = open_csv(dir / "classify.csv");
    out << "c1,c2,c3,cbar3,verdict,gamma_minus,gamma_plus,tol\n";
    out << fmt17(c1) << ',' << fmt17(c2) << ',' << fmt17(c3) << ',' << fmt17(bar)
        << ',' << (in_j ? "in_J" : "outside_J") << ',' << gm << ',' << gp << ','
        << fmt17(tol) << "\n";

    std::cout << "cbar3 = " << fmt17(bar) << "\n"
              << "verdict = " << (in_j ? "in_J" : "outside_J") << "\n";
    if (in_j)
        std::cout << "gamma_minus = " << gm << "\n"
                  << "gamma_plus = " << gp << "\n"
                  << "tol = " << fmt17(tol) << "\n";
    return 0;
}

// ----------------------------------------------------------------- profile

int run_profile(const homflow::ConfigMap& in, const fs::path& dir) {
    homflow::HomParams p;
    p.c1 = in.get_double("profile.c1", 0.0);
    p.c2 = in.get_double("profile.c2", 0.0);
    p.c3 = in.get_double("profile.c3", 0.0);
    p.gamma = in.get_double("profile.gamma", 0.0);
    const double tol = in.get_double("profile.tol", 1e-8);
    const int n = in.get_int("profile.n", 2400);
    if (!(tol > 0.0) || n < 8)
        throw homflow::ConfigError("profile: need tol > 0 and n >= 8");

    homflow::ConfigMap cfg;
    cfg.set("profile.c1", fmt17(p.c1));
    cfg.set("profile.c2", fmt17(p.c2));
    cfg.set("profile.c3", fmt17(p.c3));
    cfg.set("profile.gamma", fmt17(p.gamma));
    cfg.set("profile.tol", fmt17(tol));
    cfg.set("profile.n", std::to_string(n));
    write_manifest("profile", cfg, 0, {"profile.csv"}, dir);

    const homflow::ThetaProfile prof =
        homflow::solve_profile(p, homflow::GridSpec{n}, tol);
    auto out = open_csv(dir / "profile.csv");
    out << "y,u,du\n";
    out << "-1," << fmt17(prof.endpoint_minus) << ",nan\n";
    for (std::size_t i = 0; i < prof.nodes.size(); ++i)
        out << fmt17(prof.nodes[i]) << ',' << fmt17(prof.u_values[i]) << ','
            << fmt17(prof.du_values[i]) << "\n";
    out << "1," << fmt17(prof.endpoint_plus) << ",nan\n";

    std::cout << "nodes = " << prof.nodes.size() << "\n"
              << "endpoint_minus = " << fmt17(prof.endpoint_minus) << "\n"
              << "endpoint_plus = " << fmt17(prof.endpoint_plus) << "\n"
              << "max_residual = " << fmt17(prof.max_residual) << "\n"
              << "ode_residual = " << fmt17(homflow::ode_residual(prof)) << "\n";
    return 0;
}

// ------------------------------------------------------------------- field

int run_field(const homflow::ConfigMap& in, const fs::path& dir) {
    homflow::HomParams p;
    p.c1 = in.get_double("field.c1", 0.0);
    p.c2 = in.get_double("field.c2", 0.0);
    p.c3 = in.get_double("field.c3", 0.0);
    p.gamma = in.get_double("field.gamma", 0.0);
    const double r = in.get_double("field.r", 1.0);
    const int count = in.get_int("field.count", 64);
    if (!(r > 0.0) || count < 1)
        throw homflow::ConfigError("field: need r > 0 and count >= 1");

    homflow::ConfigMap cfg;
    cfg.set("field.c1", fmt17(p.c1));
    cfg.set("field.c2", fmt17(p.c2));
    cfg.set("field.c3", fmt17(p.c3));
    cfg.set("field.gamma", fmt17(p.gamma));
    cfg.set("field.r", fmt17(r));
    cfg.set("field.count", std::to_string(count));
    write_manifest("field", cfg, 0, {"field.csv"}, dir);

    const homflow::VelocityField field(
        homflow::solve_profile(p, homflow::GridSpec{}, 1e-8));
    auto out = open_csv(dir / "field.csv");
    out << "theta,x1,x2,x3,u1,u2,u3,p\n";
    for (int i = 0; i < count; ++i) {
        const double theta = 3.14159265358979324 * (i + 0.5) / count;
        const homflow::Vec3 x{r * std::sin(theta), 0.0, r * std::cos(theta)};
        const homflow::Vec3 u = homflow::eval_velocity(field, x);
        const double pr = homflow::eval_pressure(field, x);
        out << fmt17(theta) << ',' << fmt17(x[0]) << ',' << fmt17(x[1]) << ','
            << fmt17(x[2]) << ',' << fmt17(u[0]) << ',' << fmt17(u[1]) << ','
            << fmt17(u[2]) << ',' << fmt17(pr) << "\n";
    }
    std::cout << "rows = " << count << "\n";
    return 0;
}

// --------------------------------------------------------------- constants

int run_constants(const homflow::ConfigMap& in, const fs::path& dir) {
    const double q = in.get_double("constants.q", 6.0);
    const double tau = in.get_double("constants.tau", 0.5);

    homflow::ConfigMap cfg;
    cfg.set("constants.q", fmt17(q));
    cfg.set("constants.tau", fmt17(tau));
    write_manifest("constants", cfg, 0, {"constants.csv"}, dir);

    const homflow::DecayBound bound = homflow::decay_bound(q, tau);
    const double quad = homflow::constant_via_quadrature(q, tau);
    auto out = open_csv(dir / "constants.csv");
    out << "q,tau,c_q,exponent,quadrature,abs_diff\n";
    out << fmt17(q) << ',' << fmt17(tau) << ',' << fmt17(bound.c_q) << ','
        << fmt17(bound.exponent) << ',' << fmt17(quad) << ','
        << fmt17(std::abs(bound.c_q - quad)) << "\n";
    std::cout << "c_q = " << fmt17(bound.c_q) << "\n"
              << "exponent = " << fmt17(bound.exponent) << "\n"
              << "quadrature = " << fmt17(quad) << "\n";
    return 0;
}

// ------------------------------------------------------------------ verify

int run_verify(const homflow::ConfigMap& in, const fs::path& dir) {
    const std::string suite = in.get("verify.suite", "ckn-corollary");
    const double alpha = in.get_double("verify.alpha", 0.5);
    const auto seed =
        static_cast<unsigned long long>(in.get_int("verify.seed", 1));
    const int samples = in.get_int("verify.samples", 25);
    if (samples < 1) throw homflow::ConfigError("verify: samples must be >= 1");

    homflow::ConfigMap cfg;
    cfg.set("verify.suite", suite);
    cfg.set("verify.alpha", fmt17(alpha));
    cfg.set("verify.seed", std::to_string(seed));
    cfg.set("verify.samples", std::to_string(samples));
    write_manifest("verify", cfg, seed, {"verify.csv"}, dir);

    auto out = open_csv(dir / "verify.csv");
    out << "name,value\n";
    bool pass = true;
    if (suite == "ckn-corollary") {
        const homflow::CknSpec spec = homflow::axis_hardy_spec(alpha);
        const homflow::ConditionReport rep = homflow::ckn_conditions(spec);
        out << "measure_ok," << rep.measure_ok << "\n"
            << "balance_ok," << rep.balance_ok << "\n"
            << "beta_ok," << rep.beta_ok << "\n"
            << "alpha_beta_ok," << rep.alpha_beta_ok << "\n"
            << "axis_ok," << rep.axis_ok << "\n"
            << "endpoint_ok," << rep.endpoint_ok << "\n"
            << "overall," << rep.overall << "\n";
        pass = rep.overall;
    } else if (suite == "log-sobolev") {
        const auto family = homflow::gaussian_family(seed, samples);
        double min_margin = std::numeric_limits<double>::infinity();
        for (const auto& f : family)
            min_margin = std::min(
                min_margin,
                homflow::log_sobolev_check(f, {0.25, 1.0, 4.0, 16.0}));
        out << "min_margin," << fmt17(min_margin) << "\n";
        pass = min_margin >= -1e-8;
    } else if (suite == "riesz") {
        for (double p : {1.5, 2.0, 3.0, 6.0})
            out << "H_" << p << ',' << fmt17(homflow::riesz_constant(p)) << "\n";
    } else {
        throw homflow::ConfigError("verify: unknown suite '" + suite + "'");
    }
    std::cout << "suite = " << suite << "\n"
              << "verdict = " << (pass ? "pass" : "fail") << "\n";
    return 0;
}

// ---------------------------------------------------------------- simulate

homflow::SimConfig sim_from_map(const homflow::ConfigMap& in) {
    homflow::SimConfig sim;
    sim.L = in.get_double("sim.L", sim.L);
    sim.N = in.get_int("sim.N", sim.N);
    sim.dt = in.get_double("sim.dt", sim.dt);
    sim.T = in.get_double("sim.T", sim.T);
    sim.rho_m = in.get_double("sim.rho_m", sim.rho_m);
    sim.R_c = in.get_double("sim.R_c", sim.R_c);
    sim.dealias = in.get_bool("sim.dealias", sim.dealias);
    sim.record_stride = in.get_int("sim.record_stride", sim.record_stride);
    {
        std::istringstream qs(in.get("sim.q_list", "6"));
        sim.q_list.clear();
        std::string tok;
        while (std::getline(qs, tok, ','))
            if (!tok.empty()) sim.q_list.push_back(std::strtod(tok.c_str(), nullptr));
    }
    sim.background.c1 = in.get_double("background.c1", 0.0);
    sim.background.c2 = in.get_double("background.c2", 0.0);
    sim.background.c3 = in.get_double("background.c3", 0.0);
    sim.background.gamma = in.get_double("background.gamma", 0.0);

    const std::string kind = in.get("init.kind", "zero");
    if (kind == "zero") sim.init.kind = homflow::InitKind::zero;
    else if (kind == "random") sim.init.kind = homflow::InitKind::random_field;
    else if (kind == "single_mode") sim.init.kind = homflow::InitKind::single_mode;
    else throw homflow::ConfigError("simulate: unknown init.kind '" + kind + "'");
    sim.init.seed = static_cast<unsigned long long>(in.get_int("init.seed", 1));
    sim.init.target_l3 = in.get_double("init.target_l3", 0.0);
    sim.init.k0 = in.get_double("init.k0", 3.0);
    sim.init.mode = {in.get_int("init.mode1", 1), in.get_int("init.mode2", 0),
                     in.get_int("init.mode3", 0)};
    sim.init.component = in.get_int("init.component", 1);
    sim.init.amplitude = in.get_double("init.amplitude", 1.0);
    return sim;
}

homflow::ConfigMap sim_to_map(const homflow::SimConfig& sim) {
    homflow::ConfigMap cfg;
    cfg.set("sim.L", fmt17(sim.L));
    cfg.set("sim.N", std::to_string(sim.N));
    cfg.set("sim.dt", fmt17(sim.dt));
    cfg.set("sim.T", fmt17(sim.T));
    cfg.set("sim.rho_m", fmt17(sim.rho_m));
    cfg.set("sim.R_c", fmt17(sim.R_c));
    cfg.set("sim.dealias", sim.dealias ? "true" : "false");
    cfg.set("sim.record_stride", std::to_string(sim.record_stride));
    std::string qs;
    for (double q : sim.q_list) {
        if (!qs.empty()) qs += ',';
        qs += fmt17(q);
    }
    cfg.set("sim.q_list", qs);
    cfg.set("background.c1", fmt17(sim.background.c1));
    cfg.set("background.c2", fmt17(sim.background.c2));
    cfg.set("background.c3", fmt17(sim.background.c3));
    cfg.set("background.gamma", fmt17(sim.background.gamma));
    const char* kind = sim.init.kind == homflow::InitKind::zero ? "zero"
                       : sim.init.kind == homflow::InitKind::random_field
                           ? "random"
                           : "single_mode";
    cfg.set("init.kind", kind);
    cfg.set("init.seed", std::to_string(sim.init.seed));
    cfg.set("init.target_l3", fmt17(sim.init.target_l3));
    cfg.set("init.k0", fmt17(sim.init.k0));
    cfg.set("init.mode1", std::to_string(sim.init.mode[0]));
    cfg.set("init.mode2", std::to_string(sim.init.mode[1]));
    cfg.set("init.mode3", std::to_string(sim.init.mode[2]));
    cfg.set("init.component", std::to_string(sim.init.component));
    cfg.set("init.amplitude", fmt17(sim.init.amplitude));
    return cfg;
}

void write_series_csv(const homflow::NormSeries& series, const fs::path& path) {
    auto out = open_csv(path);
    out << "t,l2,l3,grad_l2sq,cross";
    for (double q : series.q_list) {
        char name[24];
        std::snprintf(name, sizeof(name), ",l%g", q);
        out << name;
    }
    out << "\n";
    for (const auto& row : series.rows) {
        out << fmt17(row.t) << ',' << fmt17(row.l2) << ',' << fmt17(row.l3) << ','
            << fmt17(row.grad_l2sq) << ',' << fmt17(row.cross);
        for (double v : row.lq) out << ',' << fmt17(v);
        out << "\n";
    }
}

int run_simulate(const homflow::ConfigMap& in, const fs::path& dir) {
    const homflow::SimConfig sim = sim_from_map(in);
    sim.validate();
    homflow::ConfigMap cfg = sim_to_map(sim);
    const std::string ckpt = in.get("output.checkpoint", "");
    if (!ckpt.empty()) cfg.set("output.checkpoint", ckpt);

    std::vector<std::string> outputs{"series.csv"};
    if (!ckpt.empty()) outputs.push_back(ckpt);
    write_manifest("simulate", cfg, sim.init.seed, outputs, dir);

    const homflow::BackgroundField bg =
        homflow::make_background(sim.background, sim);
    const homflow::NormSeries series = homflow::run_sim(sim);
    write_series_csv(series, dir / "series.csv");

    if (!ckpt.empty()) {
        // rebuild the final state so the checkpoint matches the series tail
        homflow::SpectralState state = homflow::make_initial_state(sim);
        const long steps = std::lround(std::ceil(sim.T / sim.dt - 1e-9));
        for (long i = 0; i < steps; ++i)
            state = homflow::nonlinear_step(state, bg, sim.dt, sim.dealias);
        homflow::save_checkpoint(state, (dir / ckpt).string());
    }

    const homflow::EnergyReport rep =
        homflow::energy_report(series, bg.k_mollified);
    std::cout << "rows = " << series.rows.size() << "\n"
              << "final_l2 = " << fmt17(series.rows.back().l2) << "\n"
              << "final_l3 = " << fmt17(series.rows.back().l3) << "\n"
              << "max_abs_defect = " << fmt17(rep.max_abs_defect) << "\n"
              << "max_cross_ratio = " << fmt17(rep.max_cross_ratio) << "\n"
              << "k_reference = " << fmt17(rep.k_reference) << "\n";
    return 0;
}

// ------------------------------------------------------------------- sweep

int run_sweep(const homflow::ConfigMap& in, const fs::path& dir) {
    const std::string param = in.get("sweep.param", "");
    const std::string values = in.get("sweep.values", "");
    if (param.empty() || values.empty())
        throw homflow::ConfigError("sweep: need sweep.param and sweep.values");

    homflow::ConfigMap cfg = in;
    write_manifest("sweep", cfg, 0, {}, dir);

    std::istringstream vs(values);
    std::string tok;
    int idx = 0;
    while (std::getline(vs, tok, ',')) {
        if (tok.empty()) continue;
        homflow::ConfigMap sub = in;
        sub.set(param, tok);
        const fs::path subdir = dir / ("run_" + std::to_string(idx));
        fs::create_directories(subdir);
        std::cout << "[sweep " << idx << "] " << param << " = " << tok << "\n";
        run_simulate(sub, subdir);
        ++idx;
    }
    std::cout << "runs = " << idx << "\n";
    return 0;
}

// ------------------------------------------------------------------ replay

int dispatch(const std::string& name, const homflow::ConfigMap& cfg,
             const fs::path& dir);

int run_replay(const std::string& manifest_path, const fs::path& dir) {
    std::ifstream in(manifest_path);
    if (!in) throw homflow::ConfigError("replay: cannot open " + manifest_path);
    json m;
    try {
        in >> m;
    } catch (const json::exception& e) {
        throw homflow::ConfigError(std::string("replay: bad manifest: ") + e.what());
    }
    if (!m.contains("subcommand") || !m.contains("config"))
        throw homflow::ConfigError("replay: manifest missing subcommand/config");
    if (m.value("schema", 0) != kManifestSchema)
        throw homflow::ConfigError("replay: unsupported manifest schema");
    homflow::ConfigMap cfg;
    for (const auto& [k, v] : m["config"].items())
        cfg.set(k, v.get<std::string>());
    return dispatch(m["subcommand"].get<std::string>(), cfg, dir);
}

int dispatch(const std::string& name, const homflow::ConfigMap& cfg,
             const fs::path& dir) {
    if (name == "classify") return run_classify(cfg, dir);
    if (name == "profile") return run_profile(cfg, dir);
    if (name == "field") return run_field(cfg, dir);
    if (name == "constants") return run_constants(cfg, dir);
    if (name == "verify") return run_verify(cfg, dir);
    if (name == "simulate") return run_simulate(cfg, dir);
    if (name == "sweep") return run_sweep(cfg, dir);
    throw homflow::ConfigError("unknown subcommand '" + name + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"homflow: stationary homogeneous flow profiles, functional "
                 "inequalities, and perturbation simulation"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string out_flag;
    std::string config_file;
    std::vector<std::string> sets;
    std::vector<double> cvals;
    double gamma = 0.0, tol = 1e-8, q = 6.0, tau = 0.5, r = 1.0, alpha = 0.5;
    int n = 2400, count = 64, samples = 25;
    unsigned long long seed = 1;
    std::string suite = "ckn-corollary", param, values, manifest, checkpoint;

    auto* c_classify = app.add_subcommand("classify", "parameter admissibility");
    c_classify->add_option("--c", cvals, "c1 c2 c3")->expected(3)->required();
    c_classify->add_option("--tol", tol, "bisection tolerance");

    auto* c_profile = app.add_subcommand("profile", "solve the angular profile");
    c_profile->add_option("--c", cvals, "c1 c2 c3")->expected(3)->required();
    c_profile->add_option("--gamma", gamma, "U(0)")->required();
    c_profile->add_option("--tol", tol, "solver tolerance");
    c_profile->add_option("--n", n, "grid subintervals");

    auto* c_field = app.add_subcommand("field", "sample velocity and pressure");
    c_field->add_option("--c", cvals, "c1 c2 c3")->expected(3)->required();
    c_field->add_option("--gamma", gamma, "U(0)")->required();
    c_field->add_option("--r", r, "sampling radius");
    c_field->add_option("--count", count, "points on the meridian");

    auto* c_constants = app.add_subcommand("constants", "decay constants");
    c_constants->add_option("--q", q, "norm index, q > 3")->required();
    c_constants->add_option("--tau", tau, "time parameter in (0,1)")->required();

    auto* c_verify = app.add_subcommand("verify", "inequality spot checks");
    c_verify->add_option("--suite", suite, "ckn-corollary|log-sobolev|riesz");
    c_verify->add_option("--alpha", alpha, "axis weight exponent");
    c_verify->add_option("--seed", seed, "sampling seed");
    c_verify->add_option("--samples", samples, "sample count");

    auto* c_sim = app.add_subcommand("simulate", "perturbation run");
    c_sim->add_option("--config", config_file, "key=value config file");
    c_sim->add_option("--set", sets, "override key=value");
    c_sim->add_option("--checkpoint", checkpoint, "final-state checkpoint filename");

    auto* c_sweep = app.add_subcommand("sweep", "one-parameter family of runs");
    c_sweep->add_option("--config", config_file, "key=value config file");
    c_sweep->add_option("--set", sets, "override key=value");
    c_sweep->add_option("--param", param, "config key to vary")->required();
    c_sweep->add_option("--values", values, "comma-separated values")->required();

    auto* c_replay = app.add_subcommand("replay", "rerun a stored manifest");
    c_replay->add_option("manifest", manifest, "path to *_manifest.json")
        ->required();

    for (CLI::App* sub : app.get_subcommands(nullptr))
        sub->add_option("--out", out_flag,
                        "output directory (default: $HOMFLOW_OUT or '.')");

    try {
        app.parse(argc, argv);

        const fs::path dir = resolve_out_dir(out_flag);
        fs::create_directories(dir);

        homflow::ConfigMap cfg;
        if (!config_file.empty()) cfg = homflow::ConfigMap::from_file(config_file);
        apply_overrides(cfg, sets);

        if (app.got_subcommand(c_classify)) {
            cfg.set("classify.c1", fmt17(cvals[0]));
            cfg.set("classify.c2", fmt17(cvals[1]));
            cfg.set("classify.c3", fmt17(cvals[2]));
            cfg.set("classify.tol", fmt17(tol));
            return run_classify(cfg, dir);
        }
        if (app.got_subcommand(c_profile)) {
            cfg.set("profile.c1", fmt17(cvals[0]));
            cfg.set("profile.c2", fmt17(cvals[1]));
            cfg.set("profile.c3", fmt17(cvals[2]));
            cfg.set("profile.gamma", fmt17(gamma));
            cfg.set("profile.tol", fmt17(tol));
            cfg.set("profile.n", std::to_string(n));
            return run_profile(cfg, dir);
        }
        if (app.got_subcommand(c_field)) {
            cfg.set("field.c1", fmt17(cvals[0]));
            cfg.set("field.c2", fmt17(cvals[1]));
            cfg.set("field.c3", fmt17(cvals[2]));
            cfg.set("field.gamma", fmt17(gamma));
            cfg.set("field.r", fmt17(r));
            cfg.set("field.count", std::to_string(count));
            return run_field(cfg, dir);
        }
        if (app.got_subcommand(c_constants)) {
            cfg.set("constants.q", fmt17(q));
            cfg.set("constants.tau", fmt17(tau));
            return run_constants(cfg, dir);
        }
        if (app.got_subcommand(c_verify)) {
            cfg.set("verify.suite", suite);
            cfg.set("verify.alpha", fmt17(alpha));
            cfg.set("verify.seed", std::to_string(seed));
            cfg.set("verify.samples", std::to_string(samples));
            return run_verify(cfg, dir);
        }
        if (app.got_subcommand(c_sim)) {
            if (!checkpoint.empty()) cfg.set("output.checkpoint", checkpoint);
            return run_simulate(cfg, dir);
        }
        if (app.got_subcommand(c_sweep)) {
            cfg.set("sweep.param", param);
            cfg.set("sweep.values", values);
            return run_sweep(cfg, dir);
        }
        if (app.got_subcommand(c_replay)) return run_replay(manifest, dir);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const homflow::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::logic_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}
