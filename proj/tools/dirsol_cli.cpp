// dirsol: command-line surface for the coupled Dirac/particle simulator.
//
// Exit codes: 0 success, 2 validation error, 3 numerical abort, 4 acceptance-check failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "dirsol/linearized_spectral.hpp"
#include "dirsol/run_io.hpp"

using namespace dirsol;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kNumerical = 3;
constexpr int kCheckFailed = 4;

struct Globals {
    std::string config;
    std::string out;
    std::optional<int> threads;
    std::optional<std::uint64_t> seed;
};

// Per-run overrides shared by the evolution subcommands.
struct Overrides {
    std::optional<std::string> v, b;
    std::optional<double> T, dt, epsilon, L;
    std::optional<int> N;

    void attach(CLI::App* sub) {
        sub->add_option("--v", v, "velocity \"x,y,z\"");
        sub->add_option("--b", b, "initial position \"x,y,z\"");
        sub->add_option("--T", T, "final time");
        sub->add_option("--dt", dt, "time step");
        sub->add_option("--epsilon", epsilon, "perturbation size");
        sub->add_option("--L", L, "box length");
        sub->add_option("--N", N, "points per axis");
    }
};

Vec3 parse_vec(const std::string& s) {
    std::string t = s;
    for (char& c : t)
        if (c == ',') c = ' ';
    std::istringstream is(t);
    Vec3 v;
    if (!(is >> v[0] >> v[1] >> v[2])) throw std::invalid_argument("expected \"x,y,z\", got '" + s + "'");
    return v;
}

RunConfig assemble(ExperimentKind kind, const Globals& g, const Overrides& o) {
    RunConfig c;
    c.kind = kind;
    switch (kind) {
        case ExperimentKind::Decay: c.T = c.fit_t_max; break;
        case ExperimentKind::Scatter:
            c.v = Vec3(0.3, 0, 0);
            c.T = 30.0;
            break;
        case ExperimentKind::Soliton:
            c.v = Vec3(0.3, 0, 0);
            c.epsilon = 0.0;
            break;
        case ExperimentKind::Simulate: c.epsilon = 0.0; break;
    }
    if (!g.config.empty()) c = load_config(g.config, c);
    c.kind = kind;
    if (g.threads) c.threads = *g.threads;
    if (g.seed) c.seed = *g.seed;
    if (o.v) c.v = parse_vec(*o.v);
    if (o.b) c.b = parse_vec(*o.b);
    if (o.T) c.T = *o.T;
    if (o.dt) c.dt = *o.dt;
    if (o.epsilon) c.epsilon = *o.epsilon;
    if (o.L) c.grid.L = *o.L;
    if (o.N) c.grid.N = *o.N;
    c.out_dir = g.out.empty() ? "runs/" + to_string(kind) : g.out;
    c.validate();
    set_threads(c.threads);
    return c;
}

nlohmann::json fit_json(const FitResult& f) {
    return {{"exponent", f.exponent}, {"intercept", f.intercept}, {"t_min", f.t_min},
            {"t_max", f.t_max},       {"rms_residual", f.rms_residual}, {"samples", f.samples}};
}

nlohmann::json vec_json(const Vec3& v) { return {v[0], v[1], v[2]}; }

int cmd_simulate(const RunConfig& c, double snapshot_stride) {
    SimulationConfig sc;
    sc.grid = c.grid;
    sc.rho = c.rho;
    sc.dt = c.dt;
    sc.T = c.T;
    sc.tracking.stride = c.track_stride;
    sc.tracking.nu = c.nu;
    sc.snapshot_stride = snapshot_stride;
    const PhaseState Y0 = perturbed_soliton(c);
    const double H0 = hamiltonian(Y0, c.rho);
    const Trajectory tr = simulate(Y0, sc);
    const fs::path dir = c.out_dir;
    fs::create_directories(dir);
    write_particle_csv(dir / "particle.csv", tr);
    write_modulation_csv(dir / "modulation.csv", tr);
    for (std::size_t i = 0; i < tr.snapshots.size(); ++i)
        write_snapshot(dir / "snapshots", "snap_" + std::to_string(i), tr.snapshots[i].first, tr.snapshots[i].second);
    nlohmann::json res = {{"energy_initial", H0},
                          {"energy_final", hamiltonian(tr.final_state, c.rho)},
                          {"q_final", vec_json(tr.final_state.q)},
                          {"p_final", vec_json(tr.final_state.p)},
                          {"snapshots", tr.snapshots.size()}};
    if (tr.tracking_lost_at) res["tracking_lost_at"] = *tr.tracking_lost_at;
    write_manifest(dir, c, res);
    std::cout << res.dump(2) << '\n';
    return kOk;
}

int cmd_soliton(const RunConfig& c) {
    const PersistenceReport r = run_soliton_persistence(c);
    const fs::path dir = c.out_dir;
    fs::create_directories(dir);
    write_particle_csv(dir / "particle.csv", r.trajectory);
    write_modulation_csv(dir / "modulation.csv", r.trajectory);
    {
        std::ofstream os(dir / "persistence.csv");
        os << "t,field_error,velocity_error\n" << std::setprecision(17);
        for (std::size_t i = 0; i < r.times.size(); ++i)
            os << r.times[i] << ',' << r.field_error[i] << ',' << r.velocity_error[i] << '\n';
    }
    const bool ok = r.final_velocity_error <= 1e-4;
    nlohmann::json res = {{"max_field_error", r.max_field_error},
                          {"max_velocity_error", r.max_velocity_error},
                          {"final_velocity_error", r.final_velocity_error},
                          {"max_z_norm", r.max_z_norm},
                          {"velocity_check", ok}};
    write_manifest(dir, c, res);
    std::cout << res.dump(2) << '\n';
    return ok ? kOk : kCheckFailed;
}

int cmd_decay(const RunConfig& c) {
    const DecayReport r = run_free_decay(c);
    const fs::path dir = c.out_dir;
    fs::create_directories(dir);
    write_decay_csv(dir / "decay.csv", r);
    const bool ok = decay_exponent_ok(r.fit);
    nlohmann::json res = {{"fit", fit_json(r.fit)}, {"validity_time", c.validity_time()}, {"exponent_check", ok}};
    write_manifest(dir, c, res);
    std::cout << res.dump(2) << '\n';
    return ok ? kOk : kCheckFailed;
}

int cmd_scatter(const RunConfig& c) {
    const ScatterReport r = run_scattering(c);
    const fs::path dir = c.out_dir;
    fs::create_directories(dir);
    write_particle_csv(dir / "particle.csv", r.trajectory);
    write_modulation_csv(dir / "modulation.csv", r.trajectory);
    const bool ok = scattering_ok(r);
    nlohmann::json res = {{"captured", r.captured},
                          {"v_plus", vec_json(r.v_plus)},
                          {"a_plus", vec_json(r.a_plus)},
                          {"fit_t_max", r.fit_t_max},
                          {"velocity_deviation_by_quarter", r.velocity_deviation},
                          {"cauchy_half", r.cauchy_half},
                          {"cauchy_full", r.cauchy_full},
                          {"remainder", r.remainder},
                          {"scattering_check", ok}};
    if (r.z_fit) res["z_fit"] = fit_json(*r.z_fit);
    if (r.tracking_lost_at) res["tracking_lost_at"] = *r.tracking_lost_at;
    write_manifest(dir, c, res);
    std::cout << res.dump(2) << '\n';
    return ok ? kOk : kCheckFailed;
}

int cmd_project(const RunConfig& c, const std::string& state, const std::optional<std::string>& guess_v) {
    const PhaseState Y = load_snapshot(state);
    SolitonParams guess = guess_from_state(Y);
    if (guess_v) guess.v = parse_vec(*guess_v);
    const ProjectionResult pr = project_to_manifold(Y, guess, c.rho);
    nlohmann::json res = {{"b", vec_json(pr.sigma.b)},
                          {"v", vec_json(pr.sigma.v)},
                          {"iterations", pr.iterations},
                          {"residuals", std::vector<double>(pr.residuals.data(), pr.residuals.data() + 6)},
                          {"history", pr.history},
                          {"z_norm", transversal_norm(pr.Z, pr.sigma.b, c.nu)}};
    const fs::path dir = c.out_dir;
    fs::create_directories(dir);
    write_json(dir / "projection.json", res);
    std::cout << res.dump(2) << '\n';
    return kOk;
}

int cmd_spectral(const RunConfig& c, const std::string& vs, double w0, double w1, int nodes) {
    const Vec3 v = parse_vec(vs);
    require_frame(v);
    if (nodes < 2 || !(w1 > w0)) throw std::invalid_argument("spectral: need --nodes >= 2 and an increasing omega range");
    const fs::path dir = c.out_dir;
    fs::create_directories(dir);
    std::ofstream os(dir / "spectral.csv");
    os << "omega,det_re,det_im,det_abs,det_factorized_re,det_factorized_im,F11_re,F11_im,F22_re,F22_im,F33_re,F33_im\n"
       << std::setprecision(17);
    double min_abs = std::numeric_limits<double>::infinity();
    for (int i = 0; i < nodes; ++i) {
        const double w = w0 + (w1 - w0) * i / (nodes - 1);
        const cplx d = det_M_direct(w, v, c.rho);
        const cplx df = det_M_factorized(w, v, c.rho);
        const CMat3 F = matrix_F(w, v, c.rho);
        os << w << ',' << d.real() << ',' << d.imag() << ',' << std::abs(d) << ',' << df.real() << ',' << df.imag();
        for (int j = 0; j < 3; ++j) os << ',' << F(j, j).real() << ',' << F(j, j).imag();
        os << '\n';
        if (w != 0.0) min_abs = std::min(min_abs, std::abs(d));
    }
    const QuadratureSpec quad = QuadratureSpec::for_density(c.rho);
    const OmegaMatrix om = omega_plus(v, c.rho, quad);
    const FjjChecks fc = F_jj_checks(v, c.rho, quad);
    const bool ok = std::isfinite(min_abs) && min_abs > 0.0 && om.min_eigenvalue() > 0.0;
    nlohmann::json res = {{"v", vec_json(v)},
                          {"branch_point", branch_point(v, c.rho.mass)},
                          {"omega_plus_min_eigenvalue", om.min_eigenvalue()},
                          {"omega_plus_quadrature_error", om.K.error},
                          {"F_second_derivative_fd", vec_json(fc.F2)},
                          {"F_second_derivative_integral", vec_json(fc.F2_integrand)},
                          {"min_abs_det_nonzero_omega", min_abs},
                          {"invertibility_check", ok}};
    write_manifest(dir, c, res);
    std::cout << res.dump(2) << '\n';
    return ok ? kOk : kCheckFailed;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(cell);
    return out;
}

int cmd_fit(const std::string& input, const std::string& tcol, const std::string& ycol, double t_min, double t_max,
            const std::string& out) {
    std::ifstream is(input);
    if (!is) throw std::invalid_argument("cannot read " + input);
    std::string line;
    std::getline(is, line);
    const auto header = split_csv_line(line);
    auto column = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw std::invalid_argument("column '" + name + "' not in " + input);
    };
    const std::size_t it = column(tcol), iy = column(ycol);
    std::vector<double> t, y;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) throw std::invalid_argument("ragged row in " + input);
        t.push_back(std::stod(cells[it]));
        y.push_back(std::stod(cells[iy]));
    }
    const FitResult f = fit_power_law(t, y, t_min, t_max);
    const nlohmann::json res = fit_json(f);
    if (!out.empty()) {
        fs::create_directories(out);
        write_json(fs::path(out) / "fit.json", res);
    }
    std::cout << res.dump(2) << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dirac field coupled to a relativistic particle: solitons, dynamics, spectral matrices"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--config", g.config, "INI configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", g.out, "output directory");
    app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--seed", g.seed, "seed for generated initial data");

    Overrides o_sim, o_sol, o_dec, o_sca;
    double snapshot_stride = 0.0;
    auto* sim = app.add_subcommand("simulate", "evolve a (perturbed) soliton and record the particle and modulation");
    o_sim.attach(sim);
    sim->add_option("--snapshot-stride", snapshot_stride, "time between field snapshots (0 = none)");
    auto* sol = app.add_subcommand("soliton", "exact soliton persistence run");
    o_sol.attach(sol);
    auto* dec = app.add_subcommand("decay", "weighted decay of the free moving-frame propagator");
    o_dec.attach(dec);
    auto* sca = app.add_subcommand("scatter", "perturbed soliton scattering run");
    o_sca.attach(sca);

    std::string state;
    std::optional<std::string> guess_v;
    auto* prj = app.add_subcommand("project", "project a stored state onto the soliton manifold");
    prj->add_option("--state", state, "snapshot descriptor (.json)")->required()->check(CLI::ExistingFile);
    prj->add_option("--guess-v", guess_v, "initial velocity guess \"x,y,z\"");

    std::string spec_v = "0.3,0,0", omega_range = "-3:3";
    int nodes = 101;
    auto* spc = app.add_subcommand("spectral", "matrices M, F and Omega+ along the imaginary axis");
    spc->add_option("--v", spec_v, "frame velocity \"x,y,z\" (along e1)");
    spc->add_option("--omega-range", omega_range, "a:b");
    spc->add_option("--nodes", nodes, "sample count");

    std::string fit_in, tcol = "t", ycol;
    double t_min = 5.0, t_max = 25.0;
    auto* fit = app.add_subcommand("fit", "power-law fit of one CSV column against another");
    fit->add_option("--input", fit_in, "CSV file with a header row")->required()->check(CLI::ExistingFile);
    fit->add_option("--t-column", tcol, "time column");
    fit->add_option("--y-column", ycol, "value column")->required();
    fit->add_option("--t-min", t_min);
    fit->add_option("--t-max", t_max);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kValidation;
    }

    try {
        if (*sim) return cmd_simulate(assemble(ExperimentKind::Simulate, g, o_sim), snapshot_stride);
        if (*sol) return cmd_soliton(assemble(ExperimentKind::Soliton, g, o_sol));
        if (*dec) return cmd_decay(assemble(ExperimentKind::Decay, g, o_dec));
        if (*sca) return cmd_scatter(assemble(ExperimentKind::Scatter, g, o_sca));
        if (*prj) return cmd_project(assemble(ExperimentKind::Simulate, g, {}), state, guess_v);
        if (*spc) {
            const auto colon = omega_range.find(':');
            if (colon == std::string::npos) throw std::invalid_argument("--omega-range expects a:b");
            return cmd_spectral(assemble(ExperimentKind::Simulate, g, {}), spec_v, std::stod(omega_range.substr(0, colon)),
                                std::stod(omega_range.substr(colon + 1)), nodes);
        }
        if (*fit) return cmd_fit(fit_in, tcol, ycol, t_min, t_max, g.out);
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kValidation;
    } catch (const ProjectionFailure& e) {
        std::cerr << "projection failed: " << e.what() << '\n';
        return kNumerical;
    } catch (const NumericalAbort& e) {
        std::cerr << "numerical abort: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumerical;
    }
    return kOk;
}
