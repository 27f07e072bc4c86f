#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "dirsol/run_io.hpp"

using namespace dirsol;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("dirsol_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

RunConfig tiny_scatter() {
    RunConfig c;
    c.kind = ExperimentKind::Scatter;
    c.grid = GridSpec{24.0, 32};
    c.v = Vec3(0.3, 0, 0);
    c.b = Vec3(0.5, 0, 0);
    c.dt = 0.05;
    c.T = 4.0;
    c.track_stride = 0.2;
    c.packet_width = 1.0;
    c.fit_t_min = 0.5;
    c.fit_t_max = 4.0;
    return c;
}

}  // namespace

TEST_CASE("config round trip through INI text") {
    RunConfig c;
    c.grid = GridSpec{40.0, 32};
    c.rho.sigma = 1.25;
    c.kind = ExperimentKind::Decay;
    c.v = Vec3(0.1, -0.2, 0.3);
    c.b = Vec3(1.0 / 3.0, 0, 2);
    c.seed = 123456789012345ULL;
    c.epsilon = 0.01;
    const fs::path dir = scratch_dir("config");
    save_config(dir / "c.ini", c);
    const RunConfig d = load_config(dir / "c.ini");
    CHECK(d.grid == c.grid);
    CHECK(d.rho.sigma == c.rho.sigma);
    CHECK(d.kind == ExperimentKind::Decay);
    CHECK(d.v == c.v);
    CHECK(d.b == c.b);
    CHECK(d.seed == c.seed);
    CHECK(d.epsilon == c.epsilon);
    CHECK(config_to_json(d) == config_to_json(c));
}

TEST_CASE("config rejects unknown keys and malformed values") {
    const fs::path dir = scratch_dir("badconfig");
    {
        std::ofstream(dir / "a.ini") << "[grid]\nL = 40\nNN = 32\n";
    }
    CHECK_THROWS_AS(load_config(dir / "a.ini"), std::invalid_argument);
    {
        std::ofstream(dir / "b.ini") << "[soliton]\nv = 0.1, 0.2\n";
    }
    CHECK_THROWS_AS(load_config(dir / "b.ini"), std::invalid_argument);
    {
        std::ofstream(dir / "c.ini") << "[run]\ndt = fast\n";
    }
    CHECK_THROWS_AS(load_config(dir / "c.ini"), std::invalid_argument);
    {
        std::ofstream(dir / "d.ini") << "[run]\nkind = sweep\n";
    }
    CHECK_THROWS_AS(load_config(dir / "d.ini"), std::invalid_argument);
    // Partial files keep the defaults for everything else.
    {
        std::ofstream(dir / "e.ini") << "[grid]\nN = 16\n";
    }
    const RunConfig e = load_config(dir / "e.ini");
    CHECK(e.grid.N == 16);
    CHECK(e.grid.L == RunConfig{}.grid.L);
}

TEST_CASE("run config validation") {
    RunConfig c;
    CHECK_NOTHROW(c.validate());
    c.v = Vec3(1.0, 0, 0);
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = RunConfig{};
    c.fit_t_max = c.fit_t_min;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = RunConfig{};
    c.grid.N = 30;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = RunConfig{};
    CHECK(c.validity_time() == doctest::Approx(40.0 - 6.0));
}

TEST_CASE("snapshot round trip is bit exact") {
    GridSpec g{12.0, 8};
    PhaseState Y = PhaseState::zero(g, Rep::Position);
    Y.psi = gaussian_packet(g, 1.0, Vec3(0.3, 0, 0), 5);
    Y.q = Vec3(0.1, 0.2, 1.0 / 3.0);
    Y.p = Vec3(-0.5, 0, 1e-17);
    const fs::path dir = scratch_dir("snap");
    write_snapshot(dir, "s0", 1.5, Y);
    const PhaseState Z = load_snapshot(dir / "s0.json");
    CHECK(Z.q == Y.q);
    CHECK(Z.p == Y.p);
    CHECK(Z.psi.data() == Y.psi.data());
    CHECK(fs::file_size(dir / "s0.bin") == g.points() * 4 * 16);
    fs::resize_file(dir / "s0.bin", 100);
    CHECK_THROWS_AS(load_snapshot(dir / "s0.json"), std::invalid_argument);
}

TEST_CASE("gaussian packet is normalised by its spinor and reproducible") {
    GridSpec g{16.0, 16};
    const SpinorField a = gaussian_packet(g, 1.0, Vec3::Zero(), 9), b = gaussian_packet(g, 1.0, Vec3::Zero(), 9);
    CHECK(a.data() == b.data());
    CHECK(a.at(g.index(8, 8, 8)).norm() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(gaussian_packet(g, 1.0, Vec3::Zero(), 10).data() != a.data());
}

TEST_CASE("free decay without weight conserves the charge") {
    RunConfig c;
    c.grid = GridSpec{40.0, 32};
    c.nu = 0.0;
    c.fit_t_min = 1.0;
    c.fit_t_max = 10.0;
    c.T = 10.0;
    const DecayReport r = run_free_decay(c);
    for (double n : r.norms) CHECK(n == doctest::Approx(r.norms.front()).epsilon(1e-12));
    CHECK(std::abs(r.fit.exponent) <= 1e-12);
}

TEST_CASE("free decay with weight decreases and refuses a window beyond the light cone") {
    RunConfig c;
    c.grid = GridSpec{40.0, 32};
    c.fit_t_min = 2.0;
    c.fit_t_max = 12.0;
    c.T = 12.0;
    const DecayReport r = run_free_decay(c);
    CHECK(r.fit.exponent < -1.0);
    CHECK(r.fit.t_max <= c.validity_time());
    c.grid = GridSpec{12.0, 16};
    CHECK_THROWS_AS(run_free_decay(c), std::invalid_argument);
}

TEST_CASE("zero perturbation yields the soliton and trivial scattering data") {
    RunConfig c = tiny_scatter();
    c.epsilon = 0.0;
    const PhaseState S = soliton_state(SolitonParams{c.b, c.v}, c.rho, c.grid);
    CHECK((perturbed_soliton(c) - S).energy_norm() == 0.0);
    const ScatterReport r = run_scattering(c);
    CHECK(r.captured);
    CHECK((r.v_plus - c.v).norm() <= 1e-4);  // time-step error of the coarse run
    CHECK((r.a_plus - c.b).norm() <= 1e-4);
    CHECK(r.cauchy_full <= 1e-3);
}

TEST_CASE("perturbation has the requested size and is transversal") {
    RunConfig c = tiny_scatter();
    const PhaseState Y = perturbed_soliton(c);
    const SolitonParams s{c.b, c.v};
    const PhaseState Z = Y - soliton_state(s, c.rho, c.grid);
    CHECK(Z.energy_norm() == doctest::Approx(c.epsilon).epsilon(1e-12));
    const TangentBasis tb = tangent_basis(s, c.rho, c.grid);
    for (int j = 0; j < 6; ++j) CHECK(std::abs(omega(Z, tb[j])) <= 1e-13);
}

TEST_CASE("manifest and particle trajectory are reproducible") {
    RunConfig c;
    c.grid = GridSpec{16.0, 16};
    c.v = Vec3(0.2, 0, 0);
    c.epsilon = 0.02;
    c.dt = 0.05;
    c.T = 0.5;
    auto run = [&](const std::string& name) {
        const fs::path dir = scratch_dir(name);
        SimulationConfig sc;
        sc.grid = c.grid;
        sc.dt = c.dt;
        sc.T = c.T;
        sc.tracking.enabled = false;
        const Trajectory tr = simulate(perturbed_soliton(c), sc);
        write_particle_csv(dir / "particle.csv", tr);
        write_manifest(dir, c, {{"steps", tr.times.size()}});
        return dir;
    };
    const fs::path a = run("repro_a"), b = run("repro_b");
    CHECK(slurp(a / "particle.csv") == slurp(b / "particle.csv"));
    CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));
    // The manifest's config reproduces the run configuration.
    const RunConfig back = load_config(a / "config.ini");
    CHECK(config_to_json(back) == config_to_json(c));
    std::ifstream is(a / "particle.csv");
    std::string header;
    std::getline(is, header);
    CHECK(header == "t,q1,q2,q3,p1,p2,p3");
}
