#include "dirsol/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace dirsol {

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Simulate: return "simulate";
        case ExperimentKind::Soliton: return "soliton";
        case ExperimentKind::Decay: return "decay";
        case ExperimentKind::Scatter: return "scatter";
    }
    return "simulate";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
    if (s == "simulate") return ExperimentKind::Simulate;
    if (s == "soliton") return ExperimentKind::Soliton;
    if (s == "decay") return ExperimentKind::Decay;
    if (s == "scatter") return ExperimentKind::Scatter;
    throw std::invalid_argument("unknown experiment kind '" + s + "'");
}

void RunConfig::validate() const {
    grid.validate();
    rho.validate();
    require_subluminal(v);
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(T >= 0.0)) throw std::invalid_argument("T must be non-negative");
    if (!(nu >= 0.0)) throw std::invalid_argument("nu must be non-negative");
    if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be non-negative");
    if (!(packet_width > 0.0)) throw std::invalid_argument("packet_width must be positive");
    if (!(sample_stride > 0.0) || !(track_stride > 0.0)) throw std::invalid_argument("strides must be positive");
    if (!(fit_t_min > 0.0) || !(fit_t_max > fit_t_min)) throw std::invalid_argument("fit window must satisfy 0 < t_min < t_max");
    if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

double RunConfig::support_radius() const {
    // Gaussian tails below 1e-3 of the peak beyond four widths; the soliton is localised on the scale of rho.
    return 4.0 * std::max(packet_width, rho.sigma);
}

double RunConfig::validity_time() const { return 0.5 * grid.L - support_radius(); }

namespace {

Spinor random_unit_spinor(std::mt19937_64& gen) {
    std::normal_distribution<double> n01;
    Spinor s;
    for (int a = 0; a < 4; ++a) s[a] = cplx(n01(gen), n01(gen));
    return s / s.norm();
}

double clipped_window_end(const RunConfig& cfg, double t_end) {
    const double end = std::min({cfg.fit_t_max, t_end, cfg.validity_time()});
    if (!(end > cfg.fit_t_min))
        throw std::invalid_argument("fit window is empty: validity time " + std::to_string(cfg.validity_time()) +
                                    " does not exceed t_min; enlarge L");
    return end;
}

}  // namespace

SpinorField gaussian_packet(const GridSpec& g, double width, const Vec3& centre, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    const Spinor s = random_unit_spinor(gen);
    SpinorField f(g, Rep::Position);
    const double inv = 1.0 / (2.0 * width * width);
    for_each_node(g, [&](std::size_t p, const Vec3& x) { f.at(p) = std::exp(-(x - centre).squaredNorm() * inv) * s; });
    return f;
}

DecayReport run_free_decay(const RunConfig& cfg) {
    cfg.validate();
    const double t_end = clipped_window_end(cfg, std::max(cfg.T, cfg.fit_t_max));
    const SpinorField phi = gaussian_packet(cfg.grid, cfg.packet_width, Vec3::Zero(), cfg.seed).to_fourier();
    DecayReport out;
    const long samples = std::lround(std::max(cfg.T, t_end) / cfg.sample_stride);
    for (long n = 0; n <= samples; ++n) {
        const double t = n * cfg.sample_stride;
        // Each sample is propagated from t = 0, so no error accumulates along the series.
        const SpinorField u = moving_frame_propagate(phi, t, cfg.v, cfg.rho.mass).to_position();
        out.times.push_back(t);
        out.norms.push_back(weighted_norm(u, -cfg.nu));
    }
    out.fit = fit_power_law(out.times, out.norms, cfg.fit_t_min, t_end);
    return out;
}

bool decay_exponent_ok(const FitResult& f) { return std::abs(f.exponent + 1.5) <= 0.2; }

namespace {

SimulationConfig simulation_config(const RunConfig& cfg) {
    SimulationConfig sc;
    sc.grid = cfg.grid;
    sc.rho = cfg.rho;
    sc.dt = cfg.dt;
    sc.T = cfg.T;
    sc.tracking.stride = cfg.track_stride;
    sc.tracking.nu = cfg.nu;
    return sc;
}

}  // namespace

PersistenceReport run_soliton_persistence(const RunConfig& cfg) {
    cfg.validate();
    const SolitonParams s0{cfg.b, cfg.v};
    const PhaseState Y0 = soliton_state(s0, cfg.rho, cfg.grid);
    const SpinorField psi_v = soliton_field(cfg.v, cfg.rho, cfg.grid);
    const double ref_norm = psi_v.l2_norm();
    PersistenceReport out;
    SimulationConfig sc = simulation_config(cfg);
    sc.on_sample = [&](double t, const PhaseState& Y) {
        const SpinorField ref = translate(psi_v, cfg.b + cfg.v * t);
        out.times.push_back(t);
        out.field_error.push_back((Y.psi.to_fourier() - ref).l2_norm() / ref_norm);
        out.velocity_error.push_back((velocity_from_momentum(Y.p) - cfg.v).norm());
    };
    out.trajectory = simulate(Y0, sc);
    for (const auto& m : out.trajectory.modulation) out.z_norm.push_back(m.z_norm);
    auto max_of = [](const std::vector<double>& x) { return x.empty() ? 0.0 : *std::max_element(x.begin(), x.end()); };
    out.max_field_error = max_of(out.field_error);
    out.max_velocity_error = max_of(out.velocity_error);
    out.max_z_norm = max_of(out.z_norm);
    out.final_velocity_error = (velocity_from_momentum(out.trajectory.final_state.p) - cfg.v).norm();
    return out;
}

PhaseState perturbed_soliton(const RunConfig& cfg) {
    cfg.validate();
    const SolitonParams s0{cfg.b, cfg.v};
    PhaseState S = soliton_state(s0, cfg.rho, cfg.grid);
    if (cfg.epsilon == 0.0) return S;
    std::mt19937_64 gen(cfg.seed);
    PhaseState Z = PhaseState::zero(cfg.grid, Rep::Position);
    Z.psi = gaussian_packet(cfg.grid, cfg.packet_width, cfg.b, gen());
    std::normal_distribution<double> n01;
    Vec3 dp(n01(gen), n01(gen), n01(gen));
    Z.p = dp / dp.norm();
    Z.psi = Z.psi.to_fourier();
    PhaseState Zc = symplectic_complement(Z, tangent_basis(s0, cfg.rho, cfg.grid));
    const double n = Zc.energy_norm();
    if (!(n > 0.0)) throw std::runtime_error("perturbation lies in the tangent space");
    return S + (cfg.epsilon / n) * Zc;
}

namespace {

// W_0(-t)(psi - psi_v(. - b)) for the accompanying soliton sigma.
SpinorField pull_back(const PhaseState& Y, double t, const SolitonParams& sigma, const ChargeDensity& rho) {
    SpinorField rad = Y.psi.to_fourier() - soliton_state(sigma, rho, Y.psi.grid()).psi.to_fourier();
    return free_propagate(rad, -t, rho.mass);
}

}  // namespace

ScatterReport run_scattering(const RunConfig& cfg) {
    cfg.validate();
    const double t_end = clipped_window_end(cfg, cfg.T);
    SimulationConfig sc = simulation_config(cfg);
    sc.snapshot_stride = 0.25 * cfg.T;
    ScatterReport out;
    out.fit_t_max = t_end;
    out.trajectory = simulate(perturbed_soliton(cfg), sc);
    const Trajectory& tr = out.trajectory;
    out.tracking_lost_at = tr.tracking_lost_at;
    if (tr.tracking_lost_at) {
        out.captured = false;
        return out;
    }

    // v_plus from the last quarter of the window; deviations per quarter.
    const double quarter = 0.25 * (t_end - cfg.fit_t_min);
    Vec3 vsum = Vec3::Zero();
    int vcount = 0;
    std::vector<double> tail_t;
    std::vector<Vec3> tail_q;
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        const double t = tr.times[i];
        if (t >= t_end - quarter && t <= t_end) {
            vsum += velocity_from_momentum(tr.p[i]);
            ++vcount;
            tail_t.push_back(t);
            tail_q.push_back(tr.q[i]);
        }
    }
    if (vcount < 2) throw std::invalid_argument("tail window holds too few samples; reduce dt");
    out.v_plus = vsum / vcount;
    for (int j = 0; j < 3; ++j) {
        std::vector<double> y(tail_t.size());
        for (std::size_t i = 0; i < tail_t.size(); ++i) y[i] = tail_q[i][j] - out.v_plus[j] * tail_t[i];
        out.a_plus[j] = fit_line(tail_t, y).first;
    }
    out.velocity_deviation.assign(4, 0.0);
    std::vector<int> counts(4, 0);
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        const double t = tr.times[i];
        if (t < cfg.fit_t_min || t > t_end) continue;
        const int bin = std::min(3, static_cast<int>((t - cfg.fit_t_min) / quarter));
        out.velocity_deviation[bin] += (velocity_from_momentum(tr.p[i]) - out.v_plus).norm();
        ++counts[bin];
    }
    for (int bin = 0; bin < 4; ++bin)
        if (counts[bin]) out.velocity_deviation[bin] /= counts[bin];

    std::vector<double> zt, zv;
    for (const auto& s : tr.modulation) {
        zt.push_back(s.t);
        zv.push_back(s.z_norm);
    }
    try {
        out.z_fit = fit_power_law(zt, zv, cfg.fit_t_min, t_end);
    } catch (const FitError&) {
    }

    // phi estimates at T/4, T/2, T from the snapshots, each projected afresh.
    auto estimate = [&](double t_target) {
        const auto it = std::min_element(tr.snapshots.begin(), tr.snapshots.end(), [&](const auto& a, const auto& b) {
            return std::abs(a.first - t_target) < std::abs(b.first - t_target);
        });
        const auto mt = std::min_element(tr.modulation.begin(), tr.modulation.end(), [&](const auto& a, const auto& b) {
            return std::abs(a.t - it->first) < std::abs(b.t - it->first);
        });
        PhiEstimate e;
        e.t = it->first;
        e.sigma = project_to_manifold(it->second, mt->sigma, cfg.rho).sigma;
        e.phi = pull_back(it->second, e.t, e.sigma, cfg.rho);
        return e;
    };
    try {
        const PhiEstimate e1 = estimate(0.25 * cfg.T);
        const PhiEstimate e2 = estimate(0.5 * cfg.T);
        const PhiEstimate e4 = estimate(cfg.T);
        out.cauchy_half = (e2.phi - e1.phi).l2_norm();
        out.cauchy_full = (e4.phi - e2.phi).l2_norm();
        const SolitonParams asymptotic{out.v_plus * cfg.T + out.a_plus, out.v_plus};
        const SpinorField rem = tr.final_state.psi.to_fourier() -
                                soliton_state(asymptotic, cfg.rho, cfg.grid).psi.to_fourier() -
                                free_propagate(e2.phi, cfg.T, cfg.rho.mass);
        out.remainder = rem.l2_norm();
    } catch (const ProjectionFailure&) {
        out.captured = false;
    }
    return out;
}

bool scattering_ok(const ScatterReport& r) {
    if (!r.captured || !r.z_fit) return false;
    const auto& d = r.velocity_deviation;
    const bool velocity_decreasing = d.size() == 4 && d[3] < d[2] && d[2] < d[1] && d[1] < d[0];
    return velocity_decreasing && r.z_fit->exponent <= -1.0 && r.cauchy_full < r.cauchy_half;
}

}  // namespace dirsol
