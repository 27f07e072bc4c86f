#include "dirsol/coupled_dynamics.hpp"

#include <array>
#include <cmath>

namespace dirsol {

namespace {

const cplx I(0.0, 1.0);

void drift(PhaseState& Y, double tau) {
    Y.q += tau * velocity_from_momentum(Y.p);
}

// Per-mode constants of the field flow for one (grid, tau, rho) combination.
struct FlowTables {
    GridSpec grid;
    double tau = 0.0;
    double m = 0.0, A = 0.0, sigma = 0.0;
    std::vector<double> c, a, b, rh;  // cos(w tau), sin(w tau)/w, (1 - cos(w tau))/w^2, rho_hat (0 off band)
    std::vector<double> w2;

    bool matches(const GridSpec& g, double t, const ChargeDensity& rho) const {
        return grid == g && tau == t && m == rho.mass && A == rho.amplitude && sigma == rho.sigma && !c.empty();
    }
};

const FlowTables& flow_tables(const GridSpec& g, double tau, const ChargeDensity& rho) {
    thread_local FlowTables t;
    if (t.matches(g, tau, rho)) return t;
    t.grid = g;
    t.tau = tau;
    t.m = rho.mass;
    t.A = rho.amplitude;
    t.sigma = rho.sigma;
    const std::size_t n = g.points();
    t.c.assign(n, 0.0);
    t.a.assign(n, 0.0);
    t.b.assign(n, 0.0);
    t.rh.assign(n, 0.0);
    t.w2.assign(n, 0.0);
    for_each_mode(g, [&](std::size_t p, const Vec3& k, bool in_band) {
        const double w2 = k.squaredNorm() + rho.mass * rho.mass;
        const double w = std::sqrt(w2);
        t.w2[p] = w2;
        t.c[p] = std::cos(w * tau);
        t.a[p] = std::sin(w * tau) / w;
        t.b[p] = (1.0 - t.c[p]) / w2;
        t.rh[p] = in_band ? rho.rho1_hat(k) : 0.0;
    });
    return t;
}

// Exact flow of the field Hamiltonian over tau with q frozen. Per mode, with h = -alpha.k + beta m,
// h^2 = w^2 and r = e^{ikq} rho_hat:
//   psi(t)        = e^{-iht} psi + h^{-1} (e^{-iht} - 1) r
//   \int_0^t psi  = S psi + h^{-1} (S - t) r,   S = \int_0^t e^{-ihs} ds = sin(wt)/w - i h (1 - cos wt)/w^2
//   p            += Re sum i k e^{-ikq} rho_hat . \int_0^t psi
void field_flow(PhaseState& Y, double tau, const ChargeDensity& rho) {
    const GridSpec& g = Y.psi.grid();
    const double m = rho.mass;
    const FlowTables& tb = flow_tables(g, tau, rho);
    auto& data = Y.psi.data();
    const Vec3 q = Y.q;
    // e^{ikq} factorises over the axes.
    std::array<std::vector<cplx>, 3> axis_phase;
    for (int j = 0; j < 3; ++j) {
        axis_phase[j].resize(g.N);
        for (int n = 0; n < g.N; ++n) axis_phase[j][n] = std::polar(1.0, g.k(n) * q[j]);
    }
    const int N = g.N;
    Vec3 dp = reduce_modes(g, Vec3(Vec3::Zero()), [&](std::size_t idx, const Vec3& k, bool in_band) -> Vec3 {
        Eigen::Map<Spinor> u(data.data() + 4 * idx);
        const double c = tb.c[idx], a = tb.a[idx], b = tb.b[idx];
        // E x = c x - i a h x,  S x = a x - i b h x
        const Spinor hu = apply_dirac_symbol(k, m, u);
        Spinor integral = a * u - I * b * hu;
        Spinor next = c * u - I * a * hu;
        if (!in_band) {
            u = next;
            return Vec3::Zero();
        }
        const std::size_t i3 = idx % N, i2 = (idx / N) % N, i1 = idx / (static_cast<std::size_t>(N) * N);
        const cplx ph = axis_phase[0][i1] * axis_phase[1][i2] * axis_phase[2][i3];
        const double rh = tb.rh[idx];
        // source r = e^{ikq} rho_hat e_1; h^{-1} r = h r / w^2 and h (h^{-1} r) = r.
        Spinor r = Spinor::Zero();
        r[0] = rh * ph;
        const Spinor hinv_r = apply_dirac_symbol(k, m, r) / tb.w2[idx];
        integral += a * hinv_r - I * b * r - tau * hinv_r;
        next += c * hinv_r - I * a * r - hinv_r;
        u = next;
        // rho_hat^T x only sees the first component.
        const cplx f = I * rh * std::conj(ph) * integral[0];
        return f.real() * k;
    });
    Y.p += dp * g.mode_volume();
}

}  // namespace

PhaseState step(const PhaseState& Y, double dt, const ChargeDensity& rho) {
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    PhaseState out = Y;
    if (out.psi.rep() != Rep::Fourier) out.psi = out.psi.to_fourier();
    drift(out, 0.5 * dt);
    field_flow(out, dt, rho);
    drift(out, 0.5 * dt);
    if (!out.p.allFinite() || !out.q.allFinite() || !(velocity_from_momentum(out.p).norm() < 1.0))
        throw NumericalAbort("non-physical particle state after step");
    return out;
}

Vec3 particle_force(const SpinorField& psi, const Vec3& q, const ChargeDensity& rho) {
    const SpinorField f = psi.to_fourier();
    const Vec3 s = reduce_modes(f.grid(), Vec3(Vec3::Zero()), [&](std::size_t idx, const Vec3& k, bool in_band) -> Vec3 {
        if (!in_band) return Vec3::Zero();
        const cplx z = I * std::polar(rho.rho1_hat(k), -k.dot(q)) * f.at(idx)[0];
        return z.real() * k;
    });
    return s * f.grid().mode_volume();
}

double hamiltonian(const PhaseState& Y, const ChargeDensity& rho) {
    const SpinorField f = Y.psi.to_fourier();
    const double m = rho.mass;
    const double s = reduce_modes(f.grid(), 0.0, [&](std::size_t idx, const Vec3& k, bool in_band) -> double {
        const Spinor u = f.at(idx);
        double e = 0.5 * u.dot(apply_dirac_symbol(k, m, u)).real();
        if (in_band) e += (std::polar(rho.rho1_hat(k), -k.dot(Y.q)) * u[0]).real();
        return e;
    });
    return s * f.grid().mode_volume() + std::sqrt(1.0 + Y.p.squaredNorm());
}

double transversal_norm(const PhaseState& Z, const Vec3& centre, double nu) {
    return weighted_norm(Z.psi.to_position(), -nu, centre) + Z.q.norm() + Z.p.norm();
}

Trajectory simulate(const PhaseState& Y0, const SimulationConfig& cfg) {
    cfg.grid.validate();
    cfg.rho.validate();
    if (!(cfg.dt > 0.0) || !(cfg.T >= 0.0)) throw std::invalid_argument("simulation needs dt > 0 and T >= 0");
    if (!(Y0.psi.grid() == cfg.grid)) throw std::invalid_argument("initial state grid differs from configuration");
    Trajectory tr;
    PhaseState Y = Y0;
    Y.psi = Y.psi.to_fourier();
    const long steps = std::lround(cfg.T / cfg.dt);
    const long track_every = cfg.tracking.enabled ? std::max(1L, std::lround(cfg.tracking.stride / cfg.dt)) : 0;
    const long snap_every = cfg.snapshot_stride > 0 ? std::max(1L, std::lround(cfg.snapshot_stride / cfg.dt)) : 0;
    bool tracking = cfg.tracking.enabled;
    SolitonParams sigma = guess_from_state(Y);
    double majorant = 0.0;

    auto record = [&](long n) {
        const double t = n * cfg.dt;
        tr.times.push_back(t);
        tr.q.push_back(Y.q);
        tr.p.push_back(Y.p);
        if (tracking && n % track_every == 0) {
            try {
                ProjectionResult pr = project_to_manifold(Y, sigma, cfg.rho, cfg.tracking.projection);
                sigma = pr.sigma;
                ModulationSample ms;
                ms.t = t;
                ms.sigma = sigma;
                ms.iterations = pr.iterations;
                const double zfield = weighted_norm(pr.Z.psi.to_position(), -cfg.tracking.nu, sigma.b);
                ms.z_norm = zfield + pr.Z.q.norm() + pr.Z.p.norm();
                majorant = std::max(majorant, std::pow(1.0 + t, 1.5) * ms.z_norm);
                ms.majorant = majorant;
                tr.modulation.push_back(ms);
            } catch (const ProjectionFailure&) {
                tracking = false;
                tr.tracking_lost_at = t;
            }
        }
        if (snap_every && n % snap_every == 0) tr.snapshots.emplace_back(t, Y);
        if (cfg.on_sample && track_every && n % track_every == 0) cfg.on_sample(t, Y);
    };

    record(0);
    for (long n = 1; n <= steps; ++n) {
        Y = step(Y, cfg.dt, cfg.rho);
        record(n);
    }
    tr.final_state = Y;
    return tr;
}

ScatteringData extract_scattering_data(const Trajectory& traj, double t_min) {
    std::vector<double> tt;
    std::vector<Vec3> qdot, qq;
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        if (traj.times[i] >= t_min) {
            tt.push_back(traj.times[i]);
            qdot.push_back(velocity_from_momentum(traj.p[i]));
            qq.push_back(traj.q[i]);
        }
    if (tt.size() < 2) throw FitError("trajectory tail has too few samples");
    ScatteringData out;
    for (const auto& v : qdot) out.v_plus += v;
    out.v_plus /= static_cast<double>(qdot.size());
    for (int j = 0; j < 3; ++j) {
        std::vector<double> y(tt.size());
        for (std::size_t i = 0; i < tt.size(); ++i) y[i] = qq[i][j] - out.v_plus[j] * tt[i];
        out.a_plus[j] = fit_line(tt, y).first;
    }
    std::vector<double> dev(tt.size());
    for (std::size_t i = 0; i < tt.size(); ++i) dev[i] = (qdot[i] - out.v_plus).norm();
    try {
        out.velocity_fit = fit_power_law(tt, dev, t_min, tt.back());
    } catch (const FitError&) {
    }
    std::vector<double> zt, zv;
    for (const auto& s : traj.modulation)
        if (s.t >= t_min) {
            zt.push_back(s.t);
            zv.push_back(s.z_norm);
        }
    if (!zt.empty()) {
        try {
            out.z_fit = fit_power_law(zt, zv, t_min, zt.back());
        } catch (const FitError&) {
        }
    }
    return out;
}

}  // namespace dirsol
