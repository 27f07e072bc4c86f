// Acceptance harness: one PASS/FAIL line per criterion, tolerances fixed in advance.
// Exit status 0 when every criterion passes, 4 otherwise.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include "dirsol/experiments.hpp"
#include "dirsol/linearized_spectral.hpp"

using namespace dirsol;

namespace {

struct Outcome {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail << " [violated: " << what << "]";
        }
    }
};

SpinorField random_field(const GridSpec& g, std::mt19937_64& gen) {
    std::normal_distribution<double> n01;
    SpinorField f(g, Rep::Position);
    for (auto& z : f.data()) z = cplx(n01(gen), n01(gen));
    return f.to_fourier();
}

PhaseState random_state(const GridSpec& g, std::mt19937_64& gen) {
    std::normal_distribution<double> n01;
    PhaseState Y = PhaseState::zero(g, Rep::Position);
    Y.psi = gaussian_packet(g, 1.5, Vec3(n01(gen), n01(gen), n01(gen)), gen()).to_fourier();
    Y.q = Vec3(n01(gen), n01(gen), n01(gen));
    Y.p = Vec3(n01(gen), n01(gen), n01(gen));
    return Y;
}

// Soliton plus a generic (not transversal) bump of energy norm eps.
PhaseState bumped_soliton(const SolitonParams& s, const ChargeDensity& rho, const GridSpec& g, double eps,
                          std::mt19937_64& gen) {
    PhaseState bump = random_state(g, gen);
    bump.psi = translate(bump.psi, s.b);
    return soliton_state(s, rho, g) + (eps / bump.energy_norm()) * bump;
}

void criterion_1(Outcome& o) {
    const auto& d = dirac();
    double clifford = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            const Mat4 anti = d.by_index(a) * d.by_index(b) + d.by_index(b) * d.by_index(a);
            const Mat4 expected = a == b ? Mat4(2.0 * Mat4::Identity()) : Mat4(Mat4::Zero());
            clifford = std::max(clifford, (anti - expected).cwiseAbs().maxCoeff());
        }
    std::mt19937_64 gen(1);
    std::normal_distribution<double> n01;
    double real_orth = 0.0;
    for (int i = 0; i < 1000; ++i) {
        RSpinor s;
        for (int a = 0; a < 4; ++a) s[a] = n01(gen);
        for (double r : real_orthogonality(s)) real_orth = std::max(real_orth, std::abs(r));
    }
    o.detail << "anticommutator " << clifford << ", real orthogonality " << real_orth;
    o.require(clifford <= 1e-14, "anticommutator <= 1e-14");
    o.require(real_orth <= 1e-14, "real orthogonality <= 1e-14");
}

void criterion_2(Outcome& o) {
    GridSpec g{20.0, 32};
    std::mt19937_64 gen(2);
    const SpinorField f = random_field(g, gen);
    const double n0 = f.l2_norm();
    double unit = 0.0;
    for (double t : {0.1, 1.0, 3.7, 10.0, 100.0})
        unit = std::max(unit, std::abs(free_propagate(f, t, 1.0).l2_norm() - n0) / n0);
    double comp = 0.0;
    for (auto [s, t] : {std::pair{0.7, 2.3}, std::pair{5.0, -1.5}, std::pair{12.5, 7.25}}) {
        const SpinorField a = free_propagate(free_propagate(f, s, 1.0), t, 1.0);
        comp = std::max(comp, (a - free_propagate(f, s + t, 1.0)).l2_norm() / n0);
    }
    o.detail << "unitarity " << unit << ", composition " << comp;
    o.require(unit <= 1e-12, "unitarity <= 1e-12");
    o.require(comp <= 1e-11, "composition <= 1e-11");
}

void criterion_3(Outcome& o) {
    ChargeDensity rho;
    double worst_force = 0.0;
    for (double s : {0.0, 0.3, 0.6}) {
        const Vec3 v(s, 0, 0);
        const double r32 = stationary_residual(soliton_field(v, rho, GridSpec{20.0, 32}), v, rho);
        const SpinorField f64 = soliton_field(v, rho, GridSpec{20.0, 64});
        const double r64 = stationary_residual(f64, v, rho);
        worst_force = std::max(worst_force, force_balance(f64, rho).norm());
        o.detail << "v=" << s << ": " << r32 << " -> " << r64 << "; ";
        o.require(r64 * 10.0 <= r32, "residual drop >= 10x at v=" + std::to_string(s));
    }
    o.detail << "force " << worst_force;
    o.require(worst_force <= 1e-8, "force balance <= 1e-8");
}

void criterion_4(Outcome& o) {
    ChargeDensity rho;
    const Vec3 v(0.6, 0, 0);
    double root = 0.0;
    {
        GridSpec g{20.0, 64};
        const LinearizedOperator op = make_linearized_operator(v, v, rho, g);
        const TangentBasis tb = tangent_basis(v, rho, g);
        for (int j = 0; j < 3; ++j) {
            root = std::max(root, apply_A(op, tb[j]).energy_norm());
            root = std::max(root, (apply_A(op, tb[j + 3]) - tb[j]).energy_norm());
        }
    }
    double skew = 0.0;
    {
        GridSpec g{20.0, 32};
        const LinearizedOperator op = make_linearized_operator(v, v, rho, g);
        std::mt19937_64 gen(4);
        for (int i = 0; i < 50; ++i) {
            const PhaseState a = random_state(g, gen), b = random_state(g, gen);
            const double lhs = omega(apply_A(op, a), b), rhs = -omega(a, apply_A(op, b));
            skew = std::max(skew, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
        }
    }
    o.detail << "tangent/root residual " << root << ", skew residual " << skew;
    o.require(root <= 1e-6, "A tau residuals <= 1e-6");
    o.require(skew <= 1e-8, "skew symmetry <= 1e-8");
}

void criterion_5(Outcome& o) {
    ChargeDensity rho;
    const QuadratureSpec quad = QuadratureSpec::for_density(rho);
    for (double s : {0.0, 0.2, 0.4, 0.6, 0.8}) {
        const Vec3 v(s, 0, 0);
        const OmegaMatrix om = omega_plus(v, rho, quad);
        const double lmin = om.min_eigenvalue();
        const double sym = (om.block - om.block.transpose()).cwiseAbs().maxCoeff();
        const OmegaComparison c = omega_vs_direct(v, rho, GridSpec{20.0, 64}, quad);
        o.detail << "v=" << s << ": lmin " << lmin << " +- " << om.K.error << ", grid rel " << c.max_relative_difference
                 << "; ";
        const std::string tag = " at v=" + std::to_string(s);
        o.require(om.K.converged(), "quadrature converged" + tag);
        o.require(sym <= 1e-14, "symmetric" + tag);
        o.require(lmin > om.K.error, "min eigenvalue above error bar" + tag);
        o.require(c.max_relative_difference <= 1e-3, "grid vs closed form <= 1e-3" + tag);
    }
}

void criterion_6(Outcome& o) {
    ChargeDensity rho;
    GridSpec g{20.0, 32};
    std::mt19937_64 gen(6);
    double resid = 0.0, idem = 0.0, cov = 0.0;
    int max_iter = 0;
    const std::vector<SolitonParams> bases = {{Vec3::Zero(), Vec3(0.3, 0, 0)},
                                              {Vec3(0.4, -0.2, 0.1), Vec3(0.1, 0.4, -0.2)},
                                              {Vec3(-1.0, 0.5, 0.0), Vec3(0.0, 0.0, 0.6)}};
    for (const SolitonParams& s : bases) {
        const PhaseState Y = bumped_soliton(s, rho, g, 0.05, gen);
        const ProjectionResult p1 = project_to_manifold(Y, guess_from_state(Y), rho);
        resid = std::max(resid, p1.residuals.cwiseAbs().maxCoeff());
        max_iter = std::max(max_iter, p1.iterations);
        const PhaseState Y2 = soliton_state(p1.sigma, rho, g) + p1.Z;
        const ProjectionResult p2 = project_to_manifold(Y2, SolitonParams{p1.sigma.b + Vec3(0.02, -0.01, 0), p1.sigma.v}, rho);
        idem = std::max({idem, (p2.sigma.b - p1.sigma.b).norm(), (p2.sigma.v - p1.sigma.v).norm(),
                         (p2.Z - p1.Z).energy_norm()});
        // Whole-cell shifts are exact on the grid.
        const Vec3 shift(2 * g.dx(), -g.dx(), 3 * g.dx());
        PhaseState Ys = Y;
        Ys.psi = translate(Y.psi, shift);
        Ys.q += shift;
        const ProjectionResult ps = project_to_manifold(Ys, guess_from_state(Ys), rho);
        cov = std::max({cov, (ps.sigma.b - p1.sigma.b - shift).norm(), (ps.sigma.v - p1.sigma.v).norm()});
    }
    o.detail << "residual " << resid << " (<= " << max_iter << " Newton steps), idempotence " << idem
             << ", translation covariance " << cov;
    o.require(resid <= 1e-10, "residual <= 1e-10");
    o.require(idem <= 1e-9, "idempotence <= 1e-9");
    o.require(cov <= 1e-9, "translation covariance <= 1e-9");
}

void criterion_7(Outcome& o) {
    ChargeDensity rho;
    const Vec3 v(0.5, 0, 0);
    double det_rel = 0.0, blocks = 0.0, min_det = INFINITY;
    for (int i = 0; i < 100; ++i) {
        // 50 frequencies on each side, 0.05 <= |omega| <= 3.
        const double a = 0.05 + (3.0 - 0.05) * (i / 2) / 49.0;
        const double w = i % 2 == 0 ? a : -a;
        const cplx d = det_M_direct(w, v, rho), f = det_M_factorized(w, v, rho);
        det_rel = std::max(det_rel, std::abs(d - f) / std::abs(d));
        min_det = std::min(min_det, std::abs(d));
        const MinvBlocks mb = Minv_blocks(w, v, rho);
        blocks = std::max({blocks, mb.relation_22_11, mb.relation_11_12});
    }
    const FjjChecks c = F_jj_checks(v, rho, QuadratureSpec::for_density(rho));
    double f0 = 0.0, f1 = 0.0, f2min = INFINITY;
    for (int j = 0; j < 3; ++j) {
        f0 = std::max(f0, std::abs(c.F0[j]));
        f1 = std::max(f1, std::abs(c.F1[j]) / (1.0 + std::abs(c.F2[j])));
        f2min = std::min(f2min, c.F2[j]);
    }
    o.detail << "det rel " << det_rel << ", blocks " << blocks << ", min|det| " << min_det << ", F(0) " << f0
             << ", F'(0) " << f1 << ", min F''(0) " << f2min;
    o.require(det_rel <= 1e-10, "det direct vs factorized <= 1e-10");
    o.require(blocks <= 1e-10, "block relations <= 1e-10");
    o.require(min_det > 0.0 && std::isfinite(min_det), "min |det| > 0");
    o.require(f0 == 0.0, "F(0) = 0");
    o.require(f1 <= 1e-8, "F'(0) <= 1e-8 scaled");
    o.require(f2min > 0.0, "F''(0) > 0");
}

void criterion_8(Outcome& o) {
    ChargeDensity rho;
    GridSpec g{20.0, 32};
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> speed(0.0, 0.7), offset(-1.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const SolitonParams s{Vec3(offset(gen), offset(gen), offset(gen)), Vec3(speed(gen), 0, 0)};
        const PhaseState Y = bumped_soliton(s, rho, g, 0.05, gen);
        const ProjectionResult p = project_to_manifold(Y, guess_from_state(Y), rho);
        // Recentre the transversal part on the soliton.
        PhaseState Z = p.Z;
        Z.psi = translate(Z.psi, -p.sigma.b);
        const OrthogonalityResiduals r = orthogonality_check(Z, p.sigma.v, rho);
        worst = std::max(worst, (r.first.norm() + r.second.norm()) / Z.energy_norm());
    }
    double weakest = INFINITY;
    for (double s : {0.0, 0.4, 0.7}) {
        const Vec3 v(s, 0, 0);
        const TangentBasis tb = tangent_basis(v, rho, g);
        for (int j = 0; j < 6; ++j) {
            const OrthogonalityResiduals r = orthogonality_check(tb[j], v, rho);
            weakest = std::min(weakest, (r.first.norm() + r.second.norm()) / tb[j].energy_norm());
        }
    }
    o.detail << "projected states " << worst << ", tangent directions >= " << weakest;
    o.require(worst <= 1e-6, "projected residuals <= 1e-6 scaled");
    o.require(weakest > 1e-2, "tangent residuals > 1e-2 scaled");
}

void criterion_9(Outcome& o) {
    for (double s : {0.0, 0.6}) {
        RunConfig c;
        c.kind = ExperimentKind::Decay;
        c.grid = GridSpec{80.0, 64};
        c.nu = 3.0;
        c.v = Vec3(s, 0, 0);
        c.fit_t_min = 5.0;
        c.fit_t_max = 25.0;
        c.T = 25.0;
        const DecayReport r = run_free_decay(c);
        o.detail << "v=" << s << ": exponent " << r.fit.exponent << " on [" << r.fit.t_min << ", " << r.fit.t_max
                 << "]; ";
        o.require(decay_exponent_ok(r.fit), "exponent within -1.5 +- 0.2 at v=" + std::to_string(s));
        o.require(r.fit.t_max >= 25.0, "full window [5, 25] valid");
    }
}

void criterion_10(Outcome& o) {
    RunConfig base;
    base.grid = GridSpec{80.0, 64};
    base.v = Vec3(0.3, 0, 0);
    base.dt = 0.02;
    {
        RunConfig c = base;
        c.kind = ExperimentKind::Soliton;
        c.epsilon = 0.0;
        c.T = 10.0;
        const PersistenceReport r = run_soliton_persistence(c);
        o.detail << "soliton |v(T)-v| " << r.final_velocity_error << "; ";
        o.require(r.final_velocity_error <= 1e-4, "soliton drift <= 1e-4");
    }
    {
        RunConfig c = base;
        c.kind = ExperimentKind::Scatter;
        c.epsilon = 0.05;
        c.T = 30.0;
        const ScatterReport r = run_scattering(c);
        o.detail << "scatter captured " << r.captured << ", v+ " << r.v_plus.transpose() << ", |qdot-v+| by quarter";
        for (double d : r.velocity_deviation) o.detail << " " << d;
        if (r.z_fit) o.detail << ", Z exponent " << r.z_fit->exponent << " on [" << r.z_fit->t_min << ", " << r.z_fit->t_max << "]";
        o.detail << ", Cauchy " << r.cauchy_half << " -> " << r.cauchy_full;
        o.require(scattering_ok(r), "capture, decreasing |v-v+|, Z exponent <= -1, decreasing Cauchy difference");
    }
}

}  // namespace

int main() {
    set_threads(omp_get_max_threads());
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
        {"algebraic exactness", criterion_1},
        {"propagator unitarity and group law", criterion_2},
        {"soliton residual and force balance", criterion_3},
        {"linearized identities", criterion_4},
        {"Omega+ positive definite", criterion_5},
        {"projection contract", criterion_6},
        {"spectral matrix suite", criterion_7},
        {"orthogonality equivalence", criterion_8},
        {"free weighted decay", criterion_9},
        {"soliton persistence and scattering", criterion_10},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.ok) ++failures;
        std::printf("%s criterion %zu (%s, %.1f s): %s\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    secs, o.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 4;
}
