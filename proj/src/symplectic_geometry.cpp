#include "dirsol/symplectic_geometry.hpp"

#include <cmath>

namespace dirsol {

double omega(const PhaseState& Y1, const PhaseState& Y2) {
    return inner(Y1.psi, Y2.psi).imag() + Y1.q.dot(Y2.p) - Y1.p.dot(Y2.q);
}

double OmegaMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (block + block.transpose()));
    return es.eigenvalues().minCoeff();
}

OmegaMatrix omega_plus(const Vec3& v, const ChargeDensity& rho, const QuadratureSpec& quad) {
    require_subluminal(v);
    const double m2 = rho.mass * rho.mass;
    OmegaMatrix out;
    out.K = moment_quadrature(rho, quad, [&](const Vec3& k) {
        const double s2 = std::pow(v.dot(k), 2);
        const double d = k.squaredNorm() + m2 - s2;
        return (k.squaredNorm() + m2 + 3.0 * s2) / (d * d * d);
    });
    const double g = 1.0 / std::sqrt(1.0 - v.squaredNorm());
    out.block = out.K.value + g * Mat3::Identity() + g * g * g * v * v.transpose();
    out.full.block<3, 3>(0, 3) = out.block;
    out.full.block<3, 3>(3, 0) = -out.block;
    return out;
}

Mat6 omega_matrix_on_grid(const TangentBasis& tb) {
    Mat6 w;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) w(i, j) = omega(tb[i], tb[j]);
    return w;
}

OmegaComparison omega_vs_direct(const Vec3& v, const ChargeDensity& rho, const GridSpec& g,
                                const QuadratureSpec& quad) {
    OmegaComparison c;
    c.grid = omega_matrix_on_grid(tangent_basis(v, rho, g));
    c.closed_form = omega_plus(v, rho, quad).full;
    c.max_abs_difference = (c.grid - c.closed_form).cwiseAbs().maxCoeff();
    c.max_relative_difference = c.max_abs_difference / c.closed_form.cwiseAbs().maxCoeff();
    return c;
}

PhaseState symplectic_complement(const PhaseState& Z, const TangentBasis& tb) {
    Mat6 W;  // W(l, j) = Omega(tau_j, tau_l)
    Vec6 r;
    for (int l = 0; l < 6; ++l) {
        r[l] = omega(Z, tb[l]);
        for (int j = 0; j < 6; ++j) W(l, j) = omega(tb[j], tb[l]);
    }
    const Vec6 c = W.fullPivLu().solve(r);
    PhaseState out = Z;
    for (int j = 0; j < 6; ++j) out -= c[j] * tb[j];
    return out;
}

SolitonParams guess_from_state(const PhaseState& Y) { return {Y.q, velocity_from_momentum(Y.p)}; }

namespace {

struct Linearization {
    Vec6 R = Vec6::Zero();
    Mat6 J = Mat6::Zero();
};

// Residuals R_j = Omega(Y - S(sigma), tau_j(sigma)) and J_jl = dR_j / d sigma_l
//   = -Omega(tau_l, tau_j) + Omega(Z, d_l tau_j),
// with every soliton quantity evaluated mode by mode from its closed form.
Linearization linearize(const SpinorField& psi_hat, const Vec3& q, const Vec3& p, const SolitonParams& s,
                        const ChargeDensity& rho, bool exact) {
    const GridSpec& g = psi_hat.grid();
    const double m = rho.mass;
    const cplx I(0.0, 1.0);
    struct Acc {
        Vec6 R = Vec6::Zero();
        Mat6 Z = Mat6::Zero();     // Omega(Z, d_l tau_j), field part; (j, l)
        Mat6 G = Mat6::Zero();     // Omega(tau_l, tau_j), field part; (j, l)
        Acc& operator+=(const Acc& o) { R += o.R; Z += o.Z; G += o.G; return *this; }
    };
    Acc acc = reduce_modes(g, Acc{}, [&](std::size_t idx, const Vec3& k, bool in_band) -> Acc {
        Acc a;
        if (!in_band) return a;
        const SolitonMode md = soliton_mode(k, true, s.v, rho);
        const cplx e = std::polar(1.0, k.dot(s.b));
        std::array<Spinor, 6> tau;
        for (int j = 0; j < 3; ++j) {
            tau[j] = e * I * k[j] * md.psi;
            tau[j + 3] = e * md.dv[j];
        }
        const Spinor z = Eigen::Map<const Spinor>(psi_hat.data().data() + 4 * idx) - e * md.psi;
        for (int j = 0; j < 6; ++j) {
            a.R[j] = z.dot(tau[j]).imag();  // Eigen dot conjugates the first argument
            for (int l = 0; l < 6; ++l) a.G(j, l) = tau[l].dot(tau[j]).imag();
        }
        if (exact) {
            for (int j = 0; j < 6; ++j)
                for (int l = 0; l < 6; ++l) {
                    Spinor d;
                    if (l < 3) {
                        d = I * k[l] * tau[j];
                    } else if (j < 3) {
                        d = e * I * k[j] * md.dv[l - 3];
                    } else {
                        d = e * soliton_mode_dvdv(k, md, s.v, m, j - 3, l - 3);
                    }
                    a.Z(j, l) = z.dot(d).imag();
                }
        }
        return a;
    });
    const double w = g.mode_volume();
    Linearization out;
    const Vec3 dq = q - s.b;
    const Vec3 dp = p - soliton_momentum(s.v);
    const Mat3 pj = momentum_jacobian(s.v);
    for (int j = 0; j < 6; ++j) {
        // particle parts: tau_j = (e_j, 0), tau_{j+3} = (0, pj.col(j))
        const Vec3 tq = j < 3 ? Vec3(Vec3::Unit(j)) : Vec3(Vec3::Zero());
        const Vec3 tp = j < 3 ? Vec3(Vec3::Zero()) : Vec3(pj.col(j - 3));
        out.R[j] = acc.R[j] * w + dq.dot(tp) - dp.dot(tq);
        for (int l = 0; l < 6; ++l) {
            const Vec3 lq = l < 3 ? Vec3(Vec3::Unit(l)) : Vec3(Vec3::Zero());
            const Vec3 lp = l < 3 ? Vec3(Vec3::Zero()) : Vec3(pj.col(l - 3));
            const double G = acc.G(j, l) * w + lq.dot(tp) - lp.dot(tq);
            out.J(j, l) = -G;
        }
    }
    if (exact) {
        const auto hess = momentum_hessian(s.v);
        for (int j = 0; j < 6; ++j)
            for (int l = 0; l < 6; ++l) {
                double part = 0.0;
                if (j >= 3 && l >= 3) part = dq.dot(hess[l - 3].col(j - 3));
                out.J(j, l) += acc.Z(j, l) * w + part;
            }
    }
    return out;
}

}  // namespace

ProjectionResult project_to_manifold(const PhaseState& Y, const SolitonParams& guess, const ChargeDensity& rho,
                                     const ProjectionOptions& opt) {
    guess.validate();
    const SpinorField psi_hat = Y.psi.to_fourier();
    ProjectionResult res;
    SolitonParams s = guess;
    Linearization lin = linearize(psi_hat, Y.q, Y.p, s, rho, opt.exact_jacobian);
    double rnorm = lin.R.cwiseAbs().maxCoeff();
    res.history.push_back(rnorm);
    auto scale = [&](const SolitonParams& sp) {
        return 1.0 + (Y - soliton_state(sp, rho, psi_hat.grid())).energy_norm();
    };
    double tol_abs = opt.tolerance * scale(s);
    int it = 0;
    while (rnorm > tol_abs) {
        if (it >= opt.max_iterations)
            throw ProjectionFailure("projection did not converge (residual " + std::to_string(rnorm) + ")");
        const Vec6 delta = lin.J.fullPivLu().solve(-lin.R);
        if (!delta.allFinite()) throw ProjectionFailure("projection Jacobian is singular");
        // Backtracking: halve the step until the residual decreases and |v| < 1.
        double t = 1.0;
        bool accepted = false;
        for (int h = 0; h < 30; ++h, t *= 0.5) {
            SolitonParams trial = s;
            trial.b += t * delta.head<3>();
            trial.v += t * delta.tail<3>();
            if (!(trial.v.squaredNorm() < 1.0)) continue;
            Linearization tl = linearize(psi_hat, Y.q, Y.p, trial, rho, opt.exact_jacobian);
            const double tn = tl.R.cwiseAbs().maxCoeff();
            if (tn < rnorm || tn <= tol_abs) {
                s = trial;
                lin = tl;
                rnorm = tn;
                accepted = true;
                break;
            }
        }
        ++it;
        res.history.push_back(rnorm);
        if (!accepted) {
            // Stagnation at the rounding floor counts as converged only if within tolerance.
            if (rnorm <= tol_abs) break;
            throw ProjectionFailure("projection stalled (residual " + std::to_string(rnorm) + ")");
        }
        if (it % 4 == 0) tol_abs = opt.tolerance * scale(s);
    }
    res.sigma = s;
    res.Z = Y - soliton_state(s, rho, psi_hat.grid());
    res.residuals = lin.R;
    res.iterations = it;
    return res;
}

}  // namespace dirsol
