#include "dirsol/linearized_spectral.hpp"

#include <cmath>
#include <numbers>

namespace dirsol {

namespace {
const cplx I(0.0, 1.0);
constexpr double pi = std::numbers::pi;

double gamma_of(const Vec3& v) {
    require_subluminal(v);
    return 1.0 / std::sqrt(1.0 - v.squaredNorm());
}
}  // namespace

LinearizedOperator make_linearized_operator(const Vec3& v, const Vec3& w, const ChargeDensity& rho,
                                            const GridSpec& g) {
    require_subluminal(v);
    LinearizedOperator op;
    op.v = v;
    op.w = w;
    op.rho = rho;
    op.grid = g;
    op.psi_v = soliton_field(v, rho, g);
    const SpinorField& f = op.psi_v;
    // Re<d_i psi_v, d_l rho> = Re sum (-i k_i psi_hat)_1 conj(-i k_l rho_hat) = sum k_i k_l Re(psi_hat_1) rho_hat
    op.coupling = reduce_modes(g, Mat3(Mat3::Zero()), [&](std::size_t idx, const Vec3& k, bool in_band) -> Mat3 {
        if (!in_band) return Mat3::Zero();
        return (f.at(idx)[0].real() * rho.rho1_hat(k)) * (k * k.transpose());
    }) * g.mode_volume();
    return op;
}

PhaseState apply_A(const LinearizedOperator& op, const PhaseState& Z) {
    if (!(Z.psi.grid() == op.grid)) throw std::invalid_argument("state grid differs from operator grid");
    const SpinorField in = Z.psi.to_fourier();
    PhaseState out = PhaseState::zero(op.grid);
    const double m = op.rho.mass;
    // Fourier symbol of -alpha.grad - i beta m + w.grad is -i (h + w.k); i Q.grad rho -> (Q.k) rho_hat.
    for_each_mode(op.grid, [&](std::size_t idx, const Vec3& k, bool in_band) {
        Spinor r = -I * (apply_dirac_symbol(k, m, in.at(idx)) + op.w.dot(k) * in.at(idx));
        if (in_band) r[0] += Z.q.dot(k) * op.rho.rho1_hat(k);
        out.psi.at(idx) = r;
    });
    out.q = matrix_Bv(op.v) * Z.p;
    out.p = particle_force(in, Vec3::Zero(), op.rho) + op.coupling * Z.q;
    return out;
}

Mat3 matrix_Bv(const Vec3& v) { return (Mat3::Identity() - v * v.transpose()) / gamma_of(v); }

double branch_point(const Vec3& v, double m) { return m / gamma_of(v); }

Mat3 frame_rotation(const Vec3& v) {
    const double s = v.norm();
    if (s == 0.0) return Mat3::Identity();
    const Eigen::Quaterniond q = Eigen::Quaterniond::FromTwoVectors(v / s, Vec3::UnitX());
    return q.toRotationMatrix();
}

void require_frame(const Vec3& v) {
    require_subluminal(v);
    if (v[0] < 0.0 || std::abs(v[1]) > 1e-14 || std::abs(v[2]) > 1e-14)
        throw std::invalid_argument("spectral matrices require the frame v = (|v|, 0, 0); use frame_rotation");
}

cplx g_lambda(const Vec3& y, cplx lambda, const Vec3& v, double m) {
    const double g = gamma_of(v);
    const double speed = v.norm();
    const Vec3 e = speed > 0.0 ? Vec3(v / speed) : Vec3(Vec3::UnitX());
    const double y_par = y.dot(e);
    const Vec3 y_perp = y - y_par * e;
    const double yt1 = g * y_par;
    const double r = std::sqrt(yt1 * yt1 + y_perp.squaredNorm());
    if (r == 0.0) throw std::domain_error("g_lambda is singular at y = 0");
    const double mu = m / g;
    const cplx kappa = g * std::sqrt(lambda * lambda + mu * mu);
    if (!(kappa.real() > 0.0)) throw std::domain_error("g_lambda needs Re kappa > 0");
    const cplx kappa1 = g * speed * lambda;
    return g * std::exp(-kappa * r - kappa1 * yt1) / (4.0 * pi * r);
}

QuadResult matrix_L(const Vec3& v, const ChargeDensity& rho, const QuadratureSpec& quad) {
    require_frame(v);
    const double m2 = rho.mass * rho.mass;
    return moment_quadrature(rho, quad, [&](const Vec3& k) {
        const double s = v[0] * k[0];
        return 1.0 / (k.squaredNorm() + m2 - s * s);
    });
}

CMat3 matrix_H(cplx lambda, const Vec3& v, const ChargeDensity& rho) {
    require_frame(v);
    return h_diagonal(lambda, v[0], rho).asDiagonal();
}

CMat3 matrix_H_boundary(double omega, const Vec3& v, const ChargeDensity& rho) {
    require_frame(v);
    return h_diagonal_boundary(omega, v[0], rho).asDiagonal();
}

CMat3 matrix_H_extrapolated(double omega, const Vec3& v, const ChargeDensity& rho) {
    require_frame(v);
    const double e[3] = {1e-2, 1e-3, 1e-4};
    CVec3 h[3];
    for (int i = 0; i < 3; ++i) h[i] = h_diagonal(cplx(e[i], omega), v[0], rho);
    // Quadratic through the three samples, evaluated at eps = 0.
    CVec3 out = CVec3::Zero();
    for (int i = 0; i < 3; ++i) {
        double w = 1.0;
        for (int j = 0; j < 3; ++j)
            if (j != i) w *= (0.0 - e[j]) / (e[i] - e[j]);
        out += w * h[i];
    }
    return out.asDiagonal();
}

CMat3 matrix_F(double omega, const Vec3& v, const ChargeDensity& rho) {
    return matrix_H_boundary(omega, v, rho) - matrix_H_boundary(0.0, v, rho);
}

namespace {
CMat6 assemble_M(cplx lambda, const Vec3& v, const CMat3& LminusH) {
    CMat6 M = CMat6::Zero();
    M.block<3, 3>(0, 0) = lambda * CMat3::Identity();
    M.block<3, 3>(0, 3) = -matrix_Bv(v).cast<cplx>();
    M.block<3, 3>(3, 0) = LminusH;
    M.block<3, 3>(3, 3) = lambda * CMat3::Identity();
    return M;
}
}  // namespace

CMat6 matrix_M(cplx lambda, const Vec3& v, const ChargeDensity& rho) {
    return assemble_M(lambda, v, matrix_H(0.0, v, rho) - matrix_H(lambda, v, rho));
}

CMat6 matrix_M_boundary(double omega, const Vec3& v, const ChargeDensity& rho) {
    return assemble_M(cplx(0.0, omega), v, -matrix_F(omega, v, rho));
}

cplx det_M_direct(double omega, const Vec3& v, const ChargeDensity& rho) {
    return matrix_M_boundary(omega, v, rho).determinant();
}

cplx det_M_factorized(double omega, const Vec3& v, const ChargeDensity& rho) {
    const double g = gamma_of(v);
    const CMat3 F = matrix_F(omega, v, rho);
    const double a[3] = {g * g * g, g, g};
    cplx d = -1.0;
    for (int j = 0; j < 3; ++j) d *= omega * omega + F(j, j) / a[j];
    return d;
}

FjjChecks F_jj_checks(const Vec3& v, const ChargeDensity& rho, const QuadratureSpec& quad, double h) {
    require_frame(v);
    if (!(h > 0.0) || h >= 0.5 * branch_point(v, rho.mass))
        throw std::invalid_argument("finite-difference step must lie inside (0, mu/2)");
    auto F = [&](double w) { return matrix_F(w, v, rho).diagonal().real().eval(); };
    FjjChecks c;
    c.step = h;
    const Vec3 f0 = F(0.0);
    const Vec3 fp = F(h), fm = F(-h), fp2 = F(0.5 * h), fm2 = F(-0.5 * h);
    c.F0 = f0;
    c.F1 = (fp - fm) / (2.0 * h);
    const Vec3 d_h = (fp - 2.0 * f0 + fm) / (h * h);
    const Vec3 d_h2 = (fp2 - 2.0 * f0 + fm2) / (0.25 * h * h);
    c.F2 = (4.0 * d_h2 - d_h) / 3.0;
    const double m2 = rho.mass * rho.mass;
    const double s2 = v[0] * v[0];
    const QuadResult q = moment_quadrature(rho, quad, [&](const Vec3& k) {
        const double d = k.squaredNorm() + m2 - s2 * k[0] * k[0];
        return 2.0 * (k.squaredNorm() + m2 + 3.0 * s2 * k[0] * k[0]) / (d * d * d);
    });
    c.F2_integrand = q.value.diagonal();
    return c;
}

MinvBlocks Minv_blocks(double omega, const Vec3& v, const ChargeDensity& rho) {
    require_frame(v);
    MinvBlocks b;
    const Mat3 B = matrix_Bv(v);
    const CMat3 Binv = B.inverse().cast<cplx>();
    if (std::abs(omega) < 1e-6) {
        // Per block j: [[i w, -b_j], [-F_j, i w]]^{-1} with F_j = w^2 f_j and f_j(0) = F''_jj(0)/2.
        b.factorized = true;
        const FjjChecks c = F_jj_checks(v, rho, QuadratureSpec::for_density(rho));
        b.M11 = b.M12 = b.M21 = b.M22 = CMat3::Zero();
        for (int j = 0; j < 3; ++j) {
            const double bj = B(j, j);
            const double fj = 0.5 * c.F2[j];
            const double den = 1.0 + bj * fj;  // (w^2 + b F) / w^2
            b.M11(j, j) = -I / den;
            b.M22(j, j) = -I / den;
            b.M12(j, j) = -bj / den;
            b.M21(j, j) = -fj / den;
        }
    } else {
        const CMat6 Minv = matrix_M_boundary(omega, v, rho).inverse();
        b.M11 = omega * Minv.block<3, 3>(0, 0);
        b.M12 = omega * omega * Minv.block<3, 3>(0, 3);
        b.M21 = Minv.block<3, 3>(3, 0);
        b.M22 = omega * Minv.block<3, 3>(3, 3);
    }
    b.relation_22_11 = (b.M22 - b.M11).cwiseAbs().maxCoeff();
    b.relation_11_12 = (b.M11 - I * b.M12 * Binv).cwiseAbs().maxCoeff();
    return b;
}

namespace {
// G_i(lambda) = sum i k_i rho_hat [ (lambda + i s + i h)^{-1} Psi0 ]_1 dk^3 with s = v.k,
// and (lambda + i s + i h)^{-1} = (lambda + i s - i h) / ((lambda + i s)^2 + k^2 + m^2).
CVec3 laplace_pairing(const SpinorField& f, cplx lambda, const Vec3& v, const ChargeDensity& rho) {
    const double m = rho.mass;
    const CVec3 s = reduce_modes(f.grid(), CVec3(CVec3::Zero()), [&](std::size_t idx, const Vec3& k, bool in_band) -> CVec3 {
        if (!in_band) return CVec3::Zero();
        const Mat4 h = dirac_symbol(k, m);
        const cplx mu = lambda + I * v.dot(k);
        const cplx den = mu * mu + k.squaredNorm() + m * m;
        const Spinor u = f.at(idx);
        const cplx first = (mu * u[0] - I * (h.row(0) * u)(0, 0)) / den;
        return (I * rho.rho1_hat(k) * first) * k.cast<cplx>();
    });
    return s * f.grid().mode_volume();
}
}  // namespace

CVec3 phi_lambda(const SpinorField& Psi0, cplx lambda, const Vec3& v, const ChargeDensity& rho) {
    require_subluminal(v);
    if (lambda.real() < 0.0) throw std::invalid_argument("phi_lambda needs Re lambda >= 0");
    const SpinorField f = Psi0.to_fourier();
    // Phi is the transform of a real signal: Phi(lambda) = (G(lambda) + conj(G(conj lambda))) / 2.
    const CVec3 a = laplace_pairing(f, lambda, v, rho);
    const CVec3 b = laplace_pairing(f, std::conj(lambda), v, rho);
    return 0.5 * (a + b.conjugate());
}

Vec3 phi_prime_zero(const SpinorField& Psi0, const Vec3& v, const ChargeDensity& rho) {
    require_subluminal(v);
    const SpinorField f = Psi0.to_fourier();
    const double m = rho.mass;
    // d/dlambda (lambda - i(X - s))^{-1} at 0 equals (X + s)^2 / d^2 with X = -h, d = k^2 + m^2 - s^2.
    const Vec3 s = reduce_modes(f.grid(), Vec3(Vec3::Zero()), [&](std::size_t idx, const Vec3& k, bool in_band) -> Vec3 {
        if (!in_band) return Vec3::Zero();
        const double sv = v.dot(k);
        const double d = k.squaredNorm() + m * m - sv * sv;
        const Mat4 W = sv * Mat4::Identity() - dirac_symbol(k, m);
        const cplx first = ((W * W).row(0) * f.at(idx))(0, 0) / (d * d);
        return (I * rho.rho1_hat(k) * first).real() * k;
    });
    return s * f.grid().mode_volume();
}

OrthogonalityResiduals orthogonality_check(const PhaseState& Z0, const Vec3& v, const ChargeDensity& rho) {
    OrthogonalityResiduals r;
    r.first = Z0.p + phi_lambda(Z0.psi, 0.0, v, rho).real();
    r.second = matrix_Bv(v).inverse() * Z0.q + phi_prime_zero(Z0.psi, v, rho);
    return r;
}

}  // namespace dirsol
