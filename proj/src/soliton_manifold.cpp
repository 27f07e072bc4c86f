#include "dirsol/soliton_manifold.hpp"

#include <cmath>
#include <stdexcept>

namespace dirsol {

void require_subluminal(const Vec3& v) {
    if (!(v.squaredNorm() < 1.0)) throw std::invalid_argument("velocity must satisfy |v| < 1");
}

double SolitonParams::gamma() const {
    require_subluminal(v);
    return 1.0 / std::sqrt(1.0 - v.squaredNorm());
}

void SolitonParams::validate() const {
    require_subluminal(v);
    if (!b.allFinite()) throw std::invalid_argument("soliton position must be finite");
}

Vec3 soliton_momentum(const Vec3& v) {
    require_subluminal(v);
    return v / std::sqrt(1.0 - v.squaredNorm());
}

Vec3 velocity_from_momentum(const Vec3& p) { return p / std::sqrt(1.0 + p.squaredNorm()); }

Mat3 momentum_jacobian(const Vec3& v) {
    require_subluminal(v);
    const double g = 1.0 / std::sqrt(1.0 - v.squaredNorm());
    return g * Mat3::Identity() + g * g * g * v * v.transpose();
}

std::array<Mat3, 3> momentum_hessian(const Vec3& v) {
    require_subluminal(v);
    const double g = 1.0 / std::sqrt(1.0 - v.squaredNorm());
    const double g3 = g * g * g;
    const double g5 = g3 * g * g;
    std::array<Mat3, 3> out;
    for (int l = 0; l < 3; ++l) {
        Mat3 h;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                h(i, j) = g3 * v[l] * (i == j) + 3.0 * g5 * v[l] * v[i] * v[j] +
                          g3 * ((i == l) * v[j] + v[i] * (j == l));
        out[l] = h;
    }
    return out;
}

SolitonMode soliton_mode(const Vec3& k, bool in_band, const Vec3& v, const ChargeDensity& rho) {
    SolitonMode out;
    out.rho = Spinor::Zero();
    if (!in_band) {
        out.psi = Spinor::Zero();
        out.dv.fill(Spinor::Zero());
        return out;
    }
    const double m = rho.mass;
    const double s = v.dot(k);
    const double d = k.squaredNorm() + m * m - s * s;
    out.rho[0] = rho.rho1_hat(k);
    // (s - h) rho_hat with h = -alpha.k + beta m acting on r e_1:
    // alpha.k e_1 = (0, 0, k3, k1 + i k2) and beta e_1 = e_1.
    const double r = out.rho[0].real();
    out.psi << (s - m) * r, 0.0, k[2] * r, cplx(k[0], k[1]) * r;
    out.psi /= d;
    for (int j = 0; j < 3; ++j) out.dv[j] = k[j] * (out.rho + 2.0 * s * out.psi) / d;
    return out;
}

Spinor soliton_mode_dvdv(const Vec3& k, const SolitonMode& mode, const Vec3& v, double m, int j, int l) {
    const double s = v.dot(k);
    const double d = k.squaredNorm() + m * m - s * s;
    return k[j] * k[l] * (4.0 * s * mode.rho / (d * d) + 2.0 * mode.psi / d + 8.0 * s * s * mode.psi / (d * d));
}

SpinorField rho_field(const ChargeDensity& rho, const GridSpec& g) {
    SpinorField f(g, Rep::Fourier);
    for_each_mode(g, [&](std::size_t p, const Vec3& k, bool in_band) {
        if (in_band) f.at(p)[0] = rho.rho1_hat(k);
    });
    return f;
}

SpinorField soliton_field(const Vec3& v, const ChargeDensity& rho, const GridSpec& g) {
    require_subluminal(v);
    SpinorField f(g, Rep::Fourier);
    for_each_mode(g, [&](std::size_t p, const Vec3& k, bool in_band) {
        f.at(p) = soliton_mode(k, in_band, v, rho).psi;
    });
    return f;
}

PhaseState soliton_state(const SolitonParams& s, const ChargeDensity& rho, const GridSpec& g) {
    s.validate();
    return {translate(soliton_field(s.v, rho, g), s.b), s.b, soliton_momentum(s.v)};
}

TangentBasis tangent_basis(const Vec3& v, const ChargeDensity& rho, const GridSpec& g) {
    return tangent_basis(SolitonParams{Vec3::Zero(), v}, rho, g);
}

TangentBasis tangent_basis(const SolitonParams& sp, const ChargeDensity& rho, const GridSpec& g) {
    sp.validate();
    TangentBasis tb;
    for (auto& t : tb) t = PhaseState::zero(g);
    const Mat3 dp = momentum_jacobian(sp.v);
    for (int j = 0; j < 3; ++j) {
        tb[j].q = Vec3::Unit(j);
        tb[j + 3].p = dp.col(j);
    }
    const cplx I(0.0, 1.0);
    for_each_mode(g, [&](std::size_t p, const Vec3& k, bool in_band) {
        const SolitonMode md = soliton_mode(k, in_band, sp.v, rho);
        const cplx shift = std::polar(1.0, k.dot(sp.b));
        for (int j = 0; j < 3; ++j) {
            // -d_j <-> +i k_j
            tb[j].psi.at(p) = shift * I * k[j] * md.psi;
            tb[j + 3].psi.at(p) = shift * md.dv[j];
        }
    });
    return tb;
}

double stationary_residual(const SpinorField& psi_v, const Vec3& v, const ChargeDensity& rho) {
    const GridSpec& g = psi_v.grid();
    SpinorField r = psi_v.to_fourier();
    for_each_mode(g, [&](std::size_t p, const Vec3& k, bool) {
        const Spinor u = r.at(p);
        r.at(p) = -v.dot(k) * u - dirac_symbol(k, rho.mass) * u;
    });
    r = r.to_position();
    for_each_node(g, [&](std::size_t p, const Vec3& x) { r.at(p)[0] -= rho.rho1(x); });
    SpinorField rp(g, Rep::Position);
    for_each_node(g, [&](std::size_t p, const Vec3& x) { rp.at(p)[0] = rho.rho1(x); });
    return r.l2_norm() / rp.l2_norm();
}

Vec3 force_balance(const SpinorField& psi, const ChargeDensity& rho) {
    const SpinorField f = psi.to_fourier();
    // Re sum conj(-i k rho_hat) . psi_hat = Re sum i k rho_hat psi_hat_1
    const cplx I(0.0, 1.0);
    Vec3 out = reduce_modes(f.grid(), Vec3(Vec3::Zero()), [&](std::size_t p, const Vec3& k, bool in_band) -> Vec3 {
        if (!in_band) return Vec3::Zero();
        return (I * rho.rho1_hat(k) * f.at(p)[0]).real() * k;
    });
    return out * f.grid().mode_volume();
}

}  // namespace dirsol
