#pragma once

#include <array>

#include "dirsol/phase_state.hpp"

namespace dirsol {

using Mat3 = Eigen::Matrix3d;

// A point sigma = (b, v) of the solitary manifold; |v| < 1.
struct SolitonParams {
    Vec3 b = Vec3::Zero();
    Vec3 v = Vec3::Zero();

    double gamma() const;
    void validate() const;
};

void require_subluminal(const Vec3& v);

// p_v = gamma v
Vec3 soliton_momentum(const Vec3& v);
// Inverse map v(p) = p / sqrt(1 + p^2).
Vec3 velocity_from_momentum(const Vec3& p);
// Column j holds d p_v / d v_j = gamma e_j + gamma^3 v_j v.
Mat3 momentum_jacobian(const Vec3& v);
// d^2 p_v / (d v_j d v_l), returned as [l](i, j).
std::array<Mat3, 3> momentum_hessian(const Vec3& v);

// Closed-form Fourier data of the soliton at a single mode. d = k^2 + m^2 - (v.k)^2.
struct SolitonMode {
    Spinor rho;                  // rho_hat(k) as a spinor
    Spinor psi;                  // psi_hat_v(k) = (v.k + alpha.k - beta m) rho_hat / d
    std::array<Spinor, 3> dv;    // d psi_hat / d v_j = k_j (rho_hat + 2 (v.k) psi_hat) / d
};
SolitonMode soliton_mode(const Vec3& k, bool in_band, const Vec3& v, const ChargeDensity& rho);
// d^2 psi_hat / (d v_j d v_l) = k_j k_l (4 s rho_hat / d^2 + 2 psi_hat / d + 8 s^2 psi_hat / d^2).
Spinor soliton_mode_dvdv(const Vec3& k, const SolitonMode& mode, const Vec3& v, double m, int j, int l);

// Charge density on the grid, band-limited (Fourier representation).
SpinorField rho_field(const ChargeDensity& rho, const GridSpec& g);

// psi_v on the grid in the moving coordinate y (Fourier representation).
SpinorField soliton_field(const Vec3& v, const ChargeDensity& rho, const GridSpec& g);

// S(sigma) = (psi_v(x - b), b, p_v).
PhaseState soliton_state(const SolitonParams& s, const ChargeDensity& rho, const GridSpec& g);

// tau_j = (-d_j psi_v, e_j, 0), tau_{j+3} = (d_{v_j} psi_v, 0, d_{v_j} p_v), translated by b.
using TangentBasis = std::array<PhaseState, 6>;
TangentBasis tangent_basis(const Vec3& v, const ChargeDensity& rho, const GridSpec& g);
TangentBasis tangent_basis(const SolitonParams& s, const ChargeDensity& rho, const GridSpec& g);

// ||(-i v.grad - (-i alpha.grad + beta m)) psi_v - rho|| / ||rho|| with rho sampled pointwise.
double stationary_residual(const SpinorField& psi_v, const Vec3& v, const ChargeDensity& rho);

// Re <psi, grad rho> for a field in the moving coordinate.
Vec3 force_balance(const SpinorField& psi_v, const ChargeDensity& rho);

}  // namespace dirsol
