#pragma once

#include "dirsol/coupled_dynamics.hpp"

namespace dirsol {

using CMat6 = Eigen::Matrix<cplx, 6, 6>;
using CVec3 = Eigen::Vector3cd;

// A_{v,w}(Psi, Q, P) = ((-alpha.grad - i beta m + w.grad) Psi + i Q.grad rho,  B_v P,
//                       Re<Psi, grad rho> + Re<grad psi_v, Q.grad rho>)
// in the moving coordinate y, soliton centred at the origin.
struct LinearizedOperator {
    Vec3 v = Vec3::Zero();
    Vec3 w = Vec3::Zero();
    ChargeDensity rho;
    GridSpec grid;
    SpinorField psi_v;   // Fourier representation
    Mat3 coupling;       // coupling(i, l) = Re<d_i psi_v, d_l rho>  (equals -L on the continuum)
};

LinearizedOperator make_linearized_operator(const Vec3& v, const Vec3& w, const ChargeDensity& rho,
                                            const GridSpec& g);
PhaseState apply_A(const LinearizedOperator& op, const PhaseState& Z);

// B_v = gamma^{-1} (E - v (x) v)
Mat3 matrix_Bv(const Vec3& v);
// mu = m sqrt(1 - v^2)
double branch_point(const Vec3& v, double m);

// Rotation R with R v = |v| e_1; lab-frame matrices are R^T A R.
Mat3 frame_rotation(const Vec3& v);
void require_frame(const Vec3& v);

// Green kernel of (-Delta + m^2 + (lambda - v.grad)^2), i.e. of the symbol
// 1 / (k^2 + m^2 + (i v.k + lambda)^2), as a convolution kernel:
//   g(y) = gamma e^{-kappa |y~| - kappa_1 y~_1} / (4 pi |y~|),
//   y~ = (gamma y_par, y_perp), kappa^2 = gamma^2 (lambda^2 + mu^2), kappa_1 = gamma |v| lambda.
cplx g_lambda(const Vec3& y, cplx lambda, const Vec3& v, double m);

// L_il = \int k_i k_l B / (k^2 + m^2 - (v.k)^2) dk by the shared tensor rule.
QuadResult matrix_L(const Vec3& v, const ChargeDensity& rho, const QuadratureSpec& quad);

// H(lambda) for Re lambda > 0 (or lambda = 0); frame v = (|v|, 0, 0).
CMat3 matrix_H(cplx lambda, const Vec3& v, const ChargeDensity& rho);
// Boundary value H(i omega + 0).
CMat3 matrix_H_boundary(double omega, const Vec3& v, const ChargeDensity& rho);
// lim eps -> 0+ H(eps + i omega) by Richardson extrapolation over eps in {1e-2, 1e-3, 1e-4}.
CMat3 matrix_H_extrapolated(double omega, const Vec3& v, const ChargeDensity& rho);

// F(omega) = -L + H(i omega + 0), with L = H(0) from the same line integrals so that F(0) = 0.
CMat3 matrix_F(double omega, const Vec3& v, const ChargeDensity& rho);

// M(lambda) = [[lambda E, -B_v], [L - H(lambda), lambda E]].
CMat6 matrix_M(cplx lambda, const Vec3& v, const ChargeDensity& rho);
CMat6 matrix_M_boundary(double omega, const Vec3& v, const ChargeDensity& rho);
cplx det_M_direct(double omega, const Vec3& v, const ChargeDensity& rho);
// -prod_j (omega^2 + F_jj / gamma^{a_j}), a = (3, 1, 1).
cplx det_M_factorized(double omega, const Vec3& v, const ChargeDensity& rho);

struct FjjChecks {
    Vec3 F0, F1, F2;      // F(0), F'(0), F''(0) by finite differences
    Vec3 F2_integrand;    // 2 \int k_j^2 B (k^2 + m^2 + 3 v^2 k1^2) / (k^2 + m^2 - v^2 k1^2)^3 dk
    double step = 0.0;
};
FjjChecks F_jj_checks(const Vec3& v, const ChargeDensity& rho, const QuadratureSpec& quad, double h = 2e-3);

struct MinvBlocks {
    CMat3 M11, M12, M21, M22;       // omega M^{-1}_11, omega^2 M^{-1}_12, M^{-1}_21, omega M^{-1}_22
    double relation_22_11 = 0.0;    // max |M22 - M11|
    double relation_11_12 = 0.0;    // max |M11 - i M12 B_v^{-1}|
    bool factorized = false;        // true when |omega| < 1e-6
};
MinvBlocks Minv_blocks(double omega, const Vec3& v, const ChargeDensity& rho);

// Phi(lambda) = Laplace transform of Re<W(t) Psi0, grad rho>, W(t) = exp(t(-alpha.grad - i beta m + v.grad)).
// Real lambda >= 0 or Re lambda > 0.
CVec3 phi_lambda(const SpinorField& Psi0, cplx lambda, const Vec3& v, const ChargeDensity& rho);
// Closed-form derivative Phi'(0).
Vec3 phi_prime_zero(const SpinorField& Psi0, const Vec3& v, const ChargeDensity& rho);

struct OrthogonalityResiduals {
    Vec3 first;   // P0 + Phi(0)
    Vec3 second;  // B_v^{-1} Q0 + Phi'(0)
};
OrthogonalityResiduals orthogonality_check(const PhaseState& Z0, const Vec3& v, const ChargeDensity& rho);

}  // namespace dirsol
