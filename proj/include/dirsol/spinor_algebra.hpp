#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

namespace dirsol {

using cplx = std::complex<double>;
using Mat4 = Eigen::Matrix<cplx, 4, 4>;
using Spinor = Eigen::Matrix<cplx, 4, 1>;
using RSpinor = Eigen::Matrix<double, 4, 1>;
using Vec3 = Eigen::Vector3d;

// Standard representation: beta = diag(I, -I), alpha_j = [[0, s_j], [s_j, 0]].
struct DiracMatrices {
    Mat4 alpha1, alpha2, alpha3, beta;

    const Mat4& alpha(int j) const;  // j in {1,2,3}
    // Index 0 is beta, 1..3 are alpha_j.
    const Mat4& by_index(int j) const;
};

DiracMatrices build_dirac_matrices();
const DiracMatrices& dirac();

// Returns (beta psi . alpha1 psi, beta psi . alpha3 psi, alpha2 psi . psi) for real psi.
std::array<double, 3> real_orthogonality(const RSpinor& psi);

// rho(x) = (rho1(x), 0, 0, 0) with rho1 = A exp(-|x|^2 / (2 sigma^2)).
// Transform convention: rho_hat(k) = (2 pi)^{-3/2} \int e^{ikx} rho(x) dx.
struct ChargeDensity {
    double amplitude = 1.0;
    double sigma = 1.0;
    double mass = 1.0;

    double rho1(const Vec3& x) const;
    double rho1_hat(double k2) const;  // argument is |k|^2
    double rho1_hat(const Vec3& k) const { return rho1_hat(k.squaredNorm()); }
    double l2_norm() const;
    void validate() const;
};

// B(k) = m beta rho_hat . rho_hat; for the single-component model this is m rho1_hat^2.
double wiener_B(const Vec3& k, const ChargeDensity& rho);
double wiener_B(double k2, const ChargeDensity& rho);

}  // namespace dirsol
