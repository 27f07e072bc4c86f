#pragma once

#include <functional>

#include "dirsol/spinor_algebra.hpp"

namespace dirsol {

using Mat3 = Eigen::Matrix3d;
using CMat3 = Eigen::Matrix3cd;

// Tensor-product trapezoid rule on [-k_max, k_max]^3. The error estimate is the difference
// to the same rule with two thirds of the nodes.
struct QuadratureSpec {
    double k_max = 8.0;
    int nodes = 96;
    double tolerance = 1e-8;

    static QuadratureSpec for_density(const ChargeDensity& rho) { return {8.0 / rho.sigma, 96, 1e-8}; }
};

struct QuadResult {
    Mat3 value = Mat3::Zero();
    double error = 0.0;
    double tolerance = 1e-8;
    bool converged() const { return error <= tolerance; }
};

// \int k_i k_l B(k) w(k) dk for a scalar weight w.
QuadResult moment_quadrature(const ChargeDensity& rho, const QuadratureSpec& q,
                             const std::function<double(const Vec3&)>& weight);

// e^z E1(z) on the principal branch (cut along the negative real axis).
cplx exp_e1(cplx z);
// Boundary value e^x E1(x + i0 side) for real x; side = +1 or -1 selects the sheet for x < 0.
cplx exp_e1_boundary(double x, int side);

// Line integrals in k1 for the diagonal of
//   H(lambda) = \int k_i k_l B(k) / (k^2 + m^2 - (|v| k1 - i lambda)^2) dk
// after the transverse plane has been integrated in closed form (Gaussian B).
struct CutIntegralOptions {
    int grading_levels = 48;
};

// Diagonal of H at Re lambda > 0 (frame v = (|v|, 0, 0)).
Eigen::Vector3cd h_diagonal(cplx lambda, double speed, const ChargeDensity& rho,
                            const CutIntegralOptions& opt = {});
// Diagonal of the boundary value H(i omega + 0).
Eigen::Vector3cd h_diagonal_boundary(double omega, double speed, const ChargeDensity& rho,
                                     const CutIntegralOptions& opt = {});

}  // namespace dirsol
