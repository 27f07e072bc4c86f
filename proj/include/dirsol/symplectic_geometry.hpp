#pragma once

#include <stdexcept>
#include <vector>

#include "dirsol/kspace_quadrature.hpp"
#include "dirsol/soliton_manifold.hpp"

namespace dirsol {

using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

// Omega(Y1, Y2) = <psi1^1, psi2^2> - <psi2^1, psi1^2> + q^1.p^2 - p^1.q^2 = Im <psi^1, psi^2> + ...
double omega(const PhaseState& Y1, const PhaseState& Y2);

// full(i, j) = Omega(tau_i, tau_j); block = Omega^+ (upper right).
struct OmegaMatrix {
    Mat6 full = Mat6::Zero();
    Mat3 block = Mat3::Zero();
    QuadResult K;

    double min_eigenvalue() const;
};

// Omega^+(v) = K + gamma E + gamma^3 v (x) v with
// K_jl = \int k_j k_l B (k^2 + m^2 + 3 (v.k)^2) / (k^2 + m^2 - (v.k)^2)^3 dk.
OmegaMatrix omega_plus(const Vec3& v, const ChargeDensity& rho, const QuadratureSpec& quad);

// Omega(tau_i, tau_j) from grid inner products.
Mat6 omega_matrix_on_grid(const TangentBasis& tb);

struct OmegaComparison {
    Mat6 grid;
    Mat6 closed_form;
    double max_abs_difference = 0.0;
    double max_relative_difference = 0.0;  // relative to the largest closed-form entry
};
OmegaComparison omega_vs_direct(const Vec3& v, const ChargeDensity& rho, const GridSpec& g,
                                const QuadratureSpec& quad);

// Z - sum_j c_j tau_j with Omega(result, tau_l) = 0 for all l.
PhaseState symplectic_complement(const PhaseState& Z, const TangentBasis& tb);

class ProjectionFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ProjectionOptions {
    int max_iterations = 40;
    double tolerance = 1e-10;
    // When false, the Jacobian is the constant matrix -Omega(tau_l, tau_j) (linear convergence).
    bool exact_jacobian = true;
};

struct ProjectionResult {
    SolitonParams sigma;
    PhaseState Z;
    Vec6 residuals = Vec6::Zero();      // Omega(Z, tau_j(sigma))
    std::vector<double> history;        // max |residual| per iteration, starting with the guess
    int iterations = 0;
};

// Solves Omega(Y - S(sigma), tau_j(sigma)) = 0, j = 1..6, by damped Newton iteration.
// Throws ProjectionFailure when the iteration does not converge.
ProjectionResult project_to_manifold(const PhaseState& Y, const SolitonParams& guess, const ChargeDensity& rho,
                                     const ProjectionOptions& opt = {});

// Initial guess (q, v(p)) read from the state.
SolitonParams guess_from_state(const PhaseState& Y);

}  // namespace dirsol
