#include "dirsol/spinor_algebra.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dirsol {

namespace {

Mat4 block_offdiag(const Eigen::Matrix2cd& s) {
    Mat4 a = Mat4::Zero();
    a.block<2, 2>(0, 2) = s;
    a.block<2, 2>(2, 0) = s;
    return a;
}

}  // namespace

const Mat4& DiracMatrices::alpha(int j) const {
    switch (j) {
        case 1: return alpha1;
        case 2: return alpha2;
        case 3: return alpha3;
        default: throw std::out_of_range("alpha index must be 1, 2 or 3");
    }
}

const Mat4& DiracMatrices::by_index(int j) const { return j == 0 ? beta : alpha(j); }

DiracMatrices build_dirac_matrices() {
    const cplx I(0.0, 1.0);
    Eigen::Matrix2cd s1, s2, s3;
    s1 << 0, 1, 1, 0;
    s2 << 0, -I, I, 0;
    s3 << 1, 0, 0, -1;
    DiracMatrices d;
    d.alpha1 = block_offdiag(s1);
    d.alpha2 = block_offdiag(s2);
    d.alpha3 = block_offdiag(s3);
    d.beta = Mat4::Zero();
    d.beta.diagonal() << 1, 1, -1, -1;
    return d;
}

const DiracMatrices& dirac() {
    static const DiracMatrices d = build_dirac_matrices();
    return d;
}

std::array<double, 3> real_orthogonality(const RSpinor& psi) {
    const auto& d = dirac();
    const Spinor c = psi.cast<cplx>();
    // beta, alpha1, alpha3 are real, so r1 and r3 are real. alpha2 is purely imaginary,
    // so alpha2 psi . psi is purely imaginary and its imaginary part carries the value.
    auto dot = [](const Spinor& a, const Spinor& b) { return (a.transpose() * b)(0, 0); };
    return {dot(d.beta * c, d.alpha1 * c).real(), dot(d.beta * c, d.alpha3 * c).real(),
            dot(d.alpha2 * c, c).imag()};
}

double ChargeDensity::rho1(const Vec3& x) const {
    return amplitude * std::exp(-x.squaredNorm() / (2.0 * sigma * sigma));
}

double ChargeDensity::rho1_hat(double k2) const {
    return amplitude * sigma * sigma * sigma * std::exp(-0.5 * k2 * sigma * sigma);
}

double ChargeDensity::l2_norm() const {
    // \int A^2 exp(-|x|^2/sigma^2) dx = A^2 (pi sigma^2)^{3/2}
    return amplitude * std::pow(std::numbers::pi * sigma * sigma, 0.75);
}

void ChargeDensity::validate() const {
    // amplitude = 0 is admitted (decoupled dynamics); the Wiener symbol then vanishes.
    if (!(sigma > 0.0) || !(mass > 0.0) || !std::isfinite(amplitude))
        throw std::invalid_argument("charge density requires sigma > 0, m > 0 and finite amplitude");
}

double wiener_B(double k2, const ChargeDensity& rho) {
    const double r = rho.rho1_hat(k2);
    return rho.mass * r * r;
}

double wiener_B(const Vec3& k, const ChargeDensity& rho) { return wiener_B(k.squaredNorm(), rho); }

}  // namespace dirsol
