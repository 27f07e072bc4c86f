#pragma once

#include "dirsol/field_grid.hpp"

namespace dirsol {

// Y = (psi, q, p). The field is stored as one complex spinor; psi1 = Re psi and psi2 = Im psi.
struct PhaseState {
    SpinorField psi;
    Vec3 q = Vec3::Zero();
    Vec3 p = Vec3::Zero();

    PhaseState() = default;
    PhaseState(SpinorField f, const Vec3& q0, const Vec3& p0) : psi(std::move(f)), q(q0), p(p0) {}
    static PhaseState zero(const GridSpec& g, Rep r = Rep::Fourier) { return {SpinorField(g, r), Vec3::Zero(), Vec3::Zero()}; }

    // Real and imaginary parts as separate real-valued spinor fields (position representation).
    SpinorField psi1() const;
    SpinorField psi2() const;
    static PhaseState from_real_pair(const SpinorField& psi1, const SpinorField& psi2, const Vec3& q, const Vec3& p);

    PhaseState& operator+=(const PhaseState& o);
    PhaseState& operator-=(const PhaseState& o);
    PhaseState& operator*=(double s);

    // ||psi||_0 + |q| + |p|
    double energy_norm() const { return psi.l2_norm() + q.norm() + p.norm(); }
};

PhaseState operator+(PhaseState a, const PhaseState& b);
PhaseState operator-(PhaseState a, const PhaseState& b);
PhaseState operator*(double s, PhaseState a);

}  // namespace dirsol
