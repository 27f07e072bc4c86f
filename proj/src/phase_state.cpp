#include "dirsol/phase_state.hpp"

namespace dirsol {

namespace {
SpinorField part(const SpinorField& f, bool imag) {
    SpinorField x = f.to_position();
    for (auto& z : x.data()) z = imag ? cplx(z.imag(), 0.0) : cplx(z.real(), 0.0);
    return x;
}
}  // namespace

SpinorField PhaseState::psi1() const { return part(psi, false); }
SpinorField PhaseState::psi2() const { return part(psi, true); }

PhaseState PhaseState::from_real_pair(const SpinorField& psi1, const SpinorField& psi2, const Vec3& q,
                                      const Vec3& p) {
    SpinorField a = psi1.to_position();
    const SpinorField b = psi2.to_position();
    for (std::size_t i = 0; i < a.data().size(); ++i) a.data()[i] = cplx(a.data()[i].real(), b.data()[i].real());
    return {a, q, p};
}

PhaseState& PhaseState::operator+=(const PhaseState& o) {
    psi += o.psi;
    q += o.q;
    p += o.p;
    return *this;
}

PhaseState& PhaseState::operator-=(const PhaseState& o) {
    psi -= o.psi;
    q -= o.q;
    p -= o.p;
    return *this;
}

PhaseState& PhaseState::operator*=(double s) {
    psi *= s;
    q *= s;
    p *= s;
    return *this;
}

PhaseState operator+(PhaseState a, const PhaseState& b) { return a += b; }
PhaseState operator-(PhaseState a, const PhaseState& b) { return a -= b; }
PhaseState operator*(double s, PhaseState a) { return a *= s; }

}  // namespace dirsol
