#pragma once

#include <cstddef>
#include <vector>

#include "dirsol/spinor_algebra.hpp"

namespace dirsol {

// Periodic box [-L/2, L/2)^3 sampled at N points per axis.
// Position node j sits at x = -L/2 + j dx. Fourier slot n holds wavenumber 2 pi s(n) / L with
// s(n) = n for n < N/2 and n - N otherwise. The Nyquist plane s = -N/2 is carried in storage but
// its spectral wavenumber is taken as 0, so every multiplier stays Hermitian and band-limited
// translations remain exact.
struct GridSpec {
    double L = 80.0;
    int N = 64;

    void validate() const;
    double dx() const { return L / N; }
    double dk() const;
    std::size_t points() const { return static_cast<std::size_t>(N) * N * N; }
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * N + j) * N + k;
    }
    double x(int j) const { return -0.5 * L + j * dx(); }
    // Spectral wavenumber of Fourier slot n (zero on the Nyquist plane).
    double k(int n) const;
    // Unit-cell volumes.
    double cell_volume() const { double h = dx(); return h * h * h; }
    double mode_volume() const { double h = dk(); return h * h * h; }

    bool operator==(const GridSpec& o) const { return L == o.L && N == o.N; }
};

enum class Rep { Position, Fourier };

// Four complex components per grid point, stored contiguously (point-major).
class SpinorField {
public:
    SpinorField() = default;
    SpinorField(const GridSpec& g, Rep r);

    const GridSpec& grid() const { return grid_; }
    Rep rep() const { return rep_; }
    std::vector<cplx>& data() { return data_; }
    const std::vector<cplx>& data() const { return data_; }

    Eigen::Map<Spinor> at(std::size_t p) { return Eigen::Map<Spinor>(data_.data() + 4 * p); }
    Eigen::Map<const Spinor> at(std::size_t p) const {
        return Eigen::Map<const Spinor>(data_.data() + 4 * p);
    }

    // Converted copies; cheap no-op copy when already in the requested representation.
    SpinorField to_fourier() const;
    SpinorField to_position() const;
    SpinorField as(Rep r) const { return r == Rep::Fourier ? to_fourier() : to_position(); }

    SpinorField& operator+=(const SpinorField& o);
    SpinorField& operator-=(const SpinorField& o);
    SpinorField& operator*=(cplx s);

    // L^2 norm with the quadrature matching the current representation.
    double l2_norm() const;

private:
    GridSpec grid_;
    Rep rep_ = Rep::Position;
    std::vector<cplx> data_;
};

SpinorField operator+(SpinorField a, const SpinorField& b);
SpinorField operator-(SpinorField a, const SpinorField& b);
SpinorField operator*(cplx s, SpinorField a);

// Complex L^2 pairing \int conj(a) . b, computed in whichever representation both share.
cplx inner(const SpinorField& a, const SpinorField& b);

// Thread count used by transforms and mode loops.
void set_threads(int n);
int threads();

// Spectral derivative d/dx_j (j = 0,1,2); input and output in Fourier representation.
SpinorField spectral_derivative(const SpinorField& psi, int axis);

// Dirac symbol h(k) = -alpha.k + beta m, the Fourier image of -i alpha.grad + beta m.
Mat4 dirac_symbol(const Vec3& k, double m);

// h(k) u without forming the matrix.
inline Spinor apply_dirac_symbol(const Vec3& k, double m, const Spinor& u) {
    // alpha.k = [[0, s], [s, 0]] with s = [[k3, k1 - i k2], [k1 + i k2, -k3]].
    const cplx kp(k[0], k[1]), km(k[0], -k[1]);
    Spinor out;
    out[0] = m * u[0] - (k[2] * u[2] + km * u[3]);
    out[1] = m * u[1] - (kp * u[2] - k[2] * u[3]);
    out[2] = -m * u[2] - (k[2] * u[0] + km * u[1]);
    out[3] = -m * u[3] - (kp * u[0] - k[2] * u[1]);
    return out;
}

// W0(t): exp(-i t h(k)) per mode. Returns a field in the same representation as the input.
SpinorField free_propagate(const SpinorField& psi, double t, double m);

// W_v(t): free flight followed by translation by -v t.
SpinorField moving_frame_propagate(const SpinorField& psi, double t, const Vec3& v, double m);

// Band-limited translation psi(x) -> psi(x - b).
SpinorField translate(const SpinorField& psi, const Vec3& b);

// || (1 + |x - center|)^nu psi ||, minimum-image distance on the torus; position representation.
double weighted_norm(const SpinorField& psi, double nu, const Vec3& center = Vec3::Zero());

// Mode loop helpers. f(p, k, in_band) is called for each Fourier slot with its spectral
// wavenumber; in_band is false on the Nyquist planes.
template <class F>
void for_each_mode(const GridSpec& g, F&& f);

// Deterministic sum over modes: per-slab partials accumulated in slab order.
template <class T, class F>
T reduce_modes(const GridSpec& g, T zero, F&& f);

// Same pair for position nodes: f(p, x).
template <class F>
void for_each_node(const GridSpec& g, F&& f);

}  // namespace dirsol

#include "dirsol/field_grid_impl.hpp"
