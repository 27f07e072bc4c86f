#include "dirsol/field_grid.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <fftw3.h>
#ifdef _OPENMP
#include <omp.h>
#endif

namespace dirsol {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

int g_threads = 1;

// Plans depend on (N, direction, thread count). FFTW_ESTIMATE keeps plan choice, and therefore
// rounding, independent of timing noise.
struct PlanCache {
    std::mutex mu;
    std::map<std::tuple<int, int, int>, fftw_plan> plans;

    fftw_plan get(int N, int sign) {
        std::lock_guard<std::mutex> lock(mu);
        auto key = std::make_tuple(N, sign, g_threads);
        auto it = plans.find(key);
        if (it != plans.end()) return it->second;
        static bool threads_ready = false;
        if (!threads_ready) {
            fftw_init_threads();
            threads_ready = true;
        }
        fftw_plan_with_nthreads(g_threads);
        const int n[3] = {N, N, N};
        const std::size_t total = 4 * static_cast<std::size_t>(N) * N * N;
        auto* buf = fftw_alloc_complex(total);
        // Four interleaved components: stride 4 between points, offset 1 between components.
        fftw_plan p = fftw_plan_many_dft(3, n, 4, buf, nullptr, 4, 1, buf, nullptr, 4, 1, sign,
                                         FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(buf);
        if (!p) throw std::runtime_error("FFTW plan creation failed");
        plans.emplace(key, p);
        return p;
    }
};

PlanCache& plan_cache() {
    static PlanCache c;
    return c;
}

void execute(std::vector<cplx>& data, int N, int sign) {
    fftw_plan p = plan_cache().get(N, sign);
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(p, ptr, ptr);
}

// (-1)^(a+b+c): converts between the centred node origin and the FFT origin.
void checkerboard(std::vector<cplx>& data, const GridSpec& g, double scale) {
    const int N = g.N;
#pragma omp parallel for schedule(static)
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
            for (int c = 0; c < N; ++c) {
                const double s = ((a + b + c) & 1) ? -scale : scale;
                const std::size_t p = 4 * g.index(a, b, c);
                for (int q = 0; q < 4; ++q) data[p + q] *= s;
            }
}

}  // namespace

void GridSpec::validate() const {
    if (!(L > 0.0)) throw std::invalid_argument("grid: L must be positive");
    if (N < 4 || (N & (N - 1)) != 0) throw std::invalid_argument("grid: N must be a power of two >= 4");
}

double GridSpec::dk() const { return two_pi / L; }

double GridSpec::k(int n) const {
    if (n == N / 2) return 0.0;
    const int s = n < N / 2 ? n : n - N;
    return dk() * s;
}

SpinorField::SpinorField(const GridSpec& g, Rep r) : grid_(g), rep_(r), data_(4 * g.points(), cplx(0.0)) {}

SpinorField SpinorField::to_fourier() const {
    if (rep_ == Rep::Fourier) return *this;
    SpinorField out = *this;
    const double c = grid_.cell_volume() / std::pow(two_pi, 1.5);
    execute(out.data_, grid_.N, FFTW_BACKWARD);  // kernel e^{+i k x}
    checkerboard(out.data_, grid_, c);
    out.rep_ = Rep::Fourier;
    return out;
}

SpinorField SpinorField::to_position() const {
    if (rep_ == Rep::Position) return *this;
    SpinorField out = *this;
    const double c = grid_.mode_volume() / std::pow(two_pi, 1.5);
    checkerboard(out.data_, grid_, c);
    execute(out.data_, grid_.N, FFTW_FORWARD);  // kernel e^{-i k x}
    out.rep_ = Rep::Position;
    return out;
}

namespace {
void require_same(const SpinorField& a, const SpinorField& b) {
    if (!(a.grid() == b.grid())) throw std::invalid_argument("spinor fields live on different grids");
}
}  // namespace

SpinorField& SpinorField::operator+=(const SpinorField& o) {
    require_same(*this, o);
    const SpinorField& r = o.rep() == rep_ ? o : o.as(rep_);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += r.data_[i];
    return *this;
}

SpinorField& SpinorField::operator-=(const SpinorField& o) {
    require_same(*this, o);
    const SpinorField& r = o.rep() == rep_ ? o : o.as(rep_);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= r.data_[i];
    return *this;
}

SpinorField& SpinorField::operator*=(cplx s) {
    for (auto& z : data_) z *= s;
    return *this;
}

SpinorField operator+(SpinorField a, const SpinorField& b) { return a += b; }
SpinorField operator-(SpinorField a, const SpinorField& b) { return a -= b; }
SpinorField operator*(cplx s, SpinorField a) { return a *= s; }

double SpinorField::l2_norm() const {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    const double w = rep_ == Rep::Position ? grid_.cell_volume() : grid_.mode_volume();
    return std::sqrt(s * w);
}

cplx inner(const SpinorField& a, const SpinorField& b) {
    require_same(a, b);
    const SpinorField& bb = b.rep() == a.rep() ? b : b.as(a.rep());
    const auto& x = a.data();
    const auto& y = bb.data();
    const GridSpec& g = a.grid();
    const std::size_t per_slab = 4 * static_cast<std::size_t>(g.N) * g.N;
    std::vector<cplx> slab(g.N, cplx(0.0));
#pragma omp parallel for schedule(static)
    for (int s = 0; s < g.N; ++s) {
        cplx acc = 0.0;
        const std::size_t base = s * per_slab;
        for (std::size_t i = 0; i < per_slab; ++i) acc += std::conj(x[base + i]) * y[base + i];
        slab[s] = acc;
    }
    cplx total = 0.0;
    for (const auto& z : slab) total += z;
    const double w = a.rep() == Rep::Position ? g.cell_volume() : g.mode_volume();
    return total * w;
}

void set_threads(int n) {
    g_threads = n < 1 ? 1 : n;
#ifdef _OPENMP
    omp_set_num_threads(g_threads);
#endif
}

int threads() { return g_threads; }

SpinorField spectral_derivative(const SpinorField& psi, int axis) {
    if (psi.rep() != Rep::Fourier) throw std::invalid_argument("spectral_derivative expects Fourier data");
    SpinorField out = psi;
    const cplx mi(0.0, -1.0);
    for_each_mode(psi.grid(), [&](std::size_t p, const Vec3& k, bool) { out.at(p) *= mi * k[axis]; });
    return out;
}

Mat4 dirac_symbol(const Vec3& k, double m) {
    const auto& d = dirac();
    return -(k[0] * d.alpha1 + k[1] * d.alpha2 + k[2] * d.alpha3) + m * d.beta;
}

namespace {

// exp(-i t h) u = cos(w t) u - i sin(w t) h u / w, with h^2 = w^2.
Spinor free_flight(const Vec3& k, double t, double m, const Spinor& u) {
    const double w = std::sqrt(k.squaredNorm() + m * m);
    const double sn = w > 0.0 ? std::sin(w * t) / w : t;
    return std::cos(w * t) * u - cplx(0.0, sn) * apply_dirac_symbol(k, m, u);
}

}  // namespace

SpinorField free_propagate(const SpinorField& psi, double t, double m) {
    SpinorField f = psi.to_fourier();
    for_each_mode(f.grid(), [&](std::size_t p, const Vec3& k, bool) {
        const Spinor u = f.at(p);
        f.at(p) = free_flight(k, t, m, u);
    });
    return psi.rep() == Rep::Fourier ? f : f.to_position();
}

SpinorField moving_frame_propagate(const SpinorField& psi, double t, const Vec3& v, double m) {
    if (!(v.norm() < 1.0)) throw std::invalid_argument("moving frame requires |v| < 1");
    SpinorField f = psi.to_fourier();
    for_each_mode(f.grid(), [&](std::size_t p, const Vec3& k, bool) {
        const Spinor u = f.at(p);
        f.at(p) = std::polar(1.0, -k.dot(v) * t) * free_flight(k, t, m, u);
    });
    return psi.rep() == Rep::Fourier ? f : f.to_position();
}

SpinorField translate(const SpinorField& psi, const Vec3& b) {
    SpinorField f = psi.to_fourier();
    for_each_mode(f.grid(), [&](std::size_t p, const Vec3& k, bool) { f.at(p) *= std::polar(1.0, k.dot(b)); });
    return psi.rep() == Rep::Fourier ? f : f.to_position();
}

double weighted_norm(const SpinorField& psi, double nu, const Vec3& center) {
    if (psi.rep() != Rep::Position) throw std::invalid_argument("weighted_norm expects position data");
    const GridSpec& g = psi.grid();
    const double L = g.L;
    std::vector<double> slab(g.N, 0.0);
    const int N = g.N;
#pragma omp parallel for schedule(static)
    for (int a = 0; a < N; ++a) {
        double acc = 0.0;
        for (int b = 0; b < N; ++b)
            for (int c = 0; c < N; ++c) {
                Vec3 d(g.x(a), g.x(b), g.x(c));
                d -= center;
                for (int j = 0; j < 3; ++j) d[j] -= L * std::round(d[j] / L);
                const double w = std::pow(1.0 + d.norm(), nu);
                acc += w * w * psi.at(g.index(a, b, c)).squaredNorm();
            }
        slab[a] = acc;
    }
    double total = 0.0;
    for (double s : slab) total += s;
    return std::sqrt(total * g.cell_volume());
}

}  // namespace dirsol
