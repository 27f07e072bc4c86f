#include "dirsol/kspace_quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

namespace dirsol {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double euler_gamma = 0.57721566490153286061;

Mat3 trapezoid(const ChargeDensity& rho, double K, int n, const std::function<double(const Vec3&)>& weight) {
    const double h = 2.0 * K / (n - 1);
    std::vector<double> x(n), w(n);
    for (int i = 0; i < n; ++i) {
        x[i] = -K + i * h;
        w[i] = (i == 0 || i == n - 1) ? 0.5 * h : h;
    }
    std::vector<Mat3> slab(n, Mat3::Zero());
#pragma omp parallel for schedule(static)
    for (int a = 0; a < n; ++a) {
        Mat3 acc = Mat3::Zero();
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                const Vec3 k(x[a], x[b], x[c]);
                const double f = w[a] * w[b] * w[c] * wiener_B(k, rho) * weight(k);
                acc += f * (k * k.transpose());
            }
        slab[a] = acc;
    }
    Mat3 total = Mat3::Zero();
    for (const auto& s : slab) total += s;
    return total;
}

}  // namespace

QuadResult moment_quadrature(const ChargeDensity& rho, const QuadratureSpec& q,
                             const std::function<double(const Vec3&)>& weight) {
    if (!(q.k_max > 0.0) || q.nodes < 9) throw std::invalid_argument("quadrature: need k_max > 0 and nodes >= 9");
    QuadResult r;
    r.tolerance = q.tolerance;
    r.value = trapezoid(rho, q.k_max, q.nodes, weight);
    const Mat3 coarse = trapezoid(rho, q.k_max, std::max(9, (2 * q.nodes) / 3), weight);
    r.error = (r.value - coarse).cwiseAbs().maxCoeff();
    return r;
}

cplx exp_e1(cplx z) {
    if (z == cplx(0.0)) throw std::domain_error("E1 is singular at 0");
    const double az = std::abs(z);
    if (az < 2.0 || (z.real() < 0.0 && az + z.real() < 10.0)) {
        // E1 = -gamma - log z + sum_{n>=1} (-1)^{n+1} z^n / (n n!)
        cplx term = z;
        cplx sum = z;
        for (int n = 2; n < 2000; ++n) {
            term *= -z / static_cast<double>(n);
            const cplx add = term / static_cast<double>(n);
            sum += add;
            if (std::abs(add) < 1e-17 * std::abs(sum)) break;
        }
        return std::exp(z) * (-euler_gamma - std::log(z) + sum);
    }
    // e^z E1(z) = 1/(z+1- 1/(z+3- 4/(z+5- ...))), modified Lentz.
    const double tiny = 1e-300;
    cplx b = z + 1.0;
    cplx c = 1.0 / tiny;
    cplx d = 1.0 / b;
    cplx h = d;
    for (int i = 1; i < 1000000; ++i) {
        const double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const cplx del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) return h;
    }
    throw std::runtime_error("E1 continued fraction did not converge");
}

cplx exp_e1_boundary(double x, int side) {
    if (x > 0.0) return exp_e1(cplx(x, 0.0));
    if (x == 0.0) throw std::domain_error("E1 is singular at 0");
    // E1(x +- i0) = -Ei(-x) -+ i pi for x < 0
    const double ex = std::exp(x);
    return cplx(-ex * std::expint(-x), -pi * side * ex);
}

namespace {

using GL = boost::math::quadrature::gauss<double, 30>;

template <class F>
Eigen::Vector2cd gl_panel(F&& f, double a, double b) {
    const auto& xs = GL::abscissa();
    const auto& ws = GL::weights();
    const double c = 0.5 * (a + b), r = 0.5 * (b - a);
    Eigen::Vector2cd acc = Eigen::Vector2cd::Zero();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] == 0.0) {
            acc += ws[i] * f(c);
        } else {
            acc += ws[i] * (f(c - r * xs[i]) + f(c + r * xs[i]));
        }
    }
    return acc * r;
}

// Panels shrinking geometrically towards `toward` (an end of [a, b]). The innermost sliver,
// below 1e-13 relative to the endpoint scale, is dropped: the kernels are at most
// logarithmically singular there.
template <class F>
Eigen::Vector2cd graded(F&& f, double a, double b, bool toward_a, int levels) {
    Eigen::Vector2cd acc = Eigen::Vector2cd::Zero();
    const double len = b - a;
    const double scale = std::max(1.0, std::abs(toward_a ? a : b));
    const int cap = static_cast<int>(std::floor(std::log2(len / (1e-13 * scale))));
    levels = std::clamp(cap, 1, levels);
    double outer = 1.0;
    for (int l = 0; l < levels; ++l) {
        const double inner = 0.5 * outer;
        if (toward_a) acc += gl_panel(f, a + len * inner, a + len * outer);
        else acc += gl_panel(f, b - len * outer, b - len * inner);
        outer = inner;
    }
    return acc;
}

// Integrate over [-K, K] with panels graded towards every breakpoint.
template <class F>
Eigen::Vector2cd line_integral(F&& f, double K, std::vector<double> breaks, int levels) {
    breaks.push_back(-K);
    breaks.push_back(K);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::remove_if(breaks.begin(), breaks.end(), [K](double x) { return x < -K || x > K; }),
                 breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    Eigen::Vector2cd acc = Eigen::Vector2cd::Zero();
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i], b = breaks[i + 1];
        const double mid = 0.5 * (a + b);
        acc += graded(f, a, mid, true, levels);
        acc += graded(f, mid, b, false, levels);
    }
    return acc;
}

// Zeros of Re a(k1) and the vertex of the parabola, for lambda = eps + i omega.
std::vector<double> breakpoints(double omega, double speed, double m) {
    const double g2 = 1.0 - speed * speed;
    std::vector<double> br{speed * omega / g2};
    const double disc = omega * omega - g2 * m * m;
    if (disc > 0.0) {
        const double r = std::sqrt(disc);
        br.push_back((speed * omega - r) / g2);
        br.push_back((speed * omega + r) / g2);
    }
    return br;
}

template <class J>
Eigen::Vector3cd h_from_kernel(J&& kernel, double omega, double speed, const ChargeDensity& rho,
                               const CutIntegralOptions& opt) {
    if (!(speed >= 0.0 && speed < 1.0)) throw std::invalid_argument("H requires 0 <= |v| < 1");
    const double s = rho.sigma * rho.sigma;
    const double c = rho.mass * std::pow(rho.amplitude * rho.sigma * rho.sigma * rho.sigma, 2);
    const double K = 9.0 / rho.sigma;
    // Transverse integrals of exp(-s u)/(u + a), u = k2^2 + k3^2:
    //   \int dk2 dk3 (...)      = pi J,             J = e^{s a} E1(s a)
    //   \int dk2 dk3 k2^2 (...) = (pi/2)(1/s - a J)
    auto f = [&](double k1) -> Eigen::Vector2cd {
        const auto [a, Jv] = kernel(k1, s);
        const double g = c * std::exp(-s * k1 * k1);
        Eigen::Vector2cd out;
        out << g * pi * k1 * k1 * Jv, g * 0.5 * pi * (1.0 / s - a * Jv);
        return out;
    };
    const Eigen::Vector2cd r = line_integral(f, K, breakpoints(omega, speed, rho.mass), opt.grading_levels);
    return Eigen::Vector3cd(r[0], r[1], r[1]);
}

}  // namespace

Eigen::Vector3cd h_diagonal(cplx lambda, double speed, const ChargeDensity& rho, const CutIntegralOptions& opt) {
    if (!(lambda.real() > 0.0) && !(lambda.real() == 0.0 && lambda.imag() == 0.0))
        throw std::invalid_argument("H(lambda) needs Re lambda > 0; use the boundary value on the imaginary axis");
    const double m = rho.mass;
    auto kernel = [&](double k1, double s) {
        const cplx w = speed * k1 - cplx(0.0, 1.0) * lambda;
        const cplx a = k1 * k1 + m * m - w * w;
        return std::pair<cplx, cplx>(a, exp_e1(s * a));
    };
    return h_from_kernel(kernel, lambda.imag(), speed, rho, opt);
}

Eigen::Vector3cd h_diagonal_boundary(double omega, double speed, const ChargeDensity& rho,
                                     const CutIntegralOptions& opt) {
    const double m = rho.mass;
    auto kernel = [&](double k1, double s) {
        const double w = speed * k1 + omega;
        const double a = k1 * k1 + m * m - w * w;
        // Im a = 2 eps (|v| k1 + omega) for lambda = eps + i omega.
        const int side = w >= 0.0 ? 1 : -1;
        return std::pair<cplx, cplx>(cplx(a, 0.0), exp_e1_boundary(s * a, side));
    };
    return h_from_kernel(kernel, omega, speed, rho, opt);
}

}  // namespace dirsol
