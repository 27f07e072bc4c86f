#include <doctest.h>

#include <cmath>
#include <random>

#include "dirsol/field_grid.hpp"

using namespace dirsol;

namespace {

double max_abs(const Mat4& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("Dirac matrices satisfy the Clifford relations exactly") {
    const auto& d = dirac();
    const Mat4 I = Mat4::Identity();
    for (int a = 0; a < 4; ++a) {
        const Mat4& A = d.by_index(a);
        CHECK(max_abs(A - A.adjoint()) == 0.0);
        for (int b = 0; b < 4; ++b) {
            const Mat4& B = d.by_index(b);
            const Mat4 anti = A * B + B * A;
            const Mat4 expected = a == b ? Mat4(2.0 * I) : Mat4(Mat4::Zero());
            CHECK(max_abs(anti - expected) <= 1e-14);
        }
    }
}

TEST_CASE("standard representation: beta diagonal, alpha2 purely imaginary") {
    const auto& d = dirac();
    CHECK(d.beta(0, 0) == cplx(1.0));
    CHECK(d.beta(3, 3) == cplx(-1.0));
    CHECK(d.alpha2.real().cwiseAbs().maxCoeff() == 0.0);
    CHECK(d.alpha1.imag().cwiseAbs().maxCoeff() == 0.0);
    CHECK(d.alpha3.imag().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("real orthogonality relations on random real spinors") {
    std::mt19937_64 gen(2024);
    std::normal_distribution<double> n01;
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        RSpinor s;
        for (int a = 0; a < 4; ++a) s[a] = n01(gen);
        for (double r : real_orthogonality(s)) worst = std::max(worst, std::abs(r));
    }
    CHECK(worst <= 1e-14);
}

TEST_CASE("charge density transform matches the grid transform") {
    ChargeDensity rho;
    rho.sigma = 1.3;
    rho.amplitude = 0.7;
    GridSpec g{24.0, 64};
    SpinorField f(g, Rep::Position);
    for_each_node(g, [&](std::size_t p, const Vec3& x) { f.at(p)[0] = rho.rho1(x); });
    const SpinorField fh = f.to_fourier();
    double worst = 0.0;
    for_each_mode(g, [&](std::size_t p, const Vec3& k, bool in_band) {
        if (in_band) worst = std::max(worst, std::abs(fh.at(p)[0] - rho.rho1_hat(k)));
    });
    CHECK(worst <= 1e-12);
    CHECK(rho.rho1_hat(0.0) == doctest::Approx(0.7 * std::pow(1.3, 3)));
}

TEST_CASE("charge density norm against grid quadrature") {
    ChargeDensity rho;
    rho.sigma = 0.9;
    GridSpec g{20.0, 64};
    double sum = 0.0;
    for_each_node(g, [&](std::size_t, const Vec3& x) { sum += rho.rho1(x) * rho.rho1(x); });
    CHECK(std::sqrt(sum * g.cell_volume()) == doctest::Approx(rho.l2_norm()).epsilon(1e-12));
}

TEST_CASE("Wiener symbol is strictly positive and equals m rho_hat^2") {
    ChargeDensity rho;
    rho.mass = 2.0;
    for (double k2 : {0.0, 1.0, 10.0, 50.0}) {
        CHECK(wiener_B(k2, rho) > 0.0);
        CHECK(wiener_B(k2, rho) == doctest::Approx(2.0 * std::pow(rho.rho1_hat(k2), 2)));
    }
}

TEST_CASE("charge density validation") {
    ChargeDensity rho;
    rho.sigma = 0.0;
    CHECK_THROWS_AS(rho.validate(), std::invalid_argument);
    rho = ChargeDensity{};
    rho.mass = -1.0;
    CHECK_THROWS_AS(rho.validate(), std::invalid_argument);
    rho = ChargeDensity{};
    rho.amplitude = std::nan("");
    CHECK_THROWS_AS(rho.validate(), std::invalid_argument);
    CHECK_NOTHROW(ChargeDensity{}.validate());
}
