#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "oracles.hpp"
#include "rmlab/numerics.hpp"
#include "rmlab/rng.hpp"
#include "rmlab/semicircle.hpp"

using namespace rmlab;
using std::complex;

TEST_CASE("density values and edges") {
    CHECK(semicircle::rho_sc(-2.0) == 0.0);
    CHECK(semicircle::rho_sc(2.0) == 0.0);
    CHECK(semicircle::rho_sc(2.5) == 0.0);
    CHECK(semicircle::rho_sc(0.0) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-14));
}

TEST_CASE("density integrates to one and cdf matches quadrature") {
    const double mass = numerics::adaptive_simpson(semicircle::rho_sc, -2.0, 2.0, 1e-13);
    CHECK(std::abs(mass - 1.0) < 1e-12);
    CounterRng rng(7, 0);
    for (int rep = 0; rep < 10; ++rep) {
        const double e = rng.uniform(-2.0, 2.0);
        const double quad = numerics::adaptive_simpson(semicircle::rho_sc, -2.0, e, 1e-13);
        CHECK(std::abs(semicircle::cdf(e) - quad) < 1e-12);
    }
    CHECK(semicircle::cdf(-3.0) == 0.0);
    CHECK(semicircle::cdf(3.0) == 1.0);
}

TEST_CASE("m_sc closed form agrees with the defining integral") {
    // Quadrature oracle for int rho(x)/(x - z) dx, real and imaginary parts.
    auto oracle = [](complex<double> z) {
        const double re = numerics::adaptive_simpson(
            [&](double x) { return semicircle::rho_sc(x) * (x - z.real()) / std::norm(x - z); }, -2.0, 2.0, 1e-13);
        const double im = numerics::adaptive_simpson(
            [&](double x) { return semicircle::rho_sc(x) * z.imag() / std::norm(x - z); }, -2.0, 2.0, 1e-13);
        return complex<double>(re, im);
    };
    for (const complex<double> z : {complex<double>(0.0, 1.0), complex<double>(1.3, 0.4), complex<double>(-2.4, 0.9)}) {
        CHECK(std::abs(semicircle::m_sc(z) - oracle(z)) < 1e-8);
    }
    // Golden-ratio value at z = i, from the quadratic root.
    CHECK(std::abs(semicircle::m_sc({0.0, 1.0}) - complex<double>(0.0, (std::sqrt(5.0) - 1.0) / 2.0)) < 1e-14);
}

TEST_CASE("m_sc far field and symmetry") {
    const complex<double> z(0.0, 100.0);
    CHECK(std::abs(semicircle::m_sc(z) + 1.0 / z) < 1e-3);
    CounterRng rng(3, 1);
    for (int rep = 0; rep < 50; ++rep) {
        const complex<double> w(rng.uniform(-3.0, 3.0), rng.uniform(0.01, 2.0));
        const auto lhs = semicircle::m_sc(complex<double>(-w.real(), w.imag()));
        CHECK(std::abs(lhs + std::conj(semicircle::m_sc(w))) < 1e-13);
    }
    CHECK_THROWS_AS(semicircle::m_sc({0.0, -1.0}), std::invalid_argument);
}

TEST_CASE("m_sc quadratic relation at random points") {
    CounterRng rng(11, 2);
    for (int rep = 0; rep < 1000; ++rep) {
        const complex<double> z(rng.uniform(-5.0, 5.0), rng.uniform(1e-3, 3.0));
        const auto m = semicircle::m_sc(z);
        CHECK(std::abs(m * m + z * m + 1.0) < 1e-12);
        CHECK(m.imag() > 0.0);
    }
}

TEST_CASE("quantiles: symmetry cases and quadrature oracle") {
    const auto q2 = semicircle::quantiles(2);
    CHECK(std::abs(q2.gammas(0)) < 1e-10);
    CHECK(q2.gammas(1) == 2.0);

    const auto q10 = semicircle::quantiles(10);
    CHECK(std::abs(q10.gammas(4)) < 1e-10);  // gamma_{N/2} = 0 for even N

    const auto q4 = semicircle::quantiles(4);
    CHECK(std::abs(q4.gammas(0) + q4.gammas(2)) < 1e-10);  // gamma_1 = -gamma_3
    const double quad = numerics::adaptive_simpson(semicircle::rho_sc, -2.0, q4.gammas(0), 1e-13);
    CHECK(std::abs(quad - 0.25) < 1e-10);

    for (int i = 0; i + 1 < 4; ++i) CHECK(q4.gammas(i) < q4.gammas(i + 1));
    CHECK(q4.gammas(0) >= -2.0);
    CHECK(q4.gammas(3) <= 2.0);
    CHECK_THROWS_AS(semicircle::quantiles(0), std::invalid_argument);
}

TEST_CASE("characteristic: s = 0, real ray, monotone imaginary part, semigroup") {
    CounterRng rng(17, 3);
    for (int rep = 0; rep < 100; ++rep) {
        const complex<double> z(rng.uniform(-2.5, 2.5), rng.uniform(1e-3, 1.5));
        CHECK(std::abs(semicircle::characteristic(z, 0.0) - z) < 1e-13);
        const double s = rng.uniform(0.0, 1.0), t = rng.uniform(0.0, 1.0);
        const auto zs = semicircle::characteristic(z, s);
        const auto zst = semicircle::characteristic(z, s + t);
        CHECK(zst.imag() >= zs.imag() - 1e-12);
        CHECK(std::abs(semicircle::characteristic(zs, t) - zst) < 1e-10);
    }
    // Along the real axis beyond the bulk the trajectory moves outward.
    const complex<double> z3(3.0, 1e-12);
    double prev = 3.0;
    for (double s = 0.1; s <= 1.0; s += 0.1) {
        const auto zs = semicircle::characteristic(z3, s);
        CHECK(std::abs(zs.imag()) < 1e-9);
        CHECK(zs.real() >= prev - 1e-12);
        prev = zs.real();
    }
    CHECK_THROWS_AS(semicircle::characteristic({0.0, 1.0}, -0.1), std::invalid_argument);
}

TEST_CASE("advection equation residuals") {
    const complex<double> c0(0.3, -1.1);
    CHECK(semicircle::advection_residual([c0](complex<double>) { return c0; }, {0.3, 0.4}, 0.3) < 1e-12);
    CHECK(semicircle::advection_residual([](complex<double> w) { return 1.0 / (w - 5.0); }, {0.3, 0.2}, 0.4) < 1e-6);
    CounterRng rng(8, 8);
    for (int rep = 0; rep < 20; ++rep) {
        const complex<double> z(rng.uniform(-1.0, 1.0), rng.uniform(0.2, 1.0));
        const double s = rng.uniform(0.05, 0.6);
        CHECK(semicircle::advection_residual([](complex<double> w) { return w * w; }, z, s) < 1e-6);
    }
}
